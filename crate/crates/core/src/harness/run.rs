use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::config::{EstimatorKind, ExperimentConfig, Knowledge};
use super::summary::{summarize, McSummary};
use crate::altestimators::{fit_mle, fit_pw, fit_pw_known, gs_estimate, FixedShort};
use crate::arfima::{autocovariances_exact, simulate_from_acvf};
use crate::error::Result;
use crate::jackknife::feasible::{estimated_model, feasible_jackknife};
use crate::jackknife::{
    chambers_weights, estimator_covariances, optimal_weights, CovarianceCache, JackknifeSetup, JackknifeWeights, Scheme,
    SubsamplePlan,
};
use crate::lpr::LprPlan;

/// One output column of the experiment: an estimator, and for jackknife
/// estimators the scheme and sub-sample count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub estimator: EstimatorKind,
    pub scheme: Option<Scheme>,
    pub m: Option<usize>,
}

/// Estimates from a single replication, one per cell (`Err` holds the reason
/// for a failed cell).
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub rep_index: u64,
    pub estimates: Vec<std::result::Result<f64, String>>,
}

struct JackContext {
    setup: JackknifeSetup,
    chambers: JackknifeWeights,
    true_optimal: Option<JackknifeWeights>,
}

/// Everything that is shared across replications.
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub cells: Vec<Cell>,
    acvf: Vec<f64>,
    lpr: LprPlan,
    jack: Vec<JackContext>,
    pub cache: CovarianceCache,
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let mut estimators = cfg.estimators.clone();
        estimators.sort();
        estimators.dedup();
        let mut cells = Vec::new();
        for &e in &estimators {
            if e.is_jackknife() {
                for &scheme in &cfg.schemes {
                    for &m in &cfg.m_values {
                        cells.push(Cell { estimator: e, scheme: Some(scheme), m: Some(m) });
                    }
                }
            } else {
                cells.push(Cell { estimator: e, scheme: None, m: None });
            }
        }
        let acvf = autocovariances_exact(&cfg.model, cfg.n - 1)?;
        let lpr = LprPlan::new(cfg.n, cfg.alpha)?;
        let cache = CovarianceCache::new();
        let needs_true_opt = cfg.knowledge == Knowledge::TrueParams && estimators.contains(&EstimatorKind::JackOpt);
        let mut jack = Vec::new();
        if estimators.iter().any(|e| e.is_jackknife()) {
            for &scheme in &cfg.schemes {
                for &m in &cfg.m_values {
                    let plan = SubsamplePlan::new(scheme, cfg.n, m)?;
                    let true_optimal = if needs_true_opt {
                        let cov = cache.get_or_compute(&cfg.model, &plan, cfg.alpha)?;
                        Some(optimal_weights(&plan, cfg.alpha, &cov)?)
                    } else {
                        None
                    };
                    jack.push(JackContext {
                        setup: JackknifeSetup::new(&plan, cfg.alpha)?,
                        chambers: chambers_weights(&plan, cfg.alpha)?,
                        true_optimal,
                    });
                }
            }
        }
        Ok(Self { cfg, cells, acvf, lpr, jack, cache })
    }

    fn jack_context(&self, scheme: Scheme, m: usize) -> &JackContext {
        self.jack
            .iter()
            .find(|j| j.setup.plan.scheme == scheme && j.setup.plan.m == m)
            .expect("context built for every configured scheme and m")
    }

    /// Simulated series for replication `rep_index`, from a ChaCha stream
    /// keyed by `(seed, rep_index)`.
    pub fn draw(&self, rep_index: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(rep_index);
        simulate_from_acvf(&self.acvf, self.cfg.model.mu, &mut rng)
    }

    /// Runs every cell on one simulated series.
    pub fn run_replication(&self, rep_index: u64) -> Result<ReplicationRow> {
        let y = self.draw(rep_index)?;
        let estimates = self.cells.iter().map(|c| self.run_cell(c, &y).map_err(|e| e.to_string())).collect();
        Ok(ReplicationRow { rep_index, estimates })
    }

    fn run_cell(&self, cell: &Cell, y: &[f64]) -> Result<f64> {
        let cfg = &self.cfg;
        let (p, q) = cfg.fitted_orders();
        let known = cfg.knowledge == Knowledge::TrueParams;
        match cell.estimator {
            EstimatorKind::Lpr => Ok(self.lpr.estimate(y)?.d),
            EstimatorKind::Gs => gs_estimate(y, &cfg.gs),
            EstimatorKind::Mle => {
                let fixed = known.then(|| FixedShort { ar: cfg.model.ar.clone(), ma: cfg.model.ma.clone() });
                Ok(fit_mle(y, p, q, fixed.as_ref())?.d)
            }
            EstimatorKind::Pw => {
                if known {
                    fit_pw_known(y, &cfg.model.ar, &cfg.model.ma)
                } else {
                    fit_pw(y, p, q)
                }
            }
            EstimatorKind::JackChambers | EstimatorKind::JackOpt | EstimatorKind::JackFeasible => {
                let (scheme, m) = (cell.scheme.expect("jackknife cell"), cell.m.expect("jackknife cell"));
                let ctx = self.jack_context(scheme, m);
                let plan = &ctx.setup.plan;
                match cell.estimator {
                    EstimatorKind::JackChambers => Ok(ctx.setup.estimate(y, &ctx.chambers)?.d_jack),
                    EstimatorKind::JackOpt => match &ctx.true_optimal {
                        Some(w) => Ok(ctx.setup.estimate(y, w)?.d_jack),
                        None => {
                            let d0 = gs_estimate(y, &cfg.gs)?;
                            let model = estimated_model(y, d0, p, q)?;
                            let cov = estimator_covariances(&model, cfg.n, plan, cfg.alpha)?;
                            let w = optimal_weights(plan, cfg.alpha, &cov)?;
                            Ok(ctx.setup.estimate(y, &w)?.d_jack)
                        }
                    },
                    _ => Ok(feasible_jackknife(y, plan, cfg.alpha, p, q, &cfg.iteration)?.d),
                }
            }
        }
    }
}

fn run_all(exp: &Experiment, threads: Option<usize>) -> Result<Vec<ReplicationRow>> {
    let reps = exp.cfg.reps as u64;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t.max(1));
        }
        let pool = builder.build().map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| (0..reps).into_par_iter().map(|r| exp.run_replication(r)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        (0..reps).map(|r| exp.run_replication(r)).collect()
    }
}

/// Rows of every replication, in replication order.
pub fn run_rows(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<(Experiment, Vec<ReplicationRow>)> {
    let exp = Experiment::new(cfg.clone())?;
    let rows = run_all(&exp, threads)?;
    Ok((exp, rows))
}

/// Runs all replications and aggregates bias and RMSE per cell.
///
/// Results do not depend on `threads`: each replication owns its random
/// stream and the moments are summed pairwise in replication order.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<McSummary> {
    let start = Instant::now();
    let (exp, rows) = run_rows(cfg, threads)?;
    let mut summary = summarize(&exp.cfg, &exp.cells, &rows);
    summary.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(summary)
}
