"""High-precision reference values frozen into the Rust test suites.

Run with `python3 tools/oracles.py`; every printed value is copied verbatim
into the test that asserts it.
"""
import mpmath as mp

mp.mp.dps = 50


def bandwidth(n, alpha):
    return int(mp.floor(mp.power(n, mp.mpf(alpha))))


def logcov(rho2, terms=2000):
    rho2 = mp.mpf(rho2)
    psi_half = mp.digamma(mp.mpf(1) / 2)
    s1 = mp.mpf(0)
    s2 = mp.mpf(0)
    for k in range(1, terms + 1):
        c = mp.gamma(mp.mpf(1) / 2 + k) / mp.gamma(mp.mpf(1) / 2) / mp.factorial(k)
        g = mp.digamma(mp.mpf(1) / 2 + k) + psi_half
        t = c * rho2 ** k
        s1 += g * t
        s2 += g * g * t
    return mp.sqrt(1 - rho2) * s2 - (1 - rho2) * s1 ** 2


def abs2(T, x):
    s = mp.sin(T * x / 2)
    d = mp.sin(x / 2)
    if abs(d) < mp.mpf(10) ** -40:
        return mp.mpf(T) ** 2
    return (s / d) ** 2


def fstar_white(lam):
    return 1 / (2 * mp.pi)


def rho(l, lam, mu, f):
    num = mp.mpf(3) / l + (abs2(l, -lam + mu) + abs2(l, lam + mu)) / l ** 2 * f(lam) / f(mu)
    den = mp.sqrt((1 + mp.mpf(3) / l + abs2(l, 2 * lam) / l ** 2) * (1 + mp.mpf(3) / l + abs2(l, 2 * mu) / l ** 2))
    r = num / den
    cap = 1 - mp.mpf(10) ** -9
    return min(max(r, mp.mpf(0)), cap)


def covariances(n, m, alpha, f, terms=500):
    l = n // m
    nn = bandwidth(n, alpha)
    nl = bandwidth(l, alpha)
    lam = [2 * mp.pi * j / n for j in range(1, nn + 1)]
    mu = [2 * mp.pi * j / l for j in range(1, nl + 1)]
    x = [mp.log(2 * mp.sin(v / 2)) for v in lam]
    xs = [mp.log(2 * mp.sin(v / 2)) for v in mu]
    a = [v - sum(x) / nn for v in x]
    b = [v - sum(xs) / nl for v in xs]
    sxx = sum(v * v for v in a)
    sxs = sum(v * v for v in b)
    cache = {}

    def lc(r2):
        key = mp.nstr(r2, 40)
        if key not in cache:
            cache[key] = logcov_capped(r2, terms)
        return cache[key]

    cs = mp.mpf(0)
    for j in range(nn):
        for k in range(nl):
            r = rho(l, lam[j], mu[k], f)
            cs += a[j] * b[k] * lc(r * r)
    cs /= 4 * sxx * sxs
    cd = mp.mpf(0)
    for j in range(nl):
        for k in range(nl):
            r = rho(l, mu[j], mu[k], f)
            cd += b[j] * b[k] * lc(r * r)
    cd /= 4 * sxs * sxs
    return cs, cd


def logcov_capped(rho2, max_terms, rel_tol=mp.mpf("1e-12")):
    """Same stopping rule as the library: stop when both partial sums have
    converged to rel_tol or at max_terms."""
    psi_half = mp.digamma(mp.mpf(1) / 2)
    s1 = mp.mpf(0)
    s2 = mp.mpf(0)
    c = mp.mpf(1)
    g = psi_half
    for k in range(1, max_terms + 1):
        c = c * (k - mp.mpf(1) / 2) / k
        g = g + 1 / (mp.mpf(1) / 2 + k - 1)
        gg = g + psi_half
        t = c * rho2 ** k
        s1 += gg * t
        s2 += gg * gg * t
        if abs(gg * t) <= rel_tol * abs(s1) and abs(gg * gg * t) <= rel_tol * abs(s2):
            break
    return mp.sqrt(1 - rho2) * s2 - (1 - rho2) * s1 ** 2


if __name__ == "__main__":
    for n in (48, 96, 288, 576, 12, 24, 72, 144, 192):
        print("bandwidth", n, bandwidth(n, "0.65"))
    for r2 in ("0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.35", "0.4", "0.45", "0.5",
               "0.55", "0.6", "0.65", "0.7", "0.75", "0.8", "0.85", "0.9"):
        print("logcov", r2, mp.nstr(logcov(mp.mpf(r2)), 20))
    nn, nl = 19, 12
    wn = 1 / (1 - (mp.mpf(nn) * 48 / (nl * 2 * 96)) ** 2)
    print("chambers96", mp.nstr(wn, 20), mp.nstr((wn - 1) / 2, 20))
    print("digamma", mp.nstr(mp.digamma(1), 20), mp.nstr(mp.digamma(0.5), 20), mp.nstr(mp.digamma(2.5), 20))
    print("fn gamma0 d=0.25", mp.nstr(mp.gamma(1 - 2 * mp.mpf("0.25")) / mp.gamma(1 - mp.mpf("0.25")) ** 2, 20))
    for (n, m) in ((96, 2), (96, 3), (96, 4), (48, 2)):
        cs, cd = covariances(n, m, "0.65", fstar_white)
        print("cov white", n, m, mp.nstr(cs, 20), mp.nstr(cd, 20))
