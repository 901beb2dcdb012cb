"""Independent high-precision oracles for frozen scalar fixtures.

Run: python3 fixtures/oracle_specfun.py > fixtures/scalar_oracles.json
Requires mpmath. All values are computed at 50 significant digits.
"""
import json
import mpmath as mp

mp.mp.dps = 50


def ml_series(alpha, beta, z, terms=600):
    alpha, beta, z = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
    return mp.fsum(z**k * mp.rgamma(alpha * k + beta) for k in range(terms))


def powerlog(x, beta=1):
    x = mp.mpf(x)
    return x / mp.log(1 + x ** (mp.mpf(beta) / 2))


def powerlog_dlog(x):
    # x phi'(x) / phi(x) for beta = 1
    x = mp.mpf(x)
    return mp.diff(lambda y: powerlog(y), x) * x / powerlog(x)


def delta0_pairs(phi, lo, hi, n):
    a, b = mp.log(lo), mp.log(hi)
    xs = [mp.e ** (a + (b - a) * i / (n - 1)) for i in range(n)]
    ls = [mp.log(phi(x)) for x in xs]
    best = mp.inf
    for i in range(n):
        for j in range(i + 1, n):
            s = (ls[j] - ls[i]) / (mp.log(xs[j]) - mp.log(xs[i]))
            if s < best:
                best = s
    return best


def main():
    mp.mp.dps = 50
    out = {
        "provenance": "mpmath 50-digit oracles; series with 600 terms; scripts in fixtures/oracle_specfun.py",
        "ml_0.6_1_m2": mp.nstr(ml_series(0.6, 1, -2), 20),
        "ml_0.7_0.7_m3": mp.nstr(ml_series(0.7, 0.7, -3), 20),
        "wright_0.5_1": mp.nstr(mp.exp(-mp.mpf(1) / 4) / mp.sqrt(mp.pi), 20),
        "powerlog_inverse_of_1": mp.nstr(mp.findroot(lambda x: powerlog(x) - 1, 3), 20),
        "powerlog_phi_1": mp.nstr(powerlog(1), 20),
    }
    mp.mp.dps = 20
    out["powerlog_delta0_1e-3_1e6_n400"] = mp.nstr(delta0_pairs(powerlog, mp.mpf("1e-3"), mp.mpf("1e6"), 400), 12)
    xs = [mp.mpf(10) ** (-3 + 6 * mp.mpf(i) / 2000) for i in range(2001)]
    out["powerlog_sup_dlog_1e-3_1e3"] = mp.nstr(max(powerlog_dlog(x) for x in xs), 12)
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
