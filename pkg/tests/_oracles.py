"""Independent high-precision oracles (mpmath) used to pin expected values.

These never call into the package's own summation paths; they sum the
defining series directly with mpmath primitives.
"""

from mpmath import mp, mpf


def mp_ml(alpha, beta, x, dps=50, max_terms=200_000):
    """Direct high-precision summation of sum_k x^k / Gamma(beta + alpha k)."""
    with mp.workdps(dps):
        alpha = mpf(alpha)
        beta = mpf(beta)
        x = mpf(x)
        s = mpf(0)
        small = 0
        for k in range(max_terms):
            t = x**k * mp.rgamma(beta + alpha * k)
            s += t
            if s != 0 and abs(t) <= mpf(10) ** (-dps - 5) * abs(s):
                small += 1
                if small >= 5 and k > 10:
                    return +s
            else:
                small = 0
    raise RuntimeError("oracle series did not converge")


def mp_ml_derivative(alpha, beta, x, n, dps=50, max_terms=200_000):
    """High-precision n-th derivative through the differentiated series."""
    with mp.workdps(dps):
        alpha = mpf(alpha)
        beta = mpf(beta)
        x = mpf(x)
        s = mpf(0)
        small = 0
        for j in range(max_terms):
            t = mp.rf(j + 1, n) * x**j * mp.rgamma(beta + alpha * (j + n))
            s += t
            if s != 0 and abs(t) <= mpf(10) ** (-dps - 5) * abs(s):
                small += 1
                if small >= 5 and j > 10:
                    return +s
            else:
                small = 0
    raise RuntimeError("oracle derivative series did not converge")


def mp_gamma_sign(x, dps=50):
    """Sign of Gamma(x) (0 at the poles), via mpmath's reciprocal gamma."""
    with mp.workdps(dps):
        v = mp.rgamma(mpf(x))
        if v == 0:
            return 0
        return 1 if v > 0 else -1
