"""Independent high-precision reference values for the test-suite.

Everything here uses mpmath's high level API at a fixed, generous precision
and shares no code with :mod:`mlorder`.
"""

import mpmath as mp

DPS = 60


def ml_series(alpha, beta, z, nterms=400, dps=DPS, deriv=0):
    """Brute-force truncated power series of E_{alpha,beta}(z) (or its first derivative)."""
    with mp.workdps(dps):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        if deriv == 0:
            return mp.fsum(x**k * mp.rgamma(k * a + b) for k in range(nterms))
        return mp.fsum(k * x ** (k - 1) * mp.rgamma(k * a + b) for k in range(1, nterms))


def ml_integral(alpha, beta, z, dps=40):
    """Integral representation of E_{alpha,beta}(z) for z < 0, 0 < alpha < 1, beta < 1 + alpha."""
    with mp.workdps(dps):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)

        def kernel(c):
            num = c * mp.sin(mp.pi * (1 - b)) - x * mp.sin(mp.pi * (1 - b + a))
            den = c * c - 2 * c * x * mp.cos(a * mp.pi) + x * x
            return c ** ((1 - b) / a) * mp.exp(-(c ** (1 / a))) * num / den / (a * mp.pi)

        return mp.quad(kernel, [0, 1, 10, 100, 1000, mp.inf])


def ml_half(z, dps=DPS):
    """E_{1/2,1}(z) = exp(z^2) erfc(-z)."""
    with mp.workdps(dps):
        x = mp.mpf(z)
        return mp.exp(x * x) * mp.erfc(-x)
