"""Complementary error function and its two-branch elementary approximation.

``erfc`` is the high-accuracy reference used by the exact BER integrand;
``erfc_approx`` is the closed-form surrogate whose substitution into the exact
integrand yields the split-kernel BER approximation.
"""

import math

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_FOUR_OVER_PI = 4.0 / math.pi
_PI_OVER_SQRT6 = math.pi / math.sqrt(6.0)


def erfc(z: float) -> float:
    """Complementary error function, relative error below 1e-12.

    Delegates to the C library's rational/continued-fraction implementation
    rather than integrating the defining Gaussian tail, which would be both
    slower and less accurate inside nested BER integrands.
    """
    if not math.isfinite(z):
        raise ValueError(f"erfc argument must be finite, got {z!r}")
    return math.erfc(z)


def erfc_approx(z: float) -> float:
    """Two-branch elementary approximation of erfc(z).

    For z >= 0 returns ``(2/sqrt(pi)) * exp(-z^2) / (z + sqrt(z^2 + 4/pi))``,
    an upper bound that tightens as z grows. For z < 0 returns
    ``1 + (exp(-2 pi z / sqrt(6)) - 1) / (exp(-2 pi z / sqrt(6)) + 1)``,
    evaluated in the algebraically identical form ``1 + tanh(-pi z / sqrt(6))``
    so that large negative arguments saturate instead of overflowing the
    exponential. Both branches equal 1 at z = 0.
    """
    if not math.isfinite(z):
        raise ValueError(f"erfc_approx argument must be finite, got {z!r}")
    if z >= 0.0:
        return _TWO_OVER_SQRT_PI * math.exp(-z * z) / (z + math.sqrt(z * z + _FOUR_OVER_PI))
    return 1.0 + math.tanh(-_PI_OVER_SQRT6 * z)
