"""Self-contained special-function kernel.

Scalar double-precision routines: log-gamma (Lanczos), the multivariate
gamma function, the regularized incomplete gamma pair (series below the
x = a+1 split, modified-Lentz continued fraction above), chi-square CDF and
survival, the standard normal CDF, and the two-sided Gaussian tail sandwich

    1/(x + sqrt(x^2+4))  <=  sqrt(pi/2) e^{x^2/2} (1 - F(x))  <=  1/(x + sqrt(x^2+8/pi)).

Log-scale variants are exposed because the covariance bound evaluators take
products of up to p of these factors, many of which underflow individually.
All functions are pure; none touch shared state.
"""

import math
from dataclasses import dataclass

from covspectra.errors import NumericalError

_EPS = 1e-15
_MAX_ITER = 500


def _gamma_iter_cap(a: float) -> int:
    # near x ~ a both expansions need O(sqrt(a)) terms; 500 is only enough
    # up to a ~ 10^3
    return max(_MAX_ITER, int(12.0 * math.sqrt(a)) + 200)
_HALF_LN_2PI = 0.9189385332046727  # ln(2*pi)/2

# Lanczos approximation, g = 7, 9 coefficients (Godfrey's set).
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("ln_gamma requires x > 0")
    if x < 0.5:
        # reflection keeps the Lanczos series in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - ln_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS_COEF[0]
    for i in range(1, 9):
        series += _LANCZOS_COEF[i] / (z + i)
    t = z + 7.5
    return _HALF_LN_2PI + (z + 0.5) * math.log(t) - t + math.log(series)


def multivariate_ln_gamma(p: int, a: float) -> float:
    """log of the generalized gamma function Gamma_p(a).

    Gamma_p(a) = pi^{p(p-1)/4} * prod_{i=1..p} Gamma(a - (i-1)/2); requires
    a > (p-1)/2 so every factor is defined.
    """
    if p < 1:
        raise ValueError("p must be a positive integer")
    if a <= (p - 1) / 2.0:
        raise ValueError("multivariate_ln_gamma requires a > (p-1)/2")
    total = 0.25 * p * (p - 1) * math.log(math.pi)
    for i in range(p):
        total += ln_gamma(a - 0.5 * i)
    return total


def _lower_series_log(a: float, x: float) -> float:
    """log P(a,x) by the power series; valid for 0 < x < a+1."""
    total = 1.0
    term = 1.0
    ap = a
    for _ in range(_gamma_iter_cap(a)):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return a * math.log(x) - x - ln_gamma(a + 1.0) + math.log(total)
    raise NumericalError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _upper_cf_log(a: float, x: float) -> float:
    """log Q(a,x) by the modified-Lentz continued fraction; valid for x >= a+1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _gamma_iter_cap(a) + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return a * math.log(x) - x - ln_gamma(a) + math.log(h)
    raise NumericalError(f"incomplete gamma continued fraction failed to converge (a={a}, x={x})")


def _check_gamma_args(a: float, x: float) -> None:
    if a <= 0.0:
        raise ValueError("incomplete gamma requires a > 0")
    if x < 0.0:
        raise ValueError("incomplete gamma requires x >= 0")


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return math.exp(_lower_series_log(a, x))
    return -math.expm1(_upper_cf_log(a, x))


def reg_upper_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x), small-Q safe."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 1.0
    if x >= a + 1.0:
        return math.exp(_upper_cf_log(a, x))
    return -math.expm1(_lower_series_log(a, x))


def log_reg_lower_gamma(a: float, x: float) -> float:
    """log P(a,x) without underflow for tiny P."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return -math.inf
    if x < a + 1.0:
        return _lower_series_log(a, x)
    return math.log1p(-math.exp(_upper_cf_log(a, x)))


def log_reg_upper_gamma(a: float, x: float) -> float:
    """log Q(a,x) without underflow for tiny Q."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 0.0
    if x >= a + 1.0:
        return _upper_cf_log(a, x)
    return math.log1p(-math.exp(_lower_series_log(a, x)))


def _check_dof(n: int) -> None:
    if isinstance(n, bool) or n != int(n) or n < 1:
        raise ValueError("degrees of freedom must be a positive integer")


def chi2_cdf(n: int, x: float) -> float:
    """P(chi^2_n <= x)."""
    _check_dof(n)
    if x < 0.0:
        raise ValueError("chi2_cdf requires x >= 0")
    return reg_lower_gamma(0.5 * n, 0.5 * x)


def chi2_sf(n: int, x: float) -> float:
    """P(chi^2_n >= x), evaluated through the complementary path."""
    _check_dof(n)
    if x < 0.0:
        raise ValueError("chi2_sf requires x >= 0")
    return reg_upper_gamma(0.5 * n, 0.5 * x)


def chi2_logcdf(n: int, x: float) -> float:
    _check_dof(n)
    if x < 0.0:
        raise ValueError("chi2_logcdf requires x >= 0")
    return log_reg_lower_gamma(0.5 * n, 0.5 * x)


def chi2_logsf(n: int, x: float) -> float:
    _check_dof(n)
    if x < 0.0:
        raise ValueError("chi2_logsf requires x >= 0")
    return log_reg_upper_gamma(0.5 * n, 0.5 * x)


def normal_cdf(x: float) -> float:
    """Standard normal CDF, built on reg_lower_gamma(1/2, x^2/2).

    Shares the incomplete-gamma kernel with the chi-square functions, so the
    normal and chi-square paths are internally consistent.
    """
    if x == 0.0:
        return 0.5
    p = reg_lower_gamma(0.5, 0.5 * x * x)
    return 0.5 * (1.0 + p) if x > 0.0 else 0.5 * (1.0 - p)


def normal_sf_log(x: float) -> float:
    """log(1 - F(x)) for x >= 0, exact deep into the tail."""
    if x < 0.0:
        raise ValueError("normal_sf_log requires x >= 0")
    return math.log(0.5) + log_reg_upper_gamma(0.5, 0.5 * x * x) if x > 0.0 else math.log(0.5)


@dataclass(frozen=True)
class TailBoundTriple:
    """Lower bound, exact value, upper bound of sqrt(pi/2) e^{x^2/2} (1-F(x))."""

    lower: float
    mid: float
    upper: float


def gaussian_tail_bounds(x: float) -> TailBoundTriple:
    """Two-sided algebraic sandwich of the scaled Gaussian tail.

    The mid term is evaluated as sqrt(pi/2) * exp(x^2/2 + log(1-F(x))) with
    the log-survival computed directly, so it neither overflows e^{x^2/2}
    nor loses the tail for large x.
    """
    if x < 0.0:
        raise ValueError("gaussian_tail_bounds requires x >= 0")
    lower = 1.0 / (x + math.sqrt(x * x + 4.0))
    mid = math.sqrt(0.5 * math.pi) * math.exp(0.5 * x * x + normal_sf_log(x))
    upper = 1.0 / (x + math.sqrt(x * x + 8.0 / math.pi))
    return TailBoundTriple(lower, mid, upper)
