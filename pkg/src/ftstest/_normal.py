"""Standard normal CDF and quantile via the complementary error function.

math.erfc is accurate to a few ulp, so norm_cdf carries absolute error well
below 1e-12 over the whole line. The quantile is solved by Newton iterations
safeguarded with bisection, converging to 1e-14 in the CDF residual.
"""

import math


def norm_cdf(x: float) -> float:
    """P(Z <= x) for Z ~ N(0, 1)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def norm_quantile(q: float) -> float:
    """Inverse of norm_cdf on (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    # Bracket: |u_q| < 40 covers any q representable in double precision.
    lo, hi = -40.0, 40.0
    x = 0.0
    for _ in range(200):
        err = norm_cdf(x) - q
        if abs(err) < 1e-14:
            break
        if err > 0:
            hi = x
        else:
            lo = x
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf > 0:
            step = err / pdf
            x_new = x - step
        else:
            x_new = 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            break
        x = x_new
    return x
