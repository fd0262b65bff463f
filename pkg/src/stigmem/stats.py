"""Two-sample statistics used by the experiment tables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import betainc


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float


def mean_std(xs: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (``ddof=1``; 0 for a single value)."""
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    m = math.fsum(xs) / n
    if n == 1:
        return m, 0.0
    return m, math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (n - 1))


def welch_t(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    """Welch's unequal-variance t-test, two-tailed.

    Degrees of freedom follow Welch-Satterthwaite. The tail probability uses
    the regularized incomplete beta identity
    ``P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)``.

    Raises:
        ValueError: if either sample has fewer than two values or both have
            zero variance.
    """
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two values")
    ma, sa = mean_std(a)
    mb, sb = mean_std(b)
    va, vb = sa * sa / len(a), sb * sb / len(b)
    se2 = va + vb
    if se2 == 0:
        raise ValueError("both samples have zero variance")
    t = (ma - mb) / math.sqrt(se2)
    df = se2 * se2 / (va * va / (len(a) - 1) + vb * vb / (len(b) - 1))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return WelchResult(t=t, df=df, p=min(1.0, p))
