"""Power-law exponent estimation for degree sequences."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitReport:
    gamma: float
    xmin: int
    sample_count: int

    def to_json(self) -> dict:
        d = asdict(self)
        return {"gamma": d["gamma"], "xmin": d["xmin"], "n": d["sample_count"]}


def fit_gamma_mle(degrees: Iterable[int], xmin: int = 1) -> FitReport:
    """Maximum-likelihood power-law exponent over the degrees >= ``xmin``.

    gamma = 1 + n / sum(ln(x_i / xmin)). The continuous estimator is applied to
    integer degrees as-is; zero degrees never enter the fit.
    """
    if xmin < 1:
        raise FitError(f"xmin must be a positive integer, got {xmin}")
    tail = [int(x) for x in degrees if x >= xmin and x > 0]
    if len(tail) < 2:
        raise FitError(f"need at least 2 degrees >= xmin={xmin}, got {len(tail)}")
    log_sum = math.fsum(math.log(x / xmin) for x in tail)
    if log_sum <= 0:
        raise FitError(f"every retained degree equals xmin={xmin}; the exponent is undefined")
    return FitReport(1.0 + len(tail) / log_sum, xmin, len(tail))


def model_pmf(gamma: float, degrees: Iterable[int]) -> dict[int, float]:
    """Unnormalised power-law curve k**-gamma at each requested degree."""
    if gamma <= 1:
        raise FitError(f"gamma must exceed 1, got {gamma}")
    out = {}
    for k in degrees:
        if k < 1:
            raise FitError(f"degree {k} < 1 has no power-law value")
        out[int(k)] = float(k) ** -gamma
    return out
