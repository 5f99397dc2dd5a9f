"""Coding-rate consequences: ball-packing and covering-code upper bounds.

Rates are in bits per symbol with no standalone log2(n) term: the finite
quotients cancel it against the log of the factorial, and the asymptotic
forms are already stated that way.  "old" variants reproduce the bounds
known before the improved ball-size estimates; "new" variants use them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bounds import best_finite_lower_bound
from .core import BallSpec, radius_from_rho
from .errors import CapacityError, DomainError, ValidationError
from .oracle import ball_size_exact
from .scalar import LOG2E, LN2, log2_factorial, t_hat

KINDS = ("ecc_old", "ecc_new", "cover_old", "cover_new")

# 99-point default grids; the ECC grid ends at delta = 1 where the new
# bound improves the most, the covering grid straddles rho = 1/2.
DEFAULT_ECC_GRID = tuple(k / 100 for k in range(2, 101))
DEFAULT_COVER_GRID = tuple(k / 100 for k in range(1, 100))


@dataclass(frozen=True)
class RatePoint:
    kind: str
    x: float
    rate_bits: float
    mode: str
    n: int | None = None


def xi_crossover() -> float:
    return (2.0 - LOG2E - math.log2(LOG2E)) / (3.0 - 2.0 * LOG2E)


def _ecc_asymptotic(delta: float, variant: str) -> float:
    if variant == "old":
        return delta + math.log2(1.0 / delta)
    half = delta / 2.0
    if half <= xi_crossover():
        return half + math.log2(1.0 / delta)
    return (
        (LOG2E - 1.0) * (delta - 1.0)
        + math.log2(1.0 / delta)
        + 1.0
        - math.log2(LOG2E)
    )


def _cover_asymptotic(rho: float, variant: str) -> float:
    if variant == "old":
        if rho <= 0.5:
            return 2.0 * rho + math.log2(1.0 / rho)
        return 2.0 * (1.0 - rho)
    if rho <= xi_crossover():
        return rho - 1.0 + math.log2(1.0 / rho)
    if rho <= 0.5:
        return (
            (2.0 * rho - 1.0) * (LOG2E - 1.0)
            + math.log2(1.0 / rho)
            - math.log2(LOG2E)
        )
    t = t_hat(rho)
    return (
        math.log2(t)
        - math.log2(LOG2E)
        - (2.0 * rho - 1.0) * t
        - math.log2(1.0 - rho)
    )


def _log2_ball_or_lower(spec: BallSpec) -> float:
    try:
        return math.log2(ball_size_exact(spec))
    except CapacityError:
        return best_finite_lower_bound(spec)


def ecc_rate_upper(
    delta: float, variant: str = "new", mode: str = "asymptotic", n: int | None = None
) -> RatePoint:
    """Upper bound on the rate of a code with normalized distance delta.

    Finite mode evaluates (1/n)*(log2(n!) - log2 |B_{floor((d-1)/2), n}|)
    with d = delta*(n-1), taking the exact ball size when a backend can
    reach it and the best lower bound otherwise (which only weakens the
    packing bound).
    """
    _check_variant(variant)
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"ecc bound requires delta in (0, 1], got {delta}")
    kind = f"ecc_{variant}"
    if mode == "asymptotic":
        return RatePoint(kind, delta, _ecc_asymptotic(delta, variant), mode)
    if mode != "finite":
        raise ValidationError(f"unknown mode {mode!r}")
    if n is None or n < 2:
        raise ValidationError("finite mode requires n >= 2")
    arg = delta * (n - 1) - 1.0
    if arg < 0:
        raise DomainError(
            f"delta={delta} gives a negative packing radius argument at n={n}"
        )
    spec = BallSpec(n, int(math.floor(arg / 2.0)))
    rate = (log2_factorial(n) - _log2_ball_or_lower(spec)) / n
    return RatePoint(kind, delta, rate, mode, n)


def covering_rate_upper(
    rho: float, variant: str = "new", mode: str = "asymptotic", n: int | None = None
) -> RatePoint:
    """Upper bound on the rate of an optimal covering code of radius rho.

    Finite mode requires rho*(n-1) integral and evaluates
    (1/n)*(log2(n!*(1+ln(n!))) - log2 |B_{rho,n}|).
    """
    _check_variant(variant)
    if not 0.0 < rho < 1.0:
        raise DomainError(f"covering bound requires rho in (0, 1), got {rho}")
    kind = f"cover_{variant}"
    if mode == "asymptotic":
        return RatePoint(kind, rho, _cover_asymptotic(rho, variant), mode)
    if mode != "finite":
        raise ValidationError(f"unknown mode {mode!r}")
    if n is None or n < 2:
        raise ValidationError("finite mode requires n >= 2")
    from fractions import Fraction

    spec = radius_from_rho(Fraction(rho).limit_denominator(10**6), n)
    ln_nf = log2_factorial(n) * LN2
    rate = (
        log2_factorial(n) + math.log2(1.0 + ln_nf) - _log2_ball_or_lower(spec)
    ) / n
    return RatePoint(kind, rho, rate, mode, n)


def _check_variant(variant: str) -> None:
    if variant not in ("old", "new"):
        raise ValidationError(f"variant must be 'old' or 'new', got {variant!r}")


def rate_table(
    kinds: Sequence[str] = KINDS,
    grid: Iterable[float] | None = None,
    mode: str = "asymptotic",
    n: int | None = None,
) -> list[RatePoint]:
    """Rate points for the requested kinds over a grid, sorted by (kind, x)."""
    points: list[RatePoint] = []
    for kind in kinds:
        if kind not in KINDS:
            raise ValidationError(f"unknown rate kind {kind!r}")
        family, variant = kind.split("_")
        xs = grid
        if xs is None:
            xs = DEFAULT_ECC_GRID if family == "ecc" else DEFAULT_COVER_GRID
        for x in xs:
            if family == "ecc":
                points.append(ecc_rate_upper(x, variant, mode, n))
            else:
                points.append(covering_rate_upper(x, variant, mode, n))
    points.sort(key=lambda p: (p.kind, p.x))
    return points
