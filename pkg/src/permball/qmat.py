"""The doubly-stochastic Q matrices supported on the band, plus Sinkhorn.

Three constructions: the piecewise-constant first class (exact rationals),
and the two geometric second-class families driven by the algebraic roots
alpha_r and alpha_{r,n}.  ``sinkhorn_balance`` recovers the entropy-
maximizing balanced matrix numerically; for the high range (and the even-n
boundary of the low range) its fixed point coincides with the constructed
family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BallSpec, BandMatrix
from .errors import ConvergenceError, DimensionError, DomainError, ValidationError
from .scalar import alpha_high_root, alpha_low_root

STOCHASTIC_TOL = 1e-9
SINKHORN_MAX_ITER = 200_000


def _band_mask(spec: BallSpec) -> np.ndarray:
    idx = np.arange(1, spec.n + 1)
    return np.abs(idx[:, None] - idx[None, :]) <= spec.r


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Dense doubly-stochastic matrix whose support is a band.

    ``entries`` is the float view used by the bound evaluators.  The first
    class construction additionally carries an exact integer-numerator
    grid over a common denominator, so double stochasticity can be asserted
    with equality rather than a tolerance.  ``residual`` records the
    achieved max row/column-sum deviation of the float view.
    """

    n: int
    entries: np.ndarray
    support_spec: BallSpec | None = None
    exact_numerators: np.ndarray | None = None
    exact_denominator: int | None = None
    residual: float = 0.0

    @property
    def is_exact(self) -> bool:
        return self.exact_numerators is not None

    def entry(self, i: int, j: int) -> float:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise DimensionError(f"index ({i},{j}) outside 1..{self.n}")
        return float(self.entries[i - 1, j - 1])

    def entry_exact(self, i: int, j: int) -> Fraction:
        if not self.is_exact:
            raise ValidationError("matrix was not built in exact mode")
        return Fraction(
            int(self.exact_numerators[i - 1, j - 1]), self.exact_denominator
        )

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def max_sum_deviation(self) -> float:
        return float(
            max(
                np.abs(self.row_sums() - 1.0).max(),
                np.abs(self.col_sums() - 1.0).max(),
            )
        )

    def exactly_doubly_stochastic(self) -> bool:
        """Exact-rational check: every row/column numerator sum equals D."""
        if not self.is_exact:
            raise ValidationError("matrix was not built in exact mode")
        num = self.exact_numerators
        d = self.exact_denominator
        return bool((num.sum(axis=1) == d).all() and (num.sum(axis=0) == d).all())

    def is_symmetric(self, tol: float = 0.0) -> bool:
        if self.is_exact:
            return bool((self.exact_numerators == self.exact_numerators.T).all())
        return bool(np.abs(self.entries - self.entries.T).max() <= tol)

    def support_equals_band(self) -> bool:
        if self.support_spec is None:
            raise ValidationError("matrix carries no band support spec")
        mask = _band_mask(self.support_spec)
        return bool(((self.entries > 0) == mask).all())


def _finish(
    entries: np.ndarray,
    spec: BallSpec,
    *,
    numerators: np.ndarray | None = None,
    denominator: int | None = None,
    tol: float = STOCHASTIC_TOL,
) -> StochasticMatrix:
    residual = float(
        max(
            np.abs(entries.sum(axis=1) - 1.0).max(),
            np.abs(entries.sum(axis=0) - 1.0).max(),
        )
    )
    if residual > tol:
        raise ConvergenceError(
            f"constructed matrix misses double stochasticity: "
            f"residual {residual:g} > {tol:g}",
            residual=residual,
        )
    sm = StochasticMatrix(
        n=spec.n,
        entries=entries,
        support_spec=spec,
        exact_numerators=numerators,
        exact_denominator=denominator,
        residual=residual,
    )
    if not sm.support_equals_band():
        raise ValidationError("constructed matrix support differs from the band")
    return sm


def _first_class_numerators(spec: BallSpec, low_regime: bool) -> tuple[np.ndarray, int]:
    n, r = spec.n, spec.r
    idx = np.arange(1, n + 1)
    ij = idx[:, None] + idx[None, :]
    band = _band_mask(spec)
    if low_regime:
        denominator = 2 * r + 1
        corners = (ij <= r + 1) | (ij >= 2 * n - r + 1)
    else:
        denominator = n
        corners = (ij <= n - r) | (ij >= n + r + 2)
    num = band.astype(np.int64)
    num[corners] = 2
    return num, denominator


def q_first_class(spec: BallSpec) -> StochasticMatrix:
    """Piecewise-constant doubly-stochastic matrix on the band, in exact
    rationals.

    Entry values are 1/(2r+1) with 2/(2r+1) corner triangles when
    2r <= n-1, and 1/n with 2/n corner triangles when 2r >= n-1.  At
    2r = n-1 the two regimes coincide; both are built and asserted equal.
    """
    n, r = spec.n, spec.r
    if 2 * r == n - 1:
        num_low, d_low = _first_class_numerators(spec, True)
        num_high, d_high = _first_class_numerators(spec, False)
        if d_low != d_high or (num_low != num_high).any():
            raise ValidationError(
                f"regime-boundary mismatch for first-class matrix at n={n}, r={r}"
            )
        num, denominator = num_low, d_low
    else:
        num, denominator = _first_class_numerators(spec, 2 * r < n - 1)
    entries = num / float(denominator)
    sm = _finish(entries, spec, numerators=num, denominator=denominator)
    if not sm.exactly_doubly_stochastic():
        raise ValidationError(
            f"first-class matrix rational sums differ from 1 at n={n}, r={r}"
        )
    return sm


def q_second_low(spec: BallSpec) -> StochasticMatrix:
    """Geometric doubly-stochastic matrix for 1 <= r <= (n-2)/2.

    On the band, entries are C*alpha^e with C = (alpha-1)/(alpha+1) and an
    exponent that decays linearly away from the corners: e = |i-j| in the
    bulk, and (r+1-i)+(r+1-j) / mirrored in the two (r+1)x(r+1) corner
    blocks, where alpha solves alpha^(r+1) = alpha + 1.
    """
    n, r = spec.n, spec.r
    if not (1 <= r and 2 * r <= n - 2):
        raise DomainError(
            f"second-class low matrix requires 1 <= r <= (n-2)/2, got n={n}, r={r}"
        )
    alpha = alpha_low_root(r).value
    c = (alpha - 1.0) / (alpha + 1.0)
    idx = np.arange(1, n + 1)
    i = idx[:, None]
    j = idx[None, :]
    expo = np.abs(i - j)
    top = (i <= r + 1) & (j <= r + 1)
    bot = (i >= n - r) & (j >= n - r)
    expo = np.where(top, (r + 1 - i) + (r + 1 - j), expo)
    expo = np.where(bot, (i - (n - r)) + (j - (n - r)), expo)
    entries = np.where(_band_mask(spec), c * np.power(alpha, expo), 0.0)
    return _finish(entries, spec)


def q_second_high(spec: BallSpec) -> StochasticMatrix:
    """Geometric doubly-stochastic matrix for (n-1)/2 < r < n-1.

    Entries are C * alpha^(v_i + v_j) on the band with v_i = (n-r) - i for
    i <= n-r, v_i = i - (r+1) for i >= r+1, and 0 on the overlap, where
    alpha solves alpha^(n-r) + (2r-n)*alpha = 2r-n+2 and
    C = (alpha-1)*alpha^-(n-r).  This is the Sinkhorn fixed point of the
    band matrix.
    """
    n, r = spec.n, spec.r
    if not (2 * r > n - 1 and r < n - 1):
        raise DomainError(
            f"second-class high matrix requires (n-1)/2 < r < n-1, got n={n}, r={r}"
        )
    alpha = alpha_high_root(n, r).value
    c = (alpha - 1.0) * alpha ** (-(n - r))
    idx = np.arange(1, n + 1)
    v = np.zeros(n)
    left = idx <= n - r
    right = idx >= r + 1
    v[left] = (n - r) - idx[left]
    v[right] = idx[right] - (r + 1)
    expo = v[:, None] + v[None, :]
    entries = np.where(_band_mask(spec), c * np.power(alpha, expo), 0.0)
    return _finish(entries, spec)


@dataclass(frozen=True)
class ScalingVectors:
    """Diagonal scales accumulated by Sinkhorn balancing."""

    row_scale: np.ndarray
    col_scale: np.ndarray
    iterations: int
    residual: float

    def __post_init__(self):
        if (self.row_scale <= 0).any() or (self.col_scale <= 0).any():
            raise ValidationError("scaling vectors must be strictly positive")


def sinkhorn_balance(
    m: np.ndarray | BandMatrix,
    tol: float = STOCHASTIC_TOL,
    max_iter: int = SINKHORN_MAX_ITER,
    *,
    order: str = "rows-first",
    support_spec: BallSpec | None = None,
) -> tuple[StochasticMatrix, ScalingVectors]:
    """Alternately normalize rows and columns until both sum to 1 +- tol.

    Returns the balanced matrix together with the accumulated diagonal
    scales.  Requires a matrix with total support (every row and column
    must carry positive mass); the band matrices qualify.  Raises
    ConvergenceError carrying the residual if max_iter is exhausted.
    """
    if isinstance(m, BandMatrix):
        support_spec = support_spec or m.spec
        m = m.toarray()
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("sinkhorn_balance requires a square matrix")
    if (a < 0).any():
        raise DomainError("sinkhorn_balance requires non-negative entries")
    if (a.sum(axis=1) == 0).any() or (a.sum(axis=0) == 0).any():
        raise DomainError("matrix has an empty row or column (no total support)")
    if order not in ("rows-first", "cols-first"):
        raise ValidationError(f"unknown iteration order {order!r}")
    n = a.shape[0]
    row = np.ones(n)
    col = np.ones(n)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if order == "rows-first":
            row = 1.0 / (a @ col)
            col = 1.0 / (a.T @ row)
        else:
            col = 1.0 / (a.T @ row)
            row = 1.0 / (a @ col)
        balanced = row[:, None] * a * col[None, :]
        residual = float(
            max(
                np.abs(balanced.sum(axis=1) - 1.0).max(),
                np.abs(balanced.sum(axis=0) - 1.0).max(),
            )
        )
        if residual <= tol:
            break
    else:
        raise ConvergenceError(
            f"sinkhorn_balance did not reach tol={tol:g} in {max_iter} iterations "
            f"(residual {residual:g})",
            residual=residual,
        )
    balanced = row[:, None] * a * col[None, :]
    sm = StochasticMatrix(
        n=n, entries=balanced, support_spec=support_spec, residual=residual
    )
    if support_spec is not None and not sm.support_equals_band():
        raise ValidationError("balanced matrix support differs from the band")
    return sm, ScalingVectors(row, col, iterations, residual)
