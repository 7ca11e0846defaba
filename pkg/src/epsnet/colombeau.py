"""Nets of smooth functions and their small-parameter asymptotics.

A net is an expression in ``eps`` and spatial variables, understood as a
family of smooth functions indexed by the scale parameter.  This module
measures derivative sup-norms of a net over compact boxes along a decreasing
grid of eps values, fits the decay exponent on a log-log scale, and issues
the desk-scale verdicts used throughout the package: moderate growth,
negligibility at a given order, boundedness, and compact-boundedness of
vector nets.

All verdicts are semi-decisions: they summarize finite grid evidence and the
raw data always travels with the verdict.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import expr as ex

DEFAULT_P_MAX = 8
DEFAULT_RC_BOUND = 1e6
#: Tolerance on fitted log-log slopes when testing "no growth trend";
#: O(1) oscillatory data legitimately fits to slightly negative slopes.
SLOPE_TOL = 0.1


@dataclass(frozen=True)
class EpsilonGrid:
    """Strictly decreasing sample of the scale parameter inside (0, 1)."""

    values: tuple

    def __post_init__(self):
        vals = self.values
        if not vals:
            raise ValueError("epsilon grid must be non-empty")
        if any(not (0.0 < v < 1.0) for v in vals):
            raise ValueError("epsilon grid values must lie in (0, 1)")
        if any(vals[i + 1] >= vals[i] for i in range(len(vals) - 1)):
            raise ValueError("epsilon grid must be strictly decreasing")

    @classmethod
    def dyadic(cls, k_min: int = 4, k_max: int = 40) -> "EpsilonGrid":
        if not 0 < k_min <= k_max:
            raise ValueError("need 0 < k_min <= k_max")
        return cls(tuple(2.0**-k for k in range(k_min, k_max + 1)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class CompactBox:
    """Axis-aligned compact box with a uniform sample lattice."""

    intervals: tuple
    samples_per_axis: int = 33

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("box endpoints must be finite")
            if a > b:
                raise ValueError(f"empty interval [{a}, {b}]")
        if self.samples_per_axis < 2:
            raise ValueError("need at least 2 samples per axis")

    @classmethod
    def cube(cls, lo: float, hi: float, dimension: int, samples_per_axis: int = 33) -> "CompactBox":
        return cls(tuple((lo, hi) for _ in range(dimension)), samples_per_axis)

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    def lattice(self) -> np.ndarray:
        """All sample points as an array of shape (samples^d, d), C-ordered."""
        if self.dimension == 0:
            return np.zeros((1, 0))
        axes = [np.linspace(a, b, self.samples_per_axis) for a, b in self.intervals]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def contains_box(self, other: "CompactBox", tol: float = 1e-12) -> bool:
        return self.dimension == other.dimension and all(
            a1 - tol <= a2 and b2 <= b1 + tol
            for (a1, b1), (a2, b2) in zip(self.intervals, other.intervals)
        )


@dataclass(frozen=True)
class Net:
    """A representative net: an expression in eps and x1..xd.

    ``dimension == 0`` means a generalized number, i.e. an expression in eps
    alone.
    """

    body: ex.Expr
    dimension: int

    def __post_init__(self):
        if not 0 <= self.dimension <= ex.MAX_SPATIAL_VARS:
            raise ValueError(f"dimension must be in 0..{ex.MAX_SPATIAL_VARS}")
        for name in ex.variables(self.body):
            if name == "eps":
                continue
            idx = ex.spatial_index(name)
            if idx == 0 or idx > self.dimension:
                raise ValueError(
                    f"body references {name} outside dimension {self.dimension}"
                )

    @classmethod
    def parse(cls, text: str, dimension: int) -> "Net":
        return cls(ex.parse(text, dimension), dimension)

    def value_at(self, eps: float) -> float:
        if self.dimension != 0:
            raise ValueError("value_at is only defined for scalar nets (d=0)")
        return ex.evaluate(self.body, eps, ())

    def __str__(self) -> str:
        return ex.to_text(self.body)


@dataclass(frozen=True)
class TabulatedNet:
    """A scalar net given by a finite table of (eps, value) pairs.

    Produced by per-eps matrix factorizations; only defined on its own grid.
    """

    table: tuple

    def __post_init__(self):
        tab = tuple((float(e), float(v)) for e, v in self.table)
        object.__setattr__(self, "table", tab)
        eps = [e for e, _ in tab]
        if any(eps[i + 1] >= eps[i] for i in range(len(eps) - 1)):
            raise ValueError("tabulated eps values must be strictly decreasing")

    def value_at(self, eps: float) -> float:
        for e, v in self.table:
            if e == eps:
                return v
        raise KeyError(f"eps={eps!r} is not a grid point of this tabulated net")

    def values(self) -> tuple:
        return tuple(v for _, v in self.table)


@dataclass(frozen=True)
class VectorNet:
    """A tuple of nets sharing one spatial dimension (a candidate map R^d -> R^d')."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise ValueError("vector net needs at least one component")
        dims = {c.dimension for c in self.components}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")

    @property
    def dimension(self) -> int:
        return self.components[0].dimension


@dataclass(frozen=True)
class AsymptoticReport:
    """Per-eps sup data with the fitted decay exponent and verdicts."""

    sups: tuple  # ((eps, sup), ...) in grid order
    fitted_exponent: float  # +inf sentinel when every sup is zero
    moderate: bool
    negligible_order: int
    bounded: bool
    per_alpha: tuple = field(default=(), compare=False)  # ((alpha, exponent), ...)

    def to_json_dict(self) -> dict:
        b = self.fitted_exponent
        return {
            "sups": [[e, s] for e, s in self.sups],
            "fitted_exponent": "inf" if math.isinf(b) else b,
            "moderate": self.moderate,
            "negligible_order": self.negligible_order,
            "bounded": self.bounded,
        }


def fit_decay_exponent(pairs: Sequence) -> float:
    """Least-squares slope of log(sup) against log(eps) over the finer half
    of the grid, ignoring zero and non-finite sups.  Returns +inf when the
    data is all zero (or too sparse to fit after underflow)."""
    pairs = list(pairs)
    usable = [(e, s) for e, s in pairs if s > 0.0 and math.isfinite(s)]
    if not usable:
        return math.inf
    finer = [(e, s) for e, s in pairs[len(pairs) // 2 :] if s > 0.0 and math.isfinite(s)]
    pts = finer if len(finer) >= 2 else usable
    if len(pts) < 2:
        return math.inf if any(s == 0.0 for _, s in pairs) else 0.0
    loge = np.log([e for e, _ in pts])
    logs = np.log([s for _, s in pts])
    slope = np.polyfit(loge, logs, 1)[0]
    return float(slope)


def report_from_sups(
    grid: EpsilonGrid,
    sups: Sequence[float],
    p_max: int = DEFAULT_P_MAX,
    bound: float = DEFAULT_RC_BOUND,
    slope_tol: float = SLOPE_TOL,
    per_alpha: tuple = (),
) -> AsymptoticReport:
    """Assemble an :class:`AsymptoticReport` from one sup value per grid eps."""
    sups = [float(s) for s in sups]
    if len(sups) != len(grid):
        raise ValueError("need exactly one sup per grid value")
    pairs = tuple(zip(grid.values, sups))
    exponent = fit_decay_exponent(pairs)
    moderate = all(math.isfinite(s) for s in sups)

    negligible_order = 0
    if moderate:
        quarter = pairs[len(pairs) - max(1, math.ceil(len(pairs) / 4)) :]
        for p in range(1, p_max + 1):
            if all(s <= e**p for e, s in quarter):
                negligible_order = p
            else:
                break

    bounded = (
        moderate
        and (math.isinf(exponent) or exponent >= -slope_tol)
        and max(sups) <= bound
    )
    return AsymptoticReport(pairs, exponent, moderate, negligible_order, bounded, per_alpha)


def _spatial_multi_indices(dimension: int, max_order: int):
    if dimension == 0:
        return [ex.MultiIndex(())]
    out = []
    for total in range(max_order + 1):
        for combo in itertools.product(range(total + 1), repeat=dimension):
            if sum(combo) == total:
                out.append(ex.MultiIndex(combo))
    return out


def _sup_on_lattice(body: ex.Expr, eps: float, lattice: np.ndarray) -> float:
    values = ex.eval_points(body, eps, lattice)
    return float(np.max(np.abs(values)))


def seminorm(
    f: Net,
    box: CompactBox,
    alpha,
    eps: float,
    max_order: int = ex.DEFAULT_MAX_MULTIINDEX_ORDER,
) -> float:
    """Max of |d^alpha f| over the sample lattice of the box at one eps.

    The lattice max is a lower bound for the true sup over the box; the
    default lattice density keeps the two within one percent for the kinds of
    functions exercised here.
    """
    if box.dimension != f.dimension:
        raise ValueError("box dimension does not match net dimension")
    orders = alpha.orders if isinstance(alpha, ex.MultiIndex) else tuple(alpha)
    if len(orders) != f.dimension:
        raise ValueError("multi-index length does not match net dimension")
    mi = ex.multi_index(orders, max_order=max_order)
    deriv = ex.partial_multi(f.body, mi)
    return _sup_on_lattice(deriv, eps, box.lattice())


def classify(
    f: Net,
    box: CompactBox,
    max_order: int = 2,
    grid: Optional[EpsilonGrid] = None,
    p_max: int = DEFAULT_P_MAX,
    bound: float = DEFAULT_RC_BOUND,
) -> AsymptoticReport:
    """Aggregate derivative sups over all multi-indices up to ``max_order``
    and report the asymptotic verdicts."""
    grid = grid or EpsilonGrid.dyadic()
    if box.dimension != f.dimension:
        raise ValueError("box dimension does not match net dimension")
    lattice = box.lattice()
    alphas = _spatial_multi_indices(f.dimension, max_order)
    aggregated = np.zeros(len(grid))
    per_alpha = []
    for alpha in alphas:
        deriv = ex.partial_multi(f.body, alpha)
        sups = []
        for i, eps in enumerate(grid):
            try:
                s = _sup_on_lattice(deriv, eps, lattice)
            except ex.EvalError as err:
                raise err.with_context(eps=eps, alpha=alpha.orders) from None
            sups.append(s)
            aggregated[i] = max(aggregated[i], s)
        per_alpha.append((alpha.orders, fit_decay_exponent(tuple(zip(grid.values, sups)))))
    return report_from_sups(
        grid, aggregated.tolist(), p_max=p_max, bound=bound, per_alpha=tuple(per_alpha)
    )


def is_bounded_generalized_number(
    theta,
    grid: Optional[EpsilonGrid] = None,
    bound: float = DEFAULT_RC_BOUND,
    slope_tol: float = SLOPE_TOL,
) -> bool:
    """True when a scalar net stays below ``bound`` on the grid and shows no
    growth trend as eps decreases."""
    grid = grid or EpsilonGrid.dyadic()
    if isinstance(theta, Net) and theta.dimension != 0:
        raise ValueError("theta must be a scalar net (dimension 0)")
    values = [abs(theta.value_at(eps)) for eps in grid]
    if any(not math.isfinite(v) for v in values):
        return False
    if max(values) > bound:
        return False
    exponent = fit_decay_exponent(tuple(zip(grid.values, values)))
    return math.isinf(exponent) or exponent >= -slope_tol


def image_bound_check(
    sample_images: Callable[[float], np.ndarray],
    grid: EpsilonGrid,
    slope_tol: float = SLOPE_TOL,
):
    """Shared engine behind c-boundedness checks.

    ``sample_images(eps)`` returns the image points (n, d') of some fixed
    sample set.  Verdict is False when any image is non-finite or when the
    radius of the image box grows (fitted log-log slope below -slope_tol) as
    eps decreases.  On True, also returns the smallest axis-aligned box
    containing every sampled image.
    """
    lo = None
    hi = None
    radii = []
    for eps in grid:
        Y = sample_images(eps)
        if not np.isfinite(Y).all():
            return False, None
        lo = Y.min(axis=0) if lo is None else np.minimum(lo, Y.min(axis=0))
        hi = Y.max(axis=0) if hi is None else np.maximum(hi, Y.max(axis=0))
        radii.append(float(np.max(np.abs(Y))) if Y.size else 0.0)
    exponent = fit_decay_exponent(tuple(zip(grid.values, radii)))
    if not (math.isinf(exponent) or exponent >= -slope_tol):
        return False, None
    box = CompactBox(tuple(zip(lo.tolist(), hi.tolist()))) if lo is not None else None
    return True, box


def is_c_bounded(
    f: VectorNet,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    slope_tol: float = SLOPE_TOL,
):
    """Check that the vector net maps the box into some fixed compact box for
    every grid eps.  Returns (verdict, witness box or None)."""
    grid = grid or EpsilonGrid.dyadic()
    if box.dimension != f.dimension:
        raise ValueError("box dimension does not match net dimension")
    lattice = box.lattice()

    def sample(eps: float) -> np.ndarray:
        cols = [ex.eval_points(c.body, eps, lattice) for c in f.components]
        return np.stack(cols, axis=1)

    return image_bound_check(sample, grid, slope_tol)
