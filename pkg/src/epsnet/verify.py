"""Theorem harnesses: grid evidence for invariance under one-parameter flows
and matrix groups, periodicity, almost-period chaining, and the two ways a net
can be forced constant (two incommensurable periods, or translation
invariance).

Every harness returns a report carrying the raw per-eps data next to its
verdict; verdicts are negligibility statements at a requested order and are
semi-decisions over the finite grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from mpmath import mp

from . import expr as ex
from .colombeau import (
    DEFAULT_P_MAX,
    AsymptoticReport,
    CompactBox,
    EpsilonGrid,
    Net,
    fit_decay_exponent,
    image_bound_check,
    is_bounded_generalized_number,
    report_from_sups,
)
from .groups import GroupElement, TabulatedAngleError, compose_net
from .decompose import (
    LorentzFactorization,
    RotationSchedule,
    decompose_net_matrix,
    givens_decompose,
    lorentz_decompose,
)
from .numbertheory import AlgebraicNumber, corollary_pair, liouville_constant

#: Real parameter values used to sample a universally quantified hypothesis.
DEFAULT_REAL_THETAS = (0.1, -0.1, 1.0, -1.0, math.pi, -math.pi, 3.0, -3.0)

#: Deviations below this many ulps of the function's own magnitude, or below
#: the absolute floor, are floating-point evaluation noise, not evidence
#: against invariance; they are snapped to zero before the negligibility test
#: (raw sups stay reported).  The absolute floor covers cancellation through
#: boosted coordinates (cosh 3 ~ 10) in low-degree forms.
NOISE_ULPS = 64.0
NOISE_ATOL = 1e-12
_MACHINE_EPS = float(np.finfo(float).eps)


class CBoundednessError(RuntimeError):
    """The transformation does not map the box into a fixed compact set."""


@dataclass(frozen=True)
class InvarianceReport:
    """Per-eps sup of |f(g(x)) - f(x)| over the box, with verdict at order p."""

    order: int
    sups: tuple  # ((eps, sup), ...)
    asymptotic: AsymptoticReport
    invariant: bool
    element: dict = field(default_factory=dict, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "invariant": self.invariant,
            "element": self.element,
            "asymptotic": self.asymptotic.to_json_dict(),
        }


def _check_c_bounded(g: GroupElement, box: CompactBox, grid: EpsilonGrid, strict: bool):
    lattice = box.lattice()
    ok, _ = image_bound_check(lambda eps: g.apply_points(lattice, eps), grid)
    if not ok:
        message = "transformation is not c-bounded on the box"
        if strict:
            raise CBoundednessError(message)
        warnings.warn(message, RuntimeWarning, stacklevel=3)


def _noise_floor(scale: float) -> float:
    return max(NOISE_ATOL, NOISE_ULPS * _MACHINE_EPS * max(1.0, scale))


def _deviation_sups(f: Net, g: GroupElement, box: CompactBox, grid: EpsilonGrid, max_order: int):
    """Sup over the lattice of |f o g - f| per eps (and derivative sups when
    max_order > 0, symbolic path only), plus the per-eps measurability floor."""
    lattice = box.lattice()
    floors = [
        _noise_floor(float(np.max(np.abs(ex.eval_points(f.body, eps, lattice)))))
        for eps in grid
    ]
    try:
        composed = compose_net(f, g)
        diff = Net(ex.c_sub(composed.body, f.body), f.dimension)
    except TabulatedAngleError:
        diff = None
    if diff is not None:
        sups = np.zeros(len(grid))
        for alpha in _alphas(f.dimension, max_order):
            deriv = ex.partial_multi(diff.body, alpha)
            for i, eps in enumerate(grid):
                vals = ex.eval_points(deriv, eps, lattice)
                sups[i] = max(sups[i], float(np.max(np.abs(vals))))
        sups = sups.tolist()
    else:
        sups = []
        for eps in grid:
            base = ex.eval_points(f.body, eps, lattice)
            moved = ex.eval_points(f.body, eps, g.apply_points(lattice, eps))
            sups.append(float(np.max(np.abs(moved - base))))
    snapped = [0.0 if s <= fl else s for s, fl in zip(sups, floors)]
    return snapped, floors


def _alphas(dimension: int, max_order: int):
    from .colombeau import _spatial_multi_indices

    return _spatial_multi_indices(dimension, max_order)


def check_invariance(
    f: Net,
    g: GroupElement,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
    max_order: int = 0,
    strict: bool = True,
    p_max: Optional[int] = None,
) -> InvarianceReport:
    """Measure sup |f(g(x)) - f(x)| over the box per eps and test whether the
    deviation is negligible at order ``p``."""
    grid = grid or EpsilonGrid.dyadic()
    if g.dimension != f.dimension:
        raise ValueError("element dimension does not match net dimension")
    _check_c_bounded(g, box, grid, strict)
    sups, floors = _deviation_sups(f, g, box, grid, max_order)
    report = report_from_sups(grid, sups, p_max=max(p_max or DEFAULT_P_MAX, p))
    # beyond the finest-quarter rule, require sup <= eps^p wherever the
    # deviation is large enough to be measurable at all
    whole_grid_ok = all(
        s <= max(eps**p, fl) for (eps, s, fl) in zip(grid.values, sups, floors)
    )
    return InvarianceReport(
        order=p,
        sups=tuple(zip(grid.values, sups)),
        asymptotic=report,
        invariant=report.negligible_order >= p and whole_grid_ok,
        element=g.to_json_dict(),
    )


@dataclass(frozen=True)
class OneParamReport:
    """Hypothesis block (real parameters) and conclusion block (generalized
    parameters) for one flow."""

    order: int
    hypothesis: tuple  # ((theta, InvarianceReport), ...)
    conclusion: tuple  # ((label, InvarianceReport), ...)
    hypothesis_failed: bool
    verdict: bool

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "hypothesis_failed": self.hypothesis_failed,
            "verdict": self.verdict,
            "hypothesis": [
                {"theta": th, **r.to_json_dict()} for th, r in self.hypothesis
            ],
            "conclusion": [
                {"theta": label, **r.to_json_dict()} for label, r in self.conclusion
            ],
        }


def one_param_theorem_harness(
    f: Net,
    flow: Callable[[object], GroupElement],
    real_thetas: Sequence[float] = DEFAULT_REAL_THETAS,
    gen_thetas: Sequence = (),
    box: Optional[CompactBox] = None,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
    strict: bool = True,
) -> OneParamReport:
    """Sample the real-parameter hypothesis of the lifting theorem, then test
    the generalized-parameter conclusion.  If any real-parameter check fails
    the conclusion block is informational only."""
    grid = grid or EpsilonGrid.dyadic()
    box = box or CompactBox.cube(-1.0, 1.0, f.dimension)
    hypothesis = []
    for theta in real_thetas:
        rep = check_invariance(f, flow(float(theta)), box, grid, p, strict=strict)
        hypothesis.append((float(theta), rep))
    hypothesis_failed = not all(r.invariant for _, r in hypothesis)
    conclusion = []
    for theta in gen_thetas:
        if not is_bounded_generalized_number(theta, grid):
            raise ValueError(f"generalized parameter {theta} is not bounded on the grid")
        label = str(theta)
        rep = check_invariance(f, flow(theta), box, grid, p, strict=strict)
        conclusion.append((label, rep))
    verdict = (not hypothesis_failed) and all(r.invariant for _, r in conclusion)
    return OneParamReport(p, tuple(hypothesis), tuple(conclusion), hypothesis_failed, verdict)


@dataclass(frozen=True)
class PipelineReport:
    """Factor-by-factor and full-composition invariance for a factored element."""

    order: int
    factor_reports: tuple
    full_report: InvarianceReport
    verdict: bool
    consistent: bool

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "verdict": self.verdict,
            "consistent": self.consistent,
            "factors": [r.to_json_dict() for r in self.factor_reports],
            "full": self.full_report.to_json_dict(),
        }


def _pipeline(f, factors, full_element, box, grid, p, strict) -> PipelineReport:
    factor_reports = tuple(
        check_invariance(f, GroupElement.from_factors(f.dimension, (factor,)), box, grid, p, strict=strict)
        for factor in factors
    )
    full_report = check_invariance(f, full_element, box, grid, p, strict=strict)
    per_factor = all(r.invariant for r in factor_reports)
    consistent = per_factor == full_report.invariant
    verdict = full_report.invariant and per_factor
    return PipelineReport(p, factor_reports, full_report, verdict, consistent)


def rotation_invariance_pipeline(
    f: Net,
    M,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
    strict: bool = True,
) -> PipelineReport:
    """Factor a special orthogonal element into planar rotations and check
    invariance factor-by-factor and for the full composition."""
    grid = grid or EpsilonGrid.dyadic()
    if isinstance(M, RotationSchedule):
        schedule = M
    elif isinstance(M, np.ndarray) or (
        isinstance(M, (list, tuple)) and all(isinstance(v, (int, float)) for row in M for v in row)
    ):
        schedule = givens_decompose(np.asarray(M, dtype=float))
    else:
        schedule = decompose_net_matrix(M, grid, "rotation")
    return _pipeline(f, schedule.factors, schedule.as_group_element(), box, grid, p, strict)


def lorentz_invariance_pipeline(
    f: Net,
    L,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
    strict: bool = True,
) -> PipelineReport:
    """As the rotation pipeline, via the rotation-boost-rotation factorization."""
    grid = grid or EpsilonGrid.dyadic()
    if isinstance(L, LorentzFactorization):
        fact = L
    elif isinstance(L, np.ndarray) or (
        isinstance(L, (list, tuple)) and all(isinstance(v, (int, float)) for row in L for v in row)
    ):
        fact = lorentz_decompose(np.asarray(L, dtype=float))
    else:
        fact = decompose_net_matrix(L, grid, "lorentz")
    return _pipeline(f, fact.all_factors(), fact.as_group_element(), box, grid, p, strict)


def check_periodicity(
    f: Net,
    h: float,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
) -> InvarianceReport:
    """Invariance under the translation x -> x + h (one-dimensional nets)."""
    if f.dimension != 1:
        raise ValueError("periodicity checks are one-dimensional")
    if not h > 0:
        raise ValueError("period must be positive")
    return check_invariance(f, GroupElement.translation(1, (h,)), box, grid, p)


# ---------------------------------------------------------------------------
# Almost-period chaining


@dataclass(frozen=True)
class ChainPairResult:
    k: int
    l: int
    certified: float
    measured: Optional[float]
    tested_points: int
    excluded_points: int
    hypothesis_violated: bool
    path: tuple  # audit steps from one representative start point
    path_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "certified": self.certified,
            "measured": self.measured,
            "tested_points": self.tested_points,
            "excluded_points": self.excluded_points,
            "hypothesis_violated": self.hypothesis_violated,
            "path_ok": self.path_ok,
            "path": list(self.path),
        }


@dataclass(frozen=True)
class ChainBoundReport:
    interval: tuple
    h1: float
    h2: float
    tolerance: float
    pairs: tuple  # ChainPairResult tuple
    all_certified: bool

    def to_json_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "h1": self.h1,
            "h2": self.h2,
            "tolerance": self.tolerance,
            "all_certified": self.all_certified,
            "pairs": [p.to_json_dict() for p in self.pairs],
        }


def _chain_path(x: float, k: int, l: int, h1: float, h2: float, a: float, b: float, tol: float):
    """Greedy step path from x to x + k*h1 - l*h2: raise the h1 count while
    staying below b, then lower by h2 while staying above a, repeating."""
    i = j = 0
    pts = [x]
    ok = True
    while i < k or j < l:
        progressed = False
        while i < k and (x + (i + 1) * h1 - j * h2 <= b + tol or j == l):
            i += 1
            pts.append(x + i * h1 - j * h2)
            progressed = True
        while j < l and (x + i * h1 - (j + 1) * h2 >= a - tol or i == k):
            j += 1
            pts.append(x + i * h1 - j * h2)
            progressed = True
        if not progressed:
            ok = False
            break
    if any(pt < a - tol or pt > b + tol for pt in pts):
        ok = False
    return tuple(pts), ok


def chain_bound(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    h1: float,
    h2: float,
    measured_eps: float,
    pairs: Sequence,
    num_x: int = 101,
) -> ChainBoundReport:
    """Certify |f(x + k*h1 - l*h2) - f(x)| <= (k + l) * measured_eps for each
    requested pair, over start points x in [a + h1 + h2, b - h1 - h2] whose
    endpoint stays inside [a, b]."""
    if not (h1 > 0 and h2 > 0):
        raise ValueError("periods must be positive")
    lo, hi = a + h1 + h2, b - h1 - h2
    if lo > hi:
        raise ValueError("interval is too short for the periods")
    xs = np.linspace(lo, hi, num_x)
    geom_tol = 1e-12 * (1.0 + abs(a) + abs(b))
    results = []
    for k, l in pairs:
        k, l = int(k), int(l)
        endpoints = xs + k * h1 - l * h2
        valid = (endpoints >= a - geom_tol) & (endpoints <= b + geom_tol)
        excluded = int(np.count_nonzero(~valid))
        certified = (k + l) * measured_eps
        if valid.any():
            fx = np.asarray(f(xs[valid]), dtype=float)
            fz = np.asarray(f(endpoints[valid]), dtype=float)
            measured = float(np.max(np.abs(fz - fx)))
            first = float(xs[valid][0])
            path, path_ok = _chain_path(first, k, l, h1, h2, a, b, geom_tol)
        else:
            measured = None
            path, path_ok = (), False
        results.append(
            ChainPairResult(
                k,
                l,
                certified,
                measured,
                int(np.count_nonzero(valid)),
                excluded,
                hypothesis_violated=excluded > 0 or not path_ok,
                path=path,
                path_ok=path_ok,
            )
        )
    all_certified = all(
        r.measured is None or r.measured <= r.certified + 1e-15 for r in results
    )
    return ChainBoundReport((a, b), h1, h2, measured_eps, tuple(results), all_certified)


# ---------------------------------------------------------------------------
# Two periods force constancy


@dataclass(frozen=True)
class ConstancyEvidence:
    eps: float
    k: int
    l: int
    h_log2: float
    measured: float
    certified: float
    certified_ok: bool
    bounds_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "eps": self.eps,
            "k": self.k,
            "l": self.l,
            "h_log2": self.h_log2,
            "measured": self.measured,
            "certified": self.certified,
            "certified_ok": self.certified_ok,
            "bounds_ok": self.bounds_ok,
        }


@dataclass(frozen=True)
class ConstancyReport:
    radius: float
    order: int
    verdict: str  # "constant" | "not-certified" | "not-applicable"
    eps0: Optional[float]
    failing_period: Optional[float]
    c_structural: float
    c_empirical: Optional[float]
    derivative_exponent: int
    evidence: tuple  # ConstancyEvidence rows for the requested order
    per_order: tuple  # ((p', eps0, certified), ...)

    def to_json_dict(self) -> dict:
        return {
            "radius": self.radius,
            "order": self.order,
            "verdict": self.verdict,
            "eps0": self.eps0,
            "failing_period": self.failing_period,
            "c_structural": self.c_structural,
            "c_empirical": self.c_empirical,
            "derivative_exponent": self.derivative_exponent,
            "evidence": [row.to_json_dict() for row in self.evidence],
            "per_order": [
                {"p": q, "eps0": e0, "certified": ok} for q, e0, ok in self.per_order
            ],
        }


def _period_deviation(f: Net, h: float, radius: float, eps: float, samples: int) -> float:
    xs = np.linspace(-radius, radius - h, samples)[:, None]
    base = ex.eval_points(f.body, eps, xs)
    shifted = ex.eval_points(f.body, eps, xs + h)
    return float(np.max(np.abs(shifted - base)))


def _detect_eps0(grid: EpsilonGrid, dev1, dev2, exponent: float):
    """Coarsest grid eps from which both period deviations stay below
    eps^exponent on every finer grid point; None when no such tail exists."""
    ok = [
        d1 <= eps**exponent and d2 <= eps**exponent
        for eps, d1, d2 in zip(grid.values, dev1, dev2)
    ]
    start = None
    for i in range(len(ok) - 1, -1, -1):
        if not ok[i]:
            break
        start = i
    return (grid.values[start], start) if start is not None else (None, None)


def _derivative_moderateness(f: Net, radius: float, grid: EpsilonGrid, samples: int) -> int:
    deriv = ex.partial(f.body, 1)
    xs = np.linspace(-radius, radius, samples)[:, None]
    sups = [float(np.max(np.abs(ex.eval_points(deriv, eps, xs)))) for eps in grid]
    slope = fit_decay_exponent(tuple(zip(grid.values, sups)))
    if math.isinf(slope):
        return 0
    return max(0, math.ceil(-slope - 1e-9))


def two_period_constancy(
    f: Net,
    a: AlgebraicNumber,
    radius: float,
    p: int,
    grid: Optional[EpsilonGrid] = None,
    samples: int = 129,
) -> ConstancyReport:
    """Verify that a net with periods 1 and alpha is a generalized constant.

    For each order p' <= p: detect the coarsest eps0 from which both period
    deviations stay below eps^((M+2)p'), draw the Diophantine pair at
    R = eps^(-p'), and certify sup |f(x) - f(0)| over |x| <= radius-alpha-2
    against c*eps^p' + 2*eps^(p'-N) with the structural constant
    c = (alpha+2)(radius+1) and N the fitted derivative exponent.
    """
    if f.dimension != 1:
        raise ValueError("the two-period theorem concerns one-dimensional nets")
    grid = grid or EpsilonGrid.dyadic()
    alpha = a.value_float
    if not radius > alpha + 2:
        raise ValueError("radius must exceed alpha + 2")
    M = liouville_constant(a).M
    dev1 = [_period_deviation(f, 1.0, radius, eps, samples) for eps in grid]
    dev2 = [_period_deviation(f, alpha, radius, eps, samples) for eps in grid]

    inner = radius - alpha - 2.0
    xs = np.linspace(-inner, inner, samples)[:, None]
    measured = []
    for eps in grid:
        vals = ex.eval_points(f.body, eps, xs)
        center = ex.evaluate(f.body, eps, (0.0,))
        measured.append(float(np.max(np.abs(vals - center))))

    n_exp = _derivative_moderateness(f, radius, grid, samples)
    c_struct = (alpha + 2.0) * (radius + 1.0)

    per_order = []
    rows = []
    eps0_main = None
    failing = None
    c_emp_main = None
    for q in range(1, p + 1):
        eps0, start = _detect_eps0(grid, dev1, dev2, (M + 2) * q)
        if eps0 is None:
            worst = 1.0 if dev1[-1] > dev2[-1] else alpha
            per_order.append((q, None, False))
            if q == p or failing is None:
                failing = worst
            continue
        ok_all = True
        c_emp = 0.0
        for idx in range(start, len(grid)):
            eps = grid.values[idx]
            pair = corollary_pair(a, eps ** (-q))
            with mp.workprec(64):
                h_log2 = float(mp.log(pair.defect, 2))
                log_eps = math.log2(eps)
                bounds_ok = (
                    pair.M * q * log_eps <= h_log2 <= 1.0 + q * log_eps
                    and math.log2(pair.k if pair.k else 1) <= math.log2(alpha + 1.0) - q * log_eps
                )
            certified = c_struct * eps**q + 2.0 * eps ** (q - n_exp)
            certified_ok = measured[idx] <= certified
            ok_all = ok_all and certified_ok and bounds_ok
            c_emp = max(c_emp, measured[idx] / eps**q)
            if q == p:
                rows.append(
                    ConstancyEvidence(
                        eps, pair.k, pair.l, h_log2, measured[idx], certified, certified_ok, bounds_ok
                    )
                )
        per_order.append((q, eps0, ok_all))
        if q == p:
            eps0_main = eps0
            c_emp_main = c_emp

    if failing is not None:
        verdict = "not-applicable"
    elif all(ok for _, _, ok in per_order):
        verdict = "constant"
    else:
        verdict = "not-certified"
    return ConstancyReport(
        radius,
        p,
        verdict,
        eps0_main,
        failing,
        c_struct,
        c_emp_main,
        n_exp,
        tuple(rows),
        tuple(per_order),
    )


# ---------------------------------------------------------------------------
# Translation invariance forces constancy


@dataclass(frozen=True)
class TranslationReport:
    order: int
    hypothesis: tuple  # ((offset tuple, InvarianceReport), ...)
    hypothesis_failed: bool
    conclusion: AsymptoticReport
    verdict: bool

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "hypothesis_failed": self.hypothesis_failed,
            "verdict": self.verdict,
            "hypothesis": [
                {"h": list(h), **r.to_json_dict()} for h, r in self.hypothesis
            ],
            "conclusion": self.conclusion.to_json_dict(),
        }


def translation_constancy(
    f: Net,
    box: CompactBox,
    grid: Optional[EpsilonGrid] = None,
    p: int = 4,
    h_samples: Sequence = ((0.5,), (1.0,)),
    max_order: int = 1,
) -> TranslationReport:
    """Hypothesis: invariance under each sampled translation.  Conclusion:
    x -> f(x) - f(0) is negligible at order p on the box."""
    from .colombeau import classify

    grid = grid or EpsilonGrid.dyadic()
    hypothesis = []
    for h in h_samples:
        offset = tuple(float(v) for v in h)
        if len(offset) != f.dimension:
            raise ValueError("offset length must equal the net dimension")
        rep = check_invariance(f, GroupElement.translation(f.dimension, offset), box, grid, p)
        hypothesis.append((offset, rep))
    hypothesis_failed = not all(r.invariant for _, r in hypothesis)
    zero = {f"x{k}": ex.Const(0.0) for k in range(1, f.dimension + 1)}
    centered = Net(ex.c_sub(f.body, ex.subst(f.body, zero)), f.dimension)
    conclusion = classify(centered, box, max_order=max_order, grid=grid, p_max=max(DEFAULT_P_MAX, p))
    verdict = (not hypothesis_failed) and conclusion.negligible_order >= p
    return TranslationReport(p, tuple(hypothesis), hypothesis_failed, conclusion, verdict)


# ---------------------------------------------------------------------------
# Open-question explorer (non-theorem output)


@dataclass(frozen=True)
class ExplorerRow:
    eps: float
    k: int
    l: int
    defect_log2: float
    effective_M: float
    measured: float

    def to_json_dict(self) -> dict:
        return {
            "eps": self.eps,
            "k": self.k,
            "l": self.l,
            "defect_log2": self.defect_log2,
            "effective_M": self.effective_M,
            "measured": self.measured,
        }


@dataclass(frozen=True)
class ExplorerReport:
    """Exploratory two-period data for a non-algebraic ratio.  Explicitly not
    backed by a theorem; never emits a theorem-grade verdict."""

    alpha: float
    radius: float
    order: int
    applicable: bool
    failing_period: Optional[float]
    effective_M: Optional[float]
    rows: tuple

    theorem_grade: bool = False

    def to_json_dict(self) -> dict:
        return {
            "note": "exploratory output; no theorem backs these numbers",
            "theorem_grade": False,
            "alpha": self.alpha,
            "radius": self.radius,
            "order": self.order,
            "applicable": self.applicable,
            "failing_period": self.failing_period,
            "effective_M": self.effective_M,
            "rows": [r.to_json_dict() for r in self.rows],
        }


def open_question_explorer(
    alpha_provider,
    f: Net,
    radius: float,
    p: int,
    grid: Optional[EpsilonGrid] = None,
    samples: int = 129,
) -> ExplorerReport:
    """Run the two-period machinery with continued-fraction convergents in
    place of the Liouville-backed pair, reporting the effective exponent the
    data would need."""
    from .numbertheory import dirichlet

    if f.dimension != 1:
        raise ValueError("one-dimensional nets only")
    grid = grid or EpsilonGrid.dyadic()
    with mp.workprec(96):
        alpha = float(alpha_provider(96) if callable(alpha_provider) else alpha_provider)
    if not radius > alpha + 2:
        raise ValueError("radius must exceed alpha + 2")

    inner = radius - alpha - 2.0
    xs = np.linspace(-inner, inner, samples)[:, None]
    rows = []
    eff_max = None
    for eps in grid:
        R = eps ** (-p)
        pair = dirichlet(alpha_provider if callable(alpha_provider) else alpha, int(R))
        with mp.workprec(64):
            dlog2 = float(mp.log(pair.defect, 2)) if pair.defect > 0 else -math.inf
        eff = -dlog2 / (p * -math.log2(eps)) if math.isfinite(dlog2) else math.inf
        eff_max = eff if eff_max is None else max(eff_max, eff)
        vals = ex.eval_points(f.body, eps, xs)
        center = ex.evaluate(f.body, eps, (0.0,))
        rows.append(
            ExplorerRow(eps, pair.k, pair.l, dlog2, eff, float(np.max(np.abs(vals - center))))
        )

    m_hat = max(2, math.ceil(eff_max)) if eff_max is not None and math.isfinite(eff_max) else 2
    dev1 = [_period_deviation(f, 1.0, radius, eps, samples) for eps in grid]
    dev2 = [_period_deviation(f, alpha, radius, eps, samples) for eps in grid]
    eps0, _ = _detect_eps0(grid, dev1, dev2, (m_hat + 2) * p)
    failing = None
    if eps0 is None:
        failing = 1.0 if dev1[-1] > dev2[-1] else alpha
    return ExplorerReport(alpha, radius, p, eps0 is not None, failing, eff_max, tuple(rows))
