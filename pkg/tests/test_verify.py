import math
import random

import numpy as np
import pytest

from epsnet import expr as ex
from epsnet.colombeau import CompactBox, EpsilonGrid, Net, classify
from epsnet.groups import GroupElement, planar_flow
from epsnet.numbertheory import catalog, resolve_alpha
from epsnet.sampling import random_proper_lorentz, random_special_orthogonal
from epsnet.verify import (
    CBoundednessError,
    chain_bound,
    check_invariance,
    check_periodicity,
    lorentz_invariance_pipeline,
    one_param_theorem_harness,
    open_question_explorer,
    rotation_invariance_pipeline,
    translation_constancy,
    two_period_constancy,
)

GRID = EpsilonGrid.dyadic()
BOX2 = CompactBox.cube(-1.0, 1.0, 2)
PI_LIT = "3.141592653589793"
RADIAL = Net.parse("exp(-(x1^2+x2^2))", 2)
NEGLIGIBLE = "exp(ln(eps)/eps)"
GEN_ANGLE = Net.parse("sin(1/eps)", 0)


class TestCheckInvariance:
    def test_radial_under_generalized_rotation(self):
        g = GroupElement.rotation(2, 1, 2, GEN_ANGLE)
        rep = check_invariance(RADIAL, g, BOX2, GRID, p=8)
        assert rep.invariant
        assert rep.asymptotic.negligible_order >= 8

    def test_radial_plus_negligible(self):
        # oracle: the perturbation alone classifies as negligible at order 8
        pert = Net.parse(f"{NEGLIGIBLE}*x1", 2)
        assert classify(pert, BOX2, max_order=0, grid=GRID).negligible_order >= 8
        f = Net.parse(f"exp(-(x1^2+x2^2)) + {NEGLIGIBLE}*x1", 2)
        g = GroupElement.rotation(2, 1, 2, GEN_ANGLE)
        rep = check_invariance(f, g, BOX2, GRID, p=8)
        assert rep.invariant

    def test_coordinate_is_not_invariant(self):
        f = Net.parse("x1", 2)
        g = GroupElement.rotation(2, 1, 2, math.pi / 2)
        rep = check_invariance(f, g, BOX2, GRID, p=1)
        assert not rep.invariant
        # the deviation stays O(1) along the whole grid
        sups = [s for _, s in rep.sups]
        assert min(sups) > 1.0

    def test_strict_c_boundedness_raises(self):
        f = Net.parse("x1", 1)
        g = GroupElement.from_coords(1, (ex.parse("x1/eps", 1),))
        with pytest.raises(CBoundednessError):
            check_invariance(f, g, CompactBox.cube(-1, 1, 1), GRID, p=1, strict=True)
        with pytest.warns(RuntimeWarning):
            check_invariance(f, g, CompactBox.cube(-1, 1, 1), GRID, p=1, strict=False)

    def test_verdict_implies_order(self):
        g = GroupElement.rotation(2, 1, 2, 0.3)
        rep = check_invariance(RADIAL, g, BOX2, GRID, p=5)
        assert rep.invariant
        assert rep.asymptotic.negligible_order >= 5

    def test_order_discrimination_for_small_structured_deviation(self):
        # translating by eps^2 moves x1 by exactly eps^2: invariant at order 2
        # but not at order 3 (the coarse grid is where this is measurable)
        f = Net.parse("x1", 1)
        g = GroupElement.translation(1, (Net.parse("eps^2", 0),))
        box = CompactBox.cube(-1.0, 1.0, 1)
        assert check_invariance(f, g, box, GRID, p=2).invariant
        assert not check_invariance(f, g, box, GRID, p=3).invariant


class TestOneParam:
    def test_radial_rotation_flow(self):
        rep = one_param_theorem_harness(
            RADIAL,
            planar_flow("rotation", 2, 1, 2),
            gen_thetas=(Net.parse("2+sin(1/eps)", 0),),
            box=BOX2,
            grid=GRID,
            p=6,
        )
        assert not rep.hypothesis_failed
        assert rep.verdict

    def test_boost_flow_on_form_function(self):
        rep = one_param_theorem_harness(
            Net.parse("x1^2-x2^2", 2),
            planar_flow("boost", 2, 1, 2),
            gen_thetas=(Net.parse("1+eps", 0),),
            box=BOX2,
            grid=GRID,
            p=6,
        )
        assert not rep.hypothesis_failed
        assert rep.verdict

    def test_hypothesis_failure_detected(self):
        # oracle: at theta=pi/4 the image of (1,0) maps x1*x2 to 1/2 != 0
        f = Net.parse("x1*x2", 2)
        g = GroupElement.rotation(2, 1, 2, math.pi / 4)
        moved = g.apply((1.0, 0.0))
        assert abs(moved[0] * moved[1] - 0.0) > 0.4
        rep = one_param_theorem_harness(
            f, planar_flow("rotation", 2, 1, 2), real_thetas=(math.pi / 4,), box=BOX2, grid=GRID, p=2
        )
        assert rep.hypothesis_failed
        assert not rep.verdict

    def test_unbounded_generalized_theta_rejected(self):
        with pytest.raises(ValueError, match="bounded"):
            one_param_theorem_harness(
                RADIAL,
                planar_flow("rotation", 2, 1, 2),
                gen_thetas=(Net.parse("1/eps", 0),),
                box=BOX2,
                grid=GRID,
                p=2,
            )


class TestRotationPipeline:
    def test_radial_with_net_valued_rotation(self):
        c = Net.parse("cos(sin(1/eps))", 0)
        s = Net.parse("sin(sin(1/eps))", 0)
        ms = Net.parse("-sin(sin(1/eps))", 0)
        rep = rotation_invariance_pipeline(RADIAL, [[c, ms], [s, c]], BOX2, GRID, p=6)
        assert rep.verdict and rep.consistent

    def test_radial_noise_so3(self):
        # oracle: the noise term alone is negligible at order 6
        noise = Net.parse(f"{NEGLIGIBLE}*x1", 3)
        box3 = CompactBox.cube(-1, 1, 3, samples_per_axis=9)
        assert classify(noise, box3, max_order=0, grid=GRID).negligible_order >= 6
        f = Net.parse(f"exp(-(x1^2+x2^2+x3^2)) + {NEGLIGIBLE}*x1", 3)
        M = random_special_orthogonal(random.Random(31), 3)
        rep = rotation_invariance_pipeline(f, M, box3, GRID, p=6)
        assert rep.verdict and rep.consistent

    def test_coordinate_rejected(self):
        f = Net.parse("x1", 2)
        M = random_special_orthogonal(random.Random(8), 2)
        rep = rotation_invariance_pipeline(f, M, BOX2, GRID, p=1)
        assert not rep.verdict and rep.consistent

    def test_verdict_consistency_across_corpus(self):
        rng = random.Random(100)
        corpus = [
            (RADIAL, 2),
            (Net.parse("x1+x2", 2), 2),
            (Net.parse("exp(-(x1^2+x2^2+x3^2))", 3), 3),
            (Net.parse("x1*x2", 2), 2),
        ]
        for f, d in corpus:
            box = CompactBox.cube(-1, 1, d, samples_per_axis=9)
            M = random_special_orthogonal(rng, d)
            rep = rotation_invariance_pipeline(f, M, box, GRID, p=4)
            assert rep.consistent


class TestLorentzPipeline:
    def test_form_function_invariant(self):
        # oracle: direct pointwise comparison at a few eps
        f = Net.parse("exp(-(x1^2-x2^2-x3^2)^2)", 3)
        box = CompactBox.cube(-1, 1, 3, samples_per_axis=9)
        L = random_proper_lorentz(random.Random(12), 3)
        X = box.lattice()
        for eps in (0.5, 2.0**-10):
            a = ex.eval_points(f.body, eps, X)
            b = ex.eval_points(f.body, eps, X @ L.T)
            assert np.max(np.abs(a - b)) <= 1e-10
        rep = lorentz_invariance_pipeline(f, L, box, GRID, p=6)
        assert rep.verdict and rep.consistent

    def test_form_plus_negligible(self):
        f = Net.parse(f"exp(-(x1^2-x2^2-x3^2)^2) + {NEGLIGIBLE}", 3)
        box = CompactBox.cube(-1, 1, 3, samples_per_axis=9)
        L = random_proper_lorentz(random.Random(13), 3)
        rep = lorentz_invariance_pipeline(f, L, box, GRID, p=8)
        assert rep.verdict

    def test_time_coordinate_rejected(self):
        from epsnet.decompose import boost_matrix

        f = Net.parse("x1", 3)
        box = CompactBox.cube(-1, 1, 3, samples_per_axis=9)
        rep = lorentz_invariance_pipeline(f, boost_matrix(3, 0.7), box, GRID, p=1)
        assert not rep.verdict and rep.consistent

    def test_net_valued_lorentz(self):
        ch = Net.parse("cosh(1+eps)", 0)
        sh = Net.parse("sinh(1+eps)", 0)
        zero = Net.parse("0", 0)
        one = Net.parse("1", 0)
        L = [[ch, sh, zero], [sh, ch, zero], [zero, zero, one]]
        f = Net.parse("exp(-(x1^2-x2^2-x3^2)^2)", 3)
        box = CompactBox.cube(-1, 1, 3, samples_per_axis=9)
        rep = lorentz_invariance_pipeline(f, L, box, GRID, p=6)
        assert rep.verdict and rep.consistent


class TestPeriodicity:
    BOX = CompactBox.cube(-3.0, 3.0, 1)

    def test_exact_period(self):
        f = Net.parse(f"sin(2*{PI_LIT}*x1)", 1)
        rep = check_periodicity(f, 1.0, self.BOX, GRID, p=6)
        assert rep.invariant
        assert max(s for _, s in rep.sups) <= 1e-12

    def test_wrong_period(self):
        # oracle: direct scan shows an O(1) deviation
        f = Net.parse(f"sin(2*{PI_LIT}*x1)", 1)
        xs = np.linspace(-3, 3 - math.sqrt(2), 5001)
        dev = np.max(
            np.abs(np.sin(2 * np.pi * (xs + math.sqrt(2))) - np.sin(2 * np.pi * xs))
        )
        assert dev > 1.0
        rep = check_periodicity(f, math.sqrt(2), self.BOX, GRID, p=1)
        assert not rep.invariant

    def test_constant_plus_negligible_any_period(self):
        f = Net.parse(f"7 + {NEGLIGIBLE}*sin(x1)", 1)
        for h in (0.3, 1.0, math.sqrt(2)):
            rep = check_periodicity(f, h, self.BOX, GRID, p=8)
            assert rep.invariant


class TestChainBound:
    def test_constant_function(self):
        f = lambda x: np.full_like(np.asarray(x, dtype=float), 5.0)  # noqa: E731
        rep = chain_bound(f, 0.0, 20.0, 1.0, math.sqrt(2), 0.0, [(2, 1), (3, 2)])
        assert rep.all_certified
        for pr in rep.pairs:
            assert pr.measured == 0.0 and pr.certified == 0.0

    def test_drifting_sine(self):
        # oracle: direct evaluation of both sides of the chained bound
        f = lambda x: np.sin(2 * np.pi * np.asarray(x, dtype=float)) + 0.001 * np.asarray(x, dtype=float)  # noqa: E731
        a, b, h1, h2 = 0.0, 20.0, 1.0, math.sqrt(2)
        xs = np.linspace(a, b - h2, 40001)
        tol = float(
            max(
                np.max(np.abs(f(xs[xs + h1 <= b] + h1) - f(xs[xs + h1 <= b]))),
                np.max(np.abs(f(xs + h2) - f(xs))),
            )
        )
        rep = chain_bound(f, a, b, h1, h2, tol, [(3, 2)])
        pr = rep.pairs[0]
        assert pr.measured <= 5 * tol
        assert pr.certified == pytest.approx(5 * tol)
        assert rep.all_certified and pr.path_ok
        # the audited path stays inside the interval
        assert all(a - 1e-9 <= pt <= b + 1e-9 for pt in pr.path)

    def test_endpoint_violation_flagged(self):
        f = lambda x: np.asarray(x, dtype=float) * 0.0  # noqa: E731
        rep = chain_bound(f, 0.0, 10.0, 1.0, math.sqrt(2), 0.0, [(9, 1)])
        assert rep.pairs[0].hypothesis_violated
        assert rep.pairs[0].excluded_points > 0


class TestTwoPeriod:
    SQRT2 = catalog()["sqrt2"]

    def test_constant_plus_negligible(self):
        f = Net.parse(f"7 + {NEGLIGIBLE}*sin(x1)", 1)
        rep = two_period_constancy(f, self.SQRT2, 6.0, 4, GRID)
        assert rep.verdict == "constant"
        assert rep.eps0 is not None
        assert all(row.measured <= row.certified for row in rep.evidence)
        assert all(row.bounds_ok for row in rep.evidence)

    def test_sine_not_applicable(self):
        f = Net.parse(f"sin(2*{PI_LIT}*x1)", 1)
        rep = two_period_constancy(f, self.SQRT2, 6.0, 4, GRID)
        assert rep.verdict == "not-applicable"
        assert rep.failing_period == pytest.approx(math.sqrt(2))

    def test_literal_constant(self):
        rep = two_period_constancy(Net.parse("4.5", 1), self.SQRT2, 6.0, 4, GRID)
        assert rep.verdict == "constant"
        assert all(row.measured == 0.0 for row in rep.evidence)

    def test_diophantine_side_conditions(self):
        f = Net.parse("2", 1)
        rep = two_period_constancy(f, self.SQRT2, 6.0, 3, GRID)
        # eps^(M p) <= h_eps <= 2 eps^p and k <= (alpha+1)/eps^p, encoded in bounds_ok
        assert rep.evidence and all(row.bounds_ok for row in rep.evidence)

    def test_requires_radius(self):
        with pytest.raises(ValueError, match="radius"):
            two_period_constancy(Net.parse("1", 1), self.SQRT2, 3.0, 2, GRID)


class TestTranslation:
    BOX = CompactBox.cube(-2.0, 2.0, 1)

    def test_plain_constant(self):
        rep = translation_constancy(Net.parse("3+eps*0", 1), self.BOX, GRID, p=4)
        assert rep.verdict and not rep.hypothesis_failed

    def test_generalized_constant_plus_negligible(self):
        # oracle: the negligible part classifies at order 8
        noise = Net.parse(f"{NEGLIGIBLE}*cos(x1)", 1)
        assert classify(noise, self.BOX, max_order=1, grid=GRID).negligible_order >= 8
        f = Net.parse(f"sin(1/eps) + {NEGLIGIBLE}*cos(x1)", 1)
        rep = translation_constancy(f, self.BOX, GRID, p=8)
        assert not rep.hypothesis_failed
        assert rep.verdict

    def test_coordinate_fails_hypothesis(self):
        rep = translation_constancy(Net.parse("x1", 1), self.BOX, GRID, p=2)
        assert rep.hypothesis_failed and not rep.verdict

    def test_2d(self):
        f = Net.parse("1.5+0*x1+0*x2", 2)
        rep = translation_constancy(
            f, CompactBox.cube(-1, 1, 2), GRID, p=3, h_samples=((0.5, 0.5), (1.0, -1.0))
        )
        assert rep.verdict


class TestExplorer:
    def test_constant_plus_negligible_with_pi(self):
        provider, _, _ = resolve_alpha("pi")
        f = Net.parse(f"7 + {NEGLIGIBLE}*sin(x1)", 1)
        rep = open_question_explorer(provider, f, 6.0, 3, EpsilonGrid.dyadic(4, 24))
        assert rep.applicable
        assert not rep.theorem_grade
        assert rep.effective_M is not None and rep.effective_M < 4
        assert all(row.measured == 0.0 for row in rep.rows)

    def test_sine_flagged_not_applicable(self):
        provider, _, _ = resolve_alpha("pi")
        f = Net.parse(f"sin(2*{PI_LIT}*x1)", 1)
        rep = open_question_explorer(provider, f, 6.0, 3, EpsilonGrid.dyadic(4, 24))
        assert not rep.applicable
        assert rep.failing_period is not None

    def test_constant_with_e(self):
        provider, _, _ = resolve_alpha("e")
        rep = open_question_explorer(provider, Net.parse("2", 1), 6.0, 3, EpsilonGrid.dyadic(4, 24))
        assert rep.applicable
        assert all(row.measured == 0.0 for row in rep.rows)

    def test_report_is_labeled_non_theorem(self):
        provider, _, _ = resolve_alpha("pi")
        rep = open_question_explorer(provider, Net.parse("2", 1), 6.0, 2, EpsilonGrid.dyadic(4, 16))
        data = rep.to_json_dict()
        assert data["theorem_grade"] is False
        assert "no theorem" in data["note"]
