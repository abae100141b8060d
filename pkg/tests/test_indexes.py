import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from schurchoice.errors import InputError, PreconditionError, ResourceError
from schurchoice.indexes import (
    GINI_SIMPSON,
    SHANNON,
    builtin_indexes,
    check_count_representation,
    check_homogeneity0,
    check_orthogonal_invariance,
    check_schur_concave,
    check_upper_contour_characterization,
    constant_index,
    count_constants,
    extremal_and_central,
    first_coordinate_index,
    index_count_representation,
    is_s_convex,
    lattice,
    level_sets,
    optimize_index_over_sconvex,
    renyi,
    support_size,
)

SPREAD = {(1, 5), (2, 4), (3, 3), (4, 2), (5, 1)}
DIAGONAL = {(1, 1), (4, 4)}
ENDS = {(1, 5), (5, 1)}

dists = st.integers(1, 4).flatmap(lambda n: st.lists(st.integers(0, 9), min_size=n, max_size=n)).map(tuple)
pairs = st.integers(1, 4).flatmap(lambda n: st.tuples(
    *(st.lists(st.integers(0, 9), min_size=n, max_size=n).map(tuple) for _ in range(2))))


def shannon_float(x):
    t = sum(x)
    return -sum(v / t * math.log(v / t) for v in x if v) if t else 0.0


class TestValues:
    def test_gini_simpson_exact(self):
        assert GINI_SIMPSON((1, 1)) == F(1, 2)
        assert GINI_SIMPSON((2, 1, 1)) == F(5, 8)
        assert GINI_SIMPSON((0, 0)) == 0

    def test_shannon(self):
        with mpmath.workdps(50):
            assert abs(SHANNON((1, 1)) - mpmath.log(2)) < mpmath.mpf(10) ** -45
        assert SHANNON((0, 4, 0)) == 0

    def test_renyi_two_is_log_inverse_simpson(self):
        with mpmath.workdps(50):
            assert abs(renyi(2)((1, 1, 2)) - mpmath.log(mpmath.mpf(8) / 3)) < mpmath.mpf(10) ** -45

    def test_count_index(self):
        f = index_count_representation((1, 2, 3))
        assert f((3, 0, 3)) == 2
        assert f((0, 0, 0)) == 0
        assert count_constants(f, 3) == (1, 2, 3)

    @pytest.mark.parametrize("c", [(), (2, 1), (-1, 0)])
    def test_count_index_rejects(self, c):
        with pytest.raises(InputError):
            index_count_representation(c)

    def test_renyi_order_validation(self):
        for bad in (0, 1, -2, "1/1"):
            with pytest.raises(InputError):
                renyi(bad)

    def test_display(self):
        assert builtin_indexes()["gini_simpson"].display((1, 1)) == "1/2"
        assert SHANNON.display((1, 1)).startswith("0.69314718055994530941723212145")

    def test_support_size(self):
        assert support_size((0, 3, 1)) == 2


class TestExactComparison:
    @settings(max_examples=300, deadline=None)
    @given(pairs)
    def test_shannon_agrees_with_floats_when_separated(self, pair):
        x, y = pair
        d = shannon_float(x) - shannon_float(y)
        if abs(d) > 1e-6:
            assert SHANNON.cmp(x, y) == (1 if d > 0 else -1)

    def test_shannon_exact_ties(self):
        assert SHANNON.cmp((1, 2), (2, 4)) == 0
        assert SHANNON.cmp((1, 2, 0), (0, 2, 1)) == 0
        assert SHANNON.cmp((0, 0), (0, 5)) == 0
        assert SHANNON.cmp((1, 1), (5, 0)) == 1

    @settings(max_examples=200, deadline=None)
    @given(pairs, st.sampled_from(["1/2", "3", "5/2"]))
    def test_renyi_antisymmetric(self, pair, alpha):
        f = renyi(alpha)
        x, y = pair
        assert f.cmp(x, y) == -f.cmp(y, x)

    def test_renyi_half_ties_on_scaling(self):
        assert renyi("1/2").cmp((1, 3), (2, 6)) == 0

    @given(dists, st.randoms(use_true_random=False))
    def test_builtins_symmetric(self, x, rnd):
        y = list(x)
        rnd.shuffle(y)
        for f in builtin_indexes().values():
            assert f.cmp(x, y) == 0


class TestAxioms:
    @pytest.mark.parametrize("f", [SHANNON, GINI_SIMPSON, renyi(2), renyi("1/2")], ids=lambda f: f.name)
    def test_builtin_profile(self, f):
        assert check_schur_concave(f, 3, 4).passed
        assert check_homogeneity0(f, 3, 4).passed
        res = check_orthogonal_invariance(f, 3, 3)
        assert not res.passed

    def test_first_coordinate_not_homogeneous(self):
        res = check_homogeneity0(first_coordinate_index(), 2, 4)
        assert not res.passed and res.witness["scale"] >= 2

    def test_shannon_orthogonal_witness(self):
        res = check_orthogonal_invariance(SHANNON, 3, 3)
        x, y, z = res.witness["x"], res.witness["y"], res.witness["z"]
        xz = tuple(a + b for a, b in zip(x, z))
        yz = tuple(a + b for a, b in zip(y, z))
        assert SHANNON.cmp(x, y) == 0 and SHANNON.cmp(xz, yz) != 0

    @pytest.mark.parametrize("c", [(1, 2, 3), (1, 2, 2), (2, 2, 2), (0, 1, 5)])
    def test_rising_count_profiles_pass(self, c):
        f = index_count_representation(c)
        for check in (check_schur_concave, check_homogeneity0, check_orthogonal_invariance,
                      check_count_representation):
            assert check(f, 3, 4).passed, check.__name__

    @pytest.mark.parametrize("c", [(1, 1, 2), (0, 0, 1)])
    def test_tie_then_rise_breaks_orthogonal_invariance(self, c):
        # (0,0,1) and (0,1,1) tie, but adding a first-type student separates them
        f = index_count_representation(c)
        assert check_schur_concave(f, 3, 4).passed and check_homogeneity0(f, 3, 4).passed
        assert f((0, 0, 1)) == f((0, 1, 1))
        assert f((1, 0, 1)) != f((1, 1, 1))
        assert not check_orthogonal_invariance(f, 3, 4).passed

    def test_first_coordinate_fails(self):
        f = first_coordinate_index()
        assert not check_schur_concave(f, 2, 4).passed

    def test_constant_index_is_count(self):
        assert check_count_representation(constant_index(7), 3, 4).passed

    def test_lattice(self):
        pts = lattice(2, 2)
        assert len(pts) == 8 and (0, 0) not in pts
        with pytest.raises(ResourceError):
            lattice(6, 9, cap=1000)

    def test_level_sets(self):
        groups = level_sets(GINI_SIMPSON, [(2, 0), (1, 1), (0, 2)])
        assert [set(g) for g in groups] == [{(0, 2), (2, 0)}, {(1, 1)}]


class TestSConvex:
    def test_membership(self):
        assert is_s_convex(SPREAD).passed
        assert is_s_convex(DIAGONAL).passed
        res = is_s_convex(ENDS)
        assert not res.passed and res.witness["missing"] in ([2, 4], [4, 2])

    def test_permutation_witness(self):
        res = is_s_convex({(1, 2)})
        assert res.witness == {"member": [1, 2], "missing": [2, 1], "reason": "permutation"}

    def test_extremal_and_central(self):
        extremal, central = extremal_and_central(SPREAD)
        assert extremal == {(1, 5), (5, 1)}
        assert central == {(3, 3)}
        assert (2, 4) not in extremal | central
        assert extremal_and_central(DIAGONAL) == (DIAGONAL, DIAGONAL)

    def test_requires_s_convex(self):
        with pytest.raises(PreconditionError):
            extremal_and_central(ENDS)

    def test_optimizers(self):
        argmax, argmin = optimize_index_over_sconvex(SHANNON, SPREAD)
        assert argmax == {(3, 3)}
        assert optimize_index_over_sconvex(constant_index(), SPREAD)[0] == SPREAD
        assert optimize_index_over_sconvex(GINI_SIMPSON, SPREAD)[1] <= {(5, 1), (1, 5)}

    @pytest.mark.parametrize("f", [SHANNON, GINI_SIMPSON, renyi(2), first_coordinate_index(),
                                   index_count_representation((1, 2, 3))], ids=lambda f: f.name)
    def test_contour_biconditional(self, f):
        res = check_upper_contour_characterization(f, 3, 4)
        assert res.passed
        assert res.schur_concave.passed == (f.name != "first_coordinate")
