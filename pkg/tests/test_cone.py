"""Tests for cone specifications, norms, directions, and sphere sets."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxratio import (
    Box,
    Cap,
    Complement,
    ConeSpec,
    Dataset,
    FiniteUnion,
    WholeSphere,
    direction,
    norm,
    norms,
    sphere_contains,
    sphere_set_from_json,
)
from maxratio.cone import contains_many, validate_sphere_set
from maxratio.exceptions import (
    DegenerateElementError,
    DimensionMismatchError,
    InputValidationError,
)


class TestConeSpec:
    def test_euclidean_345(self):
        spec = ConeSpec("euclidean_rd", 2)
        assert norm(spec, np.array([3.0, 4.0])) == 5.0

    def test_sup_norm(self):
        spec = ConeSpec("sup_rd", 3)
        assert norm(spec, np.array([1.0, -7.0, 2.0])) == 7.0

    def test_lp_norm(self):
        spec = ConeSpec("lp_rd", 2, p=3.0)
        x = np.array([2.0, 2.0])
        # |2|^3 + |2|^3 = 16, so the norm is 16^(1/3)
        assert norm(spec, x) == pytest.approx(16.0 ** (1.0 / 3.0), rel=1e-15)

    def test_max_cone_identity(self):
        spec = ConeSpec("max_cone_rplus", 1)
        assert norm(spec, np.array([3.5])) == 3.5

    def test_max_cone_rejects_negative(self):
        spec = ConeSpec("max_cone_rplus", 1)
        with pytest.raises(InputValidationError):
            norm(spec, np.array([-1.0]))

    def test_lp_requires_p(self):
        with pytest.raises(InputValidationError):
            ConeSpec("lp_rd", 2)

    def test_lp_rejects_p_below_one(self):
        with pytest.raises(InputValidationError):
            ConeSpec("lp_rd", 2, p=0.5)

    def test_non_lp_rejects_p(self):
        with pytest.raises(InputValidationError):
            ConeSpec("euclidean_rd", 2, p=3.0)

    def test_unknown_kind(self):
        with pytest.raises(InputValidationError):
            ConeSpec("banach", 2)

    def test_dimension_positive(self):
        with pytest.raises(InputValidationError):
            ConeSpec("euclidean_rd", 0)

    def test_max_cone_dimension_one(self):
        with pytest.raises(InputValidationError):
            ConeSpec("max_cone_rplus", 3)

    def test_json_round_trip(self):
        for spec in [
            ConeSpec("euclidean_rd", 4),
            ConeSpec("lp_rd", 2, p=1.5),
            ConeSpec("sup_rd", 3),
            ConeSpec("max_cone_rplus", 1),
        ]:
            assert ConeSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec

    def test_json_omits_p_when_absent(self):
        doc = ConeSpec("euclidean_rd", 2).to_json()
        assert "p" not in doc

    def test_norm_dimension_mismatch(self):
        spec = ConeSpec("euclidean_rd", 2)
        with pytest.raises(DimensionMismatchError):
            norm(spec, np.array([1.0, 2.0, 3.0]))


class TestDirection:
    def test_simple(self):
        spec = ConeSpec("euclidean_rd", 2)
        u = direction(spec, np.array([3.0, 4.0]))
        np.testing.assert_allclose(u, [0.6, 0.8], rtol=1e-15)

    def test_origin_raises(self):
        spec = ConeSpec("euclidean_rd", 2)
        with pytest.raises(DegenerateElementError):
            direction(spec, np.array([0.0, 0.0]))

    def test_sup_norm_direction(self):
        spec = ConeSpec("sup_rd", 2)
        u = direction(spec, np.array([-4.0, 2.0]))
        np.testing.assert_allclose(u, [-1.0, 0.5], rtol=1e-15)

    @given(
        arrays(
            np.float64,
            3,
            elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
        ).filter(lambda v: np.linalg.norm(v) > 1e-6)
    )
    def test_polar_round_trip(self, x):
        """Rebuilding x from its norm and direction is exact to 1e-12."""
        spec = ConeSpec("euclidean_rd", 3)
        r = norm(spec, x)
        u = direction(spec, x)
        np.testing.assert_allclose(r * u, x, rtol=1e-12, atol=1e-12 * r)

    @given(
        arrays(
            np.float64,
            3,
            # keep |c*x| well inside the normal float range so the 4 ulp
            # bound is not drowned by gradual underflow
            elements=st.floats(-1e3, 1e3, allow_nan=False).filter(
                lambda v: v == 0.0 or abs(v) > 1e-6
            ),
        ),
        st.floats(1e-3, 1e3),
    )
    def test_homogeneity(self, x, c):
        spec = ConeSpec("euclidean_rd", 3)
        lhs = norm(spec, c * x)
        rhs = c * norm(spec, x)
        assert abs(lhs - rhs) <= 4 * np.spacing(max(lhs, rhs, 1e-30))


class TestNorms:
    def test_matches_scalar(self, rng):
        X = rng.normal(size=(50, 3))
        spec = ConeSpec("euclidean_rd", 3)
        batch = norms(spec, X)
        single = np.array([norm(spec, row) for row in X])
        np.testing.assert_allclose(batch, single, rtol=1e-15)

    def test_lp_batch(self, rng):
        X = np.abs(rng.normal(size=(20, 4))) + 0.1
        spec = ConeSpec("lp_rd", 4, p=2.5)
        batch = norms(spec, X)
        single = np.array([norm(spec, row) for row in X])
        np.testing.assert_allclose(batch, single, rtol=1e-14)


class TestSphereSets:
    def test_cap_contains(self, euclid2):
        sset = Cap(center=(1.0, 0.0), angular_radius=math.pi / 2)
        assert sphere_contains(euclid2, sset, np.array([0.6, 0.8]))

    def test_cap_excludes(self, euclid2):
        sset = Cap(center=(1.0, 0.0), angular_radius=math.pi / 4)
        assert not sphere_contains(euclid2, sset, np.array([0.0, 1.0]))

    def test_cap_radius_range(self):
        with pytest.raises(InputValidationError):
            Cap(center=(1.0, 0.0), angular_radius=0.0)
        with pytest.raises(InputValidationError):
            Cap(center=(1.0, 0.0), angular_radius=3.2)

    def test_whole_sphere(self, euclid2):
        assert sphere_contains(euclid2, WholeSphere(), np.array([0.0, 1.0]))

    def test_box(self, euclid2):
        sset = Box(bounds=((0.0, 1.0), (-1.0, 0.5)))
        assert sphere_contains(euclid2, sset, np.array([0.6, -0.8]))
        assert not sphere_contains(euclid2, sset, np.array([-0.6, 0.8]))

    def test_box_bounds_inclusive(self, euclid2):
        sset = Box(bounds=((0.0, 0.6), (0.0, 1.0)))
        assert sphere_contains(euclid2, sset, np.array([0.6, 0.8]))

    def test_union_and_complement(self, euclid2):
        a = Cap(center=(1.0, 0.0), angular_radius=0.3)
        b = Cap(center=(0.0, 1.0), angular_radius=0.3)
        u = FiniteUnion(members=(a, b))
        point = np.array([0.0, 1.0])
        assert sphere_contains(euclid2, u, point)
        assert not sphere_contains(euclid2, Complement(u), point)

    @given(st.floats(0.0, 2 * math.pi))
    def test_complement_is_involution(self, angle):
        spec = ConeSpec("euclidean_rd", 2)
        sset = Cap(center=(1.0, 0.0), angular_radius=1.0)
        point = np.array([math.cos(angle), math.sin(angle)])
        point /= np.linalg.norm(point)
        inner = sphere_contains(spec, sset, point)
        outer = sphere_contains(spec, Complement(sset), point)
        assert inner != outer
        assert sphere_contains(spec, Complement(Complement(sset)), point) == inner

    def test_contains_many_matches_scalar(self, rng, euclid3):
        sset = FiniteUnion(
            members=(
                Cap(center=(1.0, 0.0, 0.0), angular_radius=0.8),
                Box(bounds=((-1.0, 0.0), (-1.0, 1.0), (-1.0, 1.0))),
            )
        )
        U = rng.normal(size=(40, 3))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        batch = contains_many(euclid3, sset, U)
        single = np.array([sphere_contains(euclid3, sset, u) for u in U])
        np.testing.assert_array_equal(batch, single)

    def test_unit_norm_check_on_scalar_membership(self, euclid2):
        sset = Cap(center=(1.0, 0.0), angular_radius=1.0)
        with pytest.raises(InputValidationError):
            sphere_contains(euclid2, sset, np.array([2.0, 0.0]))

    def test_validate_cap_center_against_cone(self):
        spec = ConeSpec("sup_rd", 2)
        # (1, 1) has sup norm 1, valid for the sup cone but not Euclidean
        validate_sphere_set(spec, Cap(center=(1.0, 1.0), angular_radius=0.5))
        with pytest.raises(InputValidationError):
            validate_sphere_set(
                ConeSpec("euclidean_rd", 2), Cap(center=(1.0, 1.0), angular_radius=0.5)
            )

    def test_json_round_trip(self):
        sset = FiniteUnion(
            members=(
                Cap(center=(1.0, 0.0), angular_radius=0.5),
                Complement(Box(bounds=((0.0, 1.0), (0.0, 1.0)))),
                WholeSphere(),
            )
        )
        doc = json.loads(json.dumps(sset.to_json()))
        assert sphere_set_from_json(doc) == sset

    def test_from_json_rejects_unknown_variant(self):
        with pytest.raises(InputValidationError):
            sphere_set_from_json({"variant": "annulus"})


class TestDataset:
    def test_basic_properties(self, small_dataset):
        assert len(small_dataset) == 6
        assert small_dataset.dimension == 2
        np.testing.assert_allclose(small_dataset.norms[0], 5.0)

    def test_rejects_wrong_dimension(self, euclid3):
        with pytest.raises(DimensionMismatchError):
            Dataset(euclid3, np.ones((4, 2)))

    def test_rejects_empty(self, euclid2):
        with pytest.raises(InputValidationError):
            Dataset(euclid2, np.empty((0, 2)))

    def test_rejects_nan_with_row_number(self, euclid2):
        coords = np.ones((3, 2))
        coords[1, 0] = np.nan
        with pytest.raises(InputValidationError, match=r"row\(s\) \[1\]"):
            Dataset(euclid2, coords)

    def test_rejects_zero_norm_row(self, euclid2):
        coords = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(InputValidationError, match=r"row\(s\) \[1\]"):
            Dataset(euclid2, coords)

    def test_rejects_negative_on_max_cone(self):
        spec = ConeSpec("max_cone_rplus", 1)
        with pytest.raises(InputValidationError):
            Dataset(spec, np.array([[1.0], [-2.0]]))

    def test_coords_are_copied_and_frozen(self, euclid2):
        coords = np.ones((2, 2))
        ds = Dataset(euclid2, coords)
        coords[0, 0] = 99.0
        assert ds.coords[0, 0] == 1.0
        with pytest.raises(ValueError):
            ds.coords[0, 0] = 5.0

    def test_scaled(self, small_dataset):
        doubled = small_dataset.scaled(2.0)
        np.testing.assert_allclose(doubled.norms, 2.0 * small_dataset.norms, rtol=1e-15)
        with pytest.raises(InputValidationError):
            small_dataset.scaled(-1.0)

    @given(st.floats(0.1, 100.0))
    @settings(max_examples=25)
    def test_norms_scale_linearly(self, c):
        spec = ConeSpec("euclidean_rd", 2)
        coords = np.array([[3.0, 4.0], [1.0, 1.0]])
        base = Dataset(spec, coords)
        scaled = Dataset(spec, c * coords)
        np.testing.assert_allclose(scaled.norms, c * base.norms, rtol=1e-12)
