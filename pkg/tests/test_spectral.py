"""Tests for the empirical spectral measure and set queries."""

import math

import numpy as np
import pytest

from maxratio import (
    Box,
    Cap,
    Complement,
    ConeSpec,
    Dataset,
    DirectionLaw,
    FiniteUnion,
    GroupSummary,
    RadialLaw,
    SpectralEstimate,
    WholeSphere,
    estimate_spectral,
    measure_of,
    partition_histogram,
    query,
    sample,
    spectral_ci,
    summarize,
)
from maxratio.exceptions import (
    DegenerateVarianceError,
    InputValidationError,
    OverlappingPartitionError,
)
from maxratio.planner import SecondOrderParams, plan_second_order
from maxratio.spectral import atoms_to_csv

from conftest import SEED


def summaries_from_atoms(atoms):
    atoms = np.asarray(atoms, dtype=float)
    return [
        GroupSummary(group_index=i, m1=2.0, m2=1.0, kappa=0.5, theta=a)
        for i, a in enumerate(atoms)
    ]


@pytest.fixture
def three_atoms(euclid2):
    summaries = summaries_from_atoms([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    return estimate_spectral(summaries, euclid2)


class TestSpectralEstimate:
    def test_counting_example(self, three_atoms):
        """Atoms (1,0), (0,1), (1,0) put mass 2/3 on a cap around (1,0)."""
        cap = Cap(center=(1.0, 0.0), angular_radius=math.pi / 4)
        result = measure_of(three_atoms, cap)
        assert result.p_hat == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert result.count == 2

    def test_whole_sphere_mass_one(self, three_atoms):
        assert measure_of(three_atoms, WholeSphere()).p_hat == 1.0

    def test_atom_weight(self, three_atoms):
        assert three_atoms.n == 3
        assert three_atoms.weight == pytest.approx(1.0 / 3.0)

    def test_atoms_must_be_unit(self, euclid2):
        summaries = summaries_from_atoms([[2.0, 0.0]])
        with pytest.raises(InputValidationError):
            estimate_spectral(summaries, euclid2)

    def test_atoms_read_only(self, three_atoms):
        with pytest.raises(ValueError):
            three_atoms.atoms[0, 0] = 5.0

    def test_complement_mass_sums_to_one(self, three_atoms):
        cap = Cap(center=(1.0, 0.0), angular_radius=0.5)
        inside = measure_of(three_atoms, cap).p_hat
        outside = measure_of(three_atoms, Complement(cap)).p_hat
        assert inside + outside == pytest.approx(1.0, rel=1e-15)

    def test_union_additive_when_disjoint(self, three_atoms):
        a = Cap(center=(1.0, 0.0), angular_radius=0.2)
        b = Cap(center=(0.0, 1.0), angular_radius=0.2)
        union = FiniteUnion(members=(a, b))
        assert measure_of(three_atoms, union).p_hat == pytest.approx(
            measure_of(three_atoms, a).p_hat + measure_of(three_atoms, b).p_hat
        )


class TestSpectralCi:
    def test_frozen_half_width(self):
        """Binomial interval at p 0.5, n 100: half width 1.95996 * 0.05."""
        lo, hi = spectral_ci(0.5, 100, 0.95)
        assert (hi - lo) / 2.0 == pytest.approx(0.0979982, abs=1e-6)

    def test_degenerate_extremes(self):
        with pytest.raises(DegenerateVarianceError):
            spectral_ci(0.0, 100, 0.95)
        with pytest.raises(DegenerateVarianceError):
            spectral_ci(1.0, 100, 0.95)

    def test_not_clamped(self):
        lo, hi = spectral_ci(0.01, 10, 0.999)
        assert lo < 0.0

    def test_query_attaches_interval(self, three_atoms):
        cap = Cap(center=(1.0, 0.0), angular_radius=0.5)
        result = query(three_atoms, cap, level=0.9)
        assert result.ci is not None and result.level == 0.9
        assert result.ci[0] < result.p_hat < result.ci[1]

    def test_query_json_keys(self, three_atoms):
        doc = query(three_atoms, Cap(center=(1.0, 0.0), angular_radius=0.5)).to_json()
        assert set(doc) == {"set", "p_hat", "ci", "level"}


class TestPartitionHistogram:
    def test_partition_of_whole_sphere(self, three_atoms):
        cap = Cap(center=(1.0, 0.0), angular_radius=0.5)
        cells = partition_histogram(three_atoms, [cap, Complement(cap)])
        assert sum(mass for _, mass in cells) == pytest.approx(1.0, rel=1e-15)

    def test_overlap_rejected(self, three_atoms):
        a = Cap(center=(1.0, 0.0), angular_radius=1.0)
        b = Cap(center=(0.8, 0.6), angular_radius=1.0)
        with pytest.raises(OverlappingPartitionError):
            partition_histogram(three_atoms, [a, b])


class TestScaleInvariance:
    def test_power_of_two_scale_is_bitwise(self, euclid2, rng):
        coords = np.abs(rng.normal(size=(60, 2))) + 0.5
        plan_summaries = lambda X: summarize(Dataset(euclid2, X), _plan())[0]

        def _plan():
            from maxratio import GroupingPlan

            return GroupingPlan(n=10, m=6)

        base = estimate_spectral(plan_summaries(coords), euclid2)
        scaled = estimate_spectral(plan_summaries(2.0 * coords), euclid2)
        np.testing.assert_array_equal(base.atoms, scaled.atoms)

    def test_general_scale_matches_to_tolerance(self, euclid2, rng):
        from maxratio import GroupingPlan

        coords = np.abs(rng.normal(size=(60, 2))) + 0.5
        plan = GroupingPlan(n=10, m=6)
        base, _ = summarize(Dataset(euclid2, coords), plan)
        scaled, _ = summarize(Dataset(euclid2, 3.7 * coords), plan)
        a = estimate_spectral(base, euclid2)
        b = estimate_spectral(scaled, euclid2)
        np.testing.assert_allclose(a.atoms, b.atoms, rtol=1e-12)


class TestConsistency:
    def test_half_sphere_near_half(self, rng):
        """Uniform directions put mass about 0.5 on any half sphere."""
        spec = ConeSpec("euclidean_rd", 2)
        ds = sample(
            100000,
            RadialLaw.pareto(1.0),
            DirectionLaw.uniform_sphere(2),
            spec,
            seed=SEED,
        )
        params = SecondOrderParams(alpha=1.0, beta=math.inf, zeta=1.0, epsilon=0.0)
        summaries, _ = summarize(ds, plan_second_order(len(ds), params))
        estimate = estimate_spectral(summaries, spec)
        half = Cap(center=(1.0, 0.0), angular_radius=math.pi / 2)
        assert measure_of(estimate, half).p_hat == pytest.approx(0.5, abs=0.02)

    def test_two_atom_masses(self):
        """Two-atom direction law is recovered near (0.3, 0.7)."""
        spec = ConeSpec("euclidean_rd", 2)
        law = DirectionLaw.discrete(
            atoms=[[1.0, 0.0], [0.0, 1.0]], weights=[0.3, 0.7]
        )
        ds = sample(100000, RadialLaw.pareto(1.0), law, spec, seed=SEED)
        from maxratio import GroupingPlan

        summaries, _ = summarize(ds, GroupingPlan(n=10000, m=10))
        estimate = estimate_spectral(summaries, spec)
        first = Cap(center=(1.0, 0.0), angular_radius=0.3)
        second = Cap(center=(0.0, 1.0), angular_radius=0.3)
        assert measure_of(estimate, first).p_hat == pytest.approx(0.3, abs=0.02)
        assert measure_of(estimate, second).p_hat == pytest.approx(0.7, abs=0.02)


class TestAtomsCsv:
    def test_round_trip(self, three_atoms, tmp_path):
        path = tmp_path / "atoms.csv"
        atoms_to_csv(three_atoms, path)
        loaded = np.loadtxt(path, delimiter=",", ndmin=2)
        np.testing.assert_allclose(loaded, three_atoms.atoms, rtol=1e-15)


class TestBoxQueries:
    def test_box_on_positive_quadrant(self, three_atoms):
        box = Box(bounds=((0.5, 1.0), (-0.5, 0.5)))
        assert measure_of(three_atoms, box).p_hat == pytest.approx(2.0 / 3.0)

    def test_spectral_estimate_direct_construction(self, euclid2):
        atoms = np.array([[1.0, 0.0], [0.0, 1.0]])
        est = SpectralEstimate(atoms=atoms, cone=euclid2)
        assert est.n == 2
