"""
Path algebra: evaluation, excursions, running minimum, composition, diagnostics.
"""

import math

import numpy as np
import pytest

from rank2sim.cadlag import (
    ExcursionSet,
    GridPath,
    JumpDriftPath,
    add,
    compose_monotone,
    excursion_marks,
    extract_excursions,
    first_passage,
    first_reach,
    goodness_report,
    lengths_desc,
    restrict,
    running_min,
)
from rank2sim.errors import DownwardJump, HorizonMismatch, OutOfDomain

pytestmark = pytest.mark.unit

# drift -1, one jump of 0.5 at t = 1: single excursion (1, 1.5)
SIMPLE = JumpDriftPath.from_jumps(-1.0, [(1.0, 0.5)], 10.0)


class TestEvaluation:

    def test_value_and_left_limit(self):
        assert SIMPLE.value(1.0) == -0.5
        assert SIMPLE.left(1.0) == -1.0
        assert SIMPLE.value(0.0) == 0.0

    def test_vectorised(self):
        assert SIMPLE.value(np.array([0.5, 2.0])).tolist() == [-0.5, -1.5]

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            SIMPLE.value(10.5)

    def test_negative_jump_rejected(self):
        with pytest.raises(DownwardJump):
            JumpDriftPath(-1.0, np.array([1.0]), np.array([-0.1]), 2.0)

    def test_simultaneous_jumps_merged(self):
        p = JumpDriftPath.from_jumps(0.0, [(1.0, 0.25), (1.0, 0.5), (2.0, 0.0)], 3.0)
        assert p.times.tolist() == [1.0]
        assert p.sizes.tolist() == [0.75]

    def test_grid_path_is_left_constant(self):
        g = GridPath(0.5, [0.0, 1.0, 2.0], [0.75], [3.0])
        assert g.value(0.6) == 1.0
        assert g.value(0.75) == 4.0
        assert g.left(0.75) == 1.0
        assert g.horizon == 1.0


class TestArithmetic:

    def test_add_jump_drift(self):
        other = JumpDriftPath.from_jumps(0.5, [(1.0, 0.25), (3.0, 1.0)], 10.0)
        s = add(SIMPLE, other)
        assert s.drift == -0.5
        assert s.times.tolist() == [1.0, 3.0]
        assert s.sizes.tolist() == [0.75, 1.0]

    def test_add_grid_and_exact(self):
        g = GridPath(0.5, [0.0, 0.0, 0.0])
        s = add(g, JumpDriftPath.from_jumps(-1.0, [(0.25, 1.0)], 1.0))
        assert isinstance(s, GridPath)
        assert s.values.tolist() == [0.0, -0.5, -1.0]
        assert s.value(0.25) == 1.0

    def test_horizon_mismatch(self):
        with pytest.raises(HorizonMismatch):
            add(SIMPLE, JumpDriftPath.zero(5.0))

    def test_grid_step_mismatch(self):
        with pytest.raises(HorizonMismatch):
            add(GridPath(0.5, [0.0, 0.0, 0.0]), GridPath(0.25, [0.0] * 5))

    def test_restrict(self):
        r = restrict(JumpDriftPath.from_jumps(-1.0, [(1.0, 0.5), (4.0, 1.0)], 10.0), 2.0)
        assert r.horizon == 2.0
        assert r.times.tolist() == [1.0]
        with pytest.raises(OutOfDomain):
            restrict(r, 3.0)

    def test_restrict_grid(self):
        g = restrict(GridPath(0.5, [0.0, 1.0, 2.0, 3.0], [1.2], [1.0]), 1.0)
        assert g.values.tolist() == [0.0, 1.0, 2.0]
        assert g.jump_times.size == 0


class TestExcursions:

    def test_single_excursion(self):
        assert extract_excursions(SIMPLE).intervals() == [(1.0, 1.5)]

    def test_overlapping_jumps_chain(self):
        p = JumpDriftPath.from_jumps(-1.0, [(1.0, 1.0), (1.5, 1.0), (5.0, 0.5)], 10.0)
        assert extract_excursions(p).intervals() == [(1.0, 3.0), (5.0, 5.5)]

    def test_jump_at_excursion_end_extends_it(self):
        p = JumpDriftPath.from_jumps(-1.0, [(1.0, 1.0), (2.0, 1.0)], 10.0)
        assert extract_excursions(p).intervals() == [(1.0, 3.0)]

    def test_censored_at_horizon(self):
        p = JumpDriftPath.from_jumps(-1.0, [(9.0, 4.0)], 10.0)
        e = extract_excursions(p)
        assert e.intervals() == [(9.0, 10.0)]
        assert e.censored

    def test_jump_at_horizon_opens_nothing(self):
        p = JumpDriftPath.from_jumps(-1.0, [(1.0, 0.5), (4.0, 1.0)], 4.0)
        e = extract_excursions(p)
        assert e.intervals() == [(1.0, 1.5)]
        assert not e.censored
        assert lengths_desc(e).tolist() == [0.5]

    def test_zero_drift_jump_at_horizon(self):
        p = JumpDriftPath.from_jumps(0.0, [(4.0, 1.0)], 4.0)
        assert len(extract_excursions(p)) == 0

    def test_zero_drift(self):
        p = JumpDriftPath.from_jumps(0.0, [(2.0, 1.0), (3.0, 1.0)], 5.0)
        e = extract_excursions(p)
        assert e.intervals() == [(2.0, 5.0)]
        assert e.censored

    def test_no_jumps(self):
        assert len(extract_excursions(JumpDriftPath.zero(3.0))) == 0

    def test_grid_excursion(self):
        g = GridPath(0.5, [0.0, -0.5, 1.0, 0.5, -1.0, -1.5])
        e = extract_excursions(g)
        assert e.intervals() == [(1.0, 2.0)]
        assert not e.censored

    def test_grid_censored(self):
        e = extract_excursions(GridPath(0.5, [0.0, 1.0, 2.0]))
        assert e.intervals() == [(0.5, 1.0)]
        assert e.censored

    def test_lengths_desc(self):
        e = ExcursionSet(np.array([0.0, 2.0, 5.0]), np.array([1.0, 4.0, 6.0]), 10.0)
        assert lengths_desc(e).tolist() == [2.0, 1.0, 1.0]

    def test_against_grid_oracle(self, rng, path_generator):
        for _ in range(200):
            path = path_generator.jump_path(rng)
            exact = lengths_desc(extract_excursions(path))
            np.testing.assert_array_equal(exact, path_generator.excursion_lengths(path))

    def test_lengths_within_horizon(self, rng, path_generator):
        for _ in range(50):
            e = extract_excursions(path_generator.jump_path(rng))
            assert e.total_length <= e.horizon
            assert np.all(e.left[1:] >= e.right[:-1])


class TestExcursionMarks:

    def test_mark_is_increment_over_excursion(self):
        phi = JumpDriftPath.from_jumps(2.0, [(1.0, 3.0)], 10.0)
        marks = excursion_marks(extract_excursions(SIMPLE), phi)
        assert marks.triples() == [(1.0, 0.5, 4.0)]

    def test_mark_beyond_domain_is_nan(self):
        phi = JumpDriftPath.zero(1.2)
        marks = excursion_marks(extract_excursions(SIMPLE), phi)
        assert math.isnan(marks.mark[0])


class TestRunningMin:

    def test_level(self):
        rm = running_min(SIMPLE)
        assert rm.level(0.5) == 0.5
        assert rm.level(1.2) == 1.0
        assert rm.level(3.0) == 2.5

    def test_first_passage_generalized_inverse(self):
        assert first_passage(SIMPLE, 0.5) == 0.5
        assert first_passage(SIMPLE, 1.0) == 1.5
        assert first_passage(SIMPLE, 2.0) == 2.5
        assert first_passage(SIMPLE, 9.6) == math.inf

    def test_hitting_is_left_version(self):
        rm = running_min(SIMPLE)
        assert rm.hitting(1.0) == 1.0
        assert rm.hitting(0.0) == 0.0
        assert rm.hitting(2.0) == 2.5

    def test_passage_jumps_are_excursions(self, rng, path_generator):
        for _ in range(50):
            path = path_generator.jump_path(rng)
            rm = running_min(path)
            closed = rm.excursions.lengths[:-1] if rm.excursions.censored else rm.excursions.lengths
            np.testing.assert_array_equal(np.sort(rm.passage.sizes), np.sort(closed))

    def test_hitting_matches_oracle(self, rng, path_generator):
        for _ in range(50):
            path = path_generator.jump_path(rng)
            rm = running_min(path)
            for v in (0.125, 1.0, 3.5, 7.25):
                assert rm.hitting(v) == path_generator.tau(path, v)

    def test_requires_zero_start(self):
        with pytest.raises(ValueError):
            running_min(JumpDriftPath(-1.0, np.zeros(0), np.zeros(0), 1.0, start=1.0))


class TestComposeMonotone:

    def test_first_reach(self):
        inner = JumpDriftPath.from_jumps(1.0, [(1.0, 2.0)], 5.0)
        assert first_reach(inner, np.array([0.5, 2.0, 3.0, 9.0])).tolist() == [0.5, 1.0, 1.0, math.inf]

    @pytest.mark.parametrize('outer_drift, inner_jumps', [
        (0.0, 10),
        (0.5, 10),
        (-1.0, 0),
    ], ids=['pure_jump_outer', 'rising_outer', 'falling_outer_continuous_inner'])
    def test_against_pointwise(self, rng, path_generator, outer_drift, inner_jumps):
        uniform = np.linspace(0.0, 10.0, 1000)
        for _ in range(100):
            outer = path_generator.jump_path(rng, 20, 40.0, outer_drift, 2.0)
            inner = path_generator.jump_path(rng, inner_jumps, 10.0, 1.0, 2.0)
            composed = compose_monotone(outer, inner)
            assert not composed.truncated
            ts = np.concatenate([uniform, inner.times, composed.times])
            np.testing.assert_allclose(composed.value(ts), outer.value(inner.value(ts)), atol=1e-12)

    def test_falling_outer_across_inner_jump_rejected(self):
        outer = JumpDriftPath(-1.0, np.zeros(0), np.zeros(0), 10.0)
        inner = JumpDriftPath.from_jumps(1.0, [(1.0, 2.0)], 5.0)
        with pytest.raises(DownwardJump):
            compose_monotone(outer, inner)

    def test_truncated_when_inner_leaves_domain(self):
        outer = JumpDriftPath.zero(2.0)
        inner = JumpDriftPath(1.0, np.zeros(0), np.zeros(0), 5.0)
        composed = compose_monotone(outer, inner)
        assert composed.truncated
        assert composed.horizon == 2.0

    def test_decreasing_inner_rejected(self):
        with pytest.raises(ValueError):
            compose_monotone(SIMPLE, SIMPLE)


class TestGoodnessReport:

    def test_simple_path(self):
        report = goodness_report(SIMPLE)
        assert report.excursion_count == 1
        assert report.endpoint_jump == 0.0
        assert report.complement_measure == pytest.approx(9.5)
        assert report.ladder_decreasing
        assert report.first_negative_time == 0.0
        assert 'complement_positive' in report.flags

    def test_censored_flag(self):
        report = goodness_report(JumpDriftPath.from_jumps(-1.0, [(9.0, 4.0)], 10.0))
        assert 'censored_last_excursion' in report.flags

    def test_as_dict_is_json_ready(self):
        d = goodness_report(SIMPLE).as_dict()
        assert set(d['long_excursions']) == {'0.001', '0.01', '0.1', '1.0'}
        assert d['long_excursions']['0.1'] == 1
