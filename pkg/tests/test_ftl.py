import numpy as np
import pytest

from hughes1d import (CrossingEvent, IntegratorConfig, OrderingError,
                      ParticleState, PiecewiseConstantDensity,
                      apply_crossing_policy, atomize, atomize_count,
                      atomize_riemann, check_theorem2, evacuation_metrics,
                      ftl_rhs, initial_state, integrate, symmetrize,
                      total_variation)
from hughes1d.ftl import LEFT_NEIGHBOR, POLICY_HALT, RIGHT_NEIGHBOR
from hughes1d.model import linear_reciprocal


@pytest.fixture(scope="module")
def model():
    return linear_reciprocal(0.99)


def constant_datum(value):
    return PiecewiseConstantDensity.from_segments([(-1.0, 1.0, value)])


STEPS = PiecewiseConstantDensity.from_segments(
    [(-0.8, -0.5, 0.8), (-0.3, 0.3, 0.6), (0.4, 0.75, 0.9)])


class TestRhs:
    def test_two_leaders_only(self, model):
        state = ParticleState(time=0.0, positions=np.array([-0.5, 0.5]),
                              split_index=0, mass_m=0.25, xi=0.0)
        np.testing.assert_allclose(ftl_rhs(model, state), [-1.0, 1.0])

    def test_right_follower_speed(self, model):
        # follower looks at the gap ahead: v(0.25 / 0.5) = 0.5
        state = ParticleState(time=0.0, positions=np.array([0.0, 0.5]),
                              split_index=-1, mass_m=0.25, xi=-0.5)
        np.testing.assert_allclose(ftl_rhs(model, state), [0.5, 1.0])

    def test_left_follower_speed(self, model):
        state = ParticleState(time=0.0, positions=np.array([0.0, 0.5]),
                              split_index=1, mass_m=0.25, xi=0.75)
        np.testing.assert_allclose(ftl_rhs(model, state), [-1.0, -0.5])

    def test_symmetric_state_gives_odd_speeds(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 5))
        speeds = ftl_rhs(model, state)
        np.testing.assert_allclose(speeds, -speeds[::-1], atol=1e-15)

    def test_straddling_gap_influences_nobody(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 5))
        squeezed = state.copy()
        i0 = state.split_index
        speeds_before = ftl_rhs(model, squeezed)
        # moving xi inside the straddling gap changes no speeds
        squeezed.xi = 0.5 * (squeezed.positions[i0] + squeezed.xi)
        np.testing.assert_array_equal(ftl_rhs(model, squeezed), speeds_before)

    def test_ordering_violation_rejected(self, model):
        state = ParticleState(time=0.0, positions=np.array([0.0, 0.5]),
                              split_index=0, mass_m=0.1, xi=0.2)
        state.positions = np.array([0.5, 0.0])
        with pytest.raises(OrderingError):
            ftl_rhs(model, state)


class TestIntegrateSymmetric:
    def test_constant_datum_pins_turning_point(self, model):
        state = initial_state(model, atomize_count(constant_datum(0.6), 200))
        series, events = integrate(model, state, 1.0)
        assert events == []
        assert np.max(np.abs(series.xi_history)) <= 1e-10

    def test_positions_stay_mirrored(self, model):
        state = initial_state(model, atomize(constant_datum(0.25), 6))
        series, _ = integrate(model, state, 1.0)
        for pos in series.positions:
            np.testing.assert_allclose(pos, -pos[::-1], atol=1e-10)

    def test_leaders_move_at_max_speed(self, model):
        state = initial_state(model, atomize(constant_datum(0.25), 5))
        x_left, x_right = state.positions[0], state.positions[-1]
        series, _ = integrate(model, state, 1.0)
        for t, pos in zip(series.times, series.positions):
            assert pos[0] == pytest.approx(x_left - t, abs=1e-9)
            assert pos[-1] == pytest.approx(x_right + t, abs=1e-9)


class TestIntegrateRiemann:
    def test_collision_free_jump_grows_vacuum(self, model):
        state = initial_state(model, atomize_riemann(0.45, 0.55, 90, 110))
        series, events = integrate(model, state, 1.0)
        assert events == []
        i0 = state.split_index
        first_gap = state.positions[i0 + 1] - state.positions[i0]
        last = series.positions[-1]
        assert last[i0 + 1] - last[i0] > 10 * first_gap
        # the reconstruction keeps a vacuum band around the turning point
        for dens, xi in zip(series.densities, series.xi_history):
            assert dens.value_at(xi) == 0.0

    def test_steep_jump_hits_left_neighbor(self, model):
        state = initial_state(model, atomize_riemann(0.1, 0.9, 20, 180))
        series, events = integrate(model, state, 1.0)
        assert len(events) >= 1
        assert all(e.side == LEFT_NEIGHBOR for e in events)
        times = [e.time for e in events]
        assert times == sorted(times)
        assert all(e.relative_speed < 0.0 for e in events)
        # switches moved the split towards the left group
        assert series.meta["final_split_index"] < state.split_index

    def test_ordering_preserved_through_switches(self, model):
        state = initial_state(model, atomize_riemann(0.1, 0.9, 20, 180))
        series, _ = integrate(model, state, 1.0)
        for pos in series.positions:
            assert np.all(np.diff(pos) > 0.0)

    def test_halt_policy_stops_at_first_event(self, model):
        state = initial_state(model, atomize_riemann(0.1, 0.9, 20, 180))
        cfg = IntegratorConfig(crossing_policy=POLICY_HALT)
        series, events = integrate(model, state, 1.0, cfg)
        assert len(events) == 1
        assert series.meta["terminated_by_event"]
        assert series.times[-1] == pytest.approx(events[0].time, abs=1e-12)


class TestMassTransfer:
    def test_three_step_datum_transfers_mass(self, model):
        state = initial_state(model, atomize_count(STEPS, 200))
        series, events = integrate(model, state, 1.0,
                                   IntegratorConfig(snapshot_count=41))
        assert len(events) >= 5
        # while particles cross, the density jumps across the turning point
        jumps = []
        for t, dens, xi in zip(series.times, series.densities,
                               series.xi_history):
            if 0.15 <= t <= 0.3:
                jumps.append(abs(dens.value_at(xi - 0.03)
                                 - dens.value_at(xi + 0.03)))
        assert max(jumps) > 0.2


class TestDiscreteMaximumPrinciple:
    def test_gap_densities_never_exceed_initial_max(self):
        m = linear_reciprocal(0.2)
        datum = constant_datum(0.18)
        assert check_theorem2(m, total_variation(datum))[0]
        state = initial_state(m, atomize(datum, 6))
        series, events = integrate(m, state, 1.0)
        assert events == []
        cap = max(d.values.max() for d in series.densities[:1])
        for dens in series.densities:
            assert dens.values.max() <= cap + 1e-8


class TestDiscreteContinuity:
    def test_gap_density_rate_matches_formula(self, model):
        state = initial_state(model, atomize_riemann(0.45, 0.55, 90, 110))
        delta = 1e-3
        probes = (0.3, 0.5, 0.7)
        times = np.unique(np.concatenate(
            [[0.0], *[[t - delta, t, t + delta] for t in probes]]))
        series, events = integrate(model, state, 0.8,
                                   IntegratorConfig(snapshot_times=times))
        assert events == []
        idx = {round(t, 10): i for i, t in enumerate(series.times)}
        m = state.mass_m
        i0 = state.split_index
        for t in probes:
            pos = series.positions[idx[round(t, 10)]]
            before = series.positions[idx[round(t - delta, 10)]]
            after = series.positions[idx[round(t + delta, 10)]]
            gaps = np.diff(pos)
            n_gaps = gaps.size

            def rho_of(p, g):
                if g < 0 or g >= n_gaps or g == i0:
                    return 0.0
                return m / (p[g + 1] - p[g])

            fd = np.array([(rho_of(after, g) - rho_of(before, g))
                           / (2 * delta) for g in range(n_gaps)])
            for g in range(n_gaps):
                if g == i0:
                    continue
                if g < i0:
                    rate = (m * (model.velocity(rho_of(pos, g))
                                 - model.velocity(rho_of(pos, g - 1)))
                            / gaps[g] ** 2)
                else:
                    rate = (-m * (model.velocity(rho_of(pos, g + 1))
                                  - model.velocity(rho_of(pos, g)))
                            / gaps[g] ** 2)
                assert rate == pytest.approx(fd[g], abs=1e-4)


class TestCrossingPolicy:
    def _event(self, side, index):
        return CrossingEvent(time=0.5, particle_index=index, side=side,
                             xi_at_event=0.0, relative_speed=-0.1)

    def test_left_crossing_shifts_split_down(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 4))
        out = apply_crossing_policy(state, self._event(LEFT_NEIGHBOR,
                                                       state.split_index))
        assert out.split_index == state.split_index - 1
        assert out.num_particles == state.num_particles

    def test_right_crossing_shifts_split_up(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 4))
        out = apply_crossing_policy(state, self._event(RIGHT_NEIGHBOR,
                                                       state.split_index + 1))
        assert out.split_index == state.split_index + 1

    def test_halt_marks_terminal(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 4))
        out = apply_crossing_policy(state, self._event(LEFT_NEIGHBOR, 1),
                                    policy=POLICY_HALT)
        assert out.terminal
        np.testing.assert_array_equal(out.positions, state.positions)

    def test_unknown_policy_rejected(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 4))
        with pytest.raises(ValueError):
            apply_crossing_policy(state, self._event(LEFT_NEIGHBOR, 1),
                                  policy="bounce")


class TestEvacuation:
    def test_initial_count_and_monotone_mass(self, model):
        state = initial_state(model, atomize(constant_datum(0.25), 6))
        series, _ = integrate(model, state, 1.0)
        report = evacuation_metrics(series)
        assert report.inside_count[0] == state.num_particles
        assert np.all(np.diff(report.inside_mass) < 0.0)
        assert report.clearance_time is None

    def test_full_evacuation_reaches_zero_mass(self, model):
        state = initial_state(model, atomize(constant_datum(0.25), 4))
        series, _ = integrate(model, state, 6.0,
                              IntegratorConfig(snapshot_count=31))
        report = evacuation_metrics(series, mass_threshold=1e-12)
        assert report.inside_mass[-1] == 0.0
        assert report.clearance_time is not None
        assert report.inside_count[-1] == 0


class TestStateBasics:
    def test_directions_split(self, model):
        state = initial_state(model, atomize(constant_datum(0.4), 3))
        d = state.directions
        i0 = state.split_index
        assert np.all(d[:i0 + 1] == -1)
        assert np.all(d[i0 + 1:] == 1)

    def test_xi_between_its_neighbors(self, model):
        state = initial_state(model, atomize_count(STEPS, 100))
        i0 = state.split_index
        assert state.positions[i0] < state.xi < state.positions[i0 + 1]

    def test_xi_bar_reported_separately(self, model):
        state = initial_state(model, atomize_count(STEPS, 100))
        assert state.xi_bar is not None
        assert state.xi != state.xi_bar
