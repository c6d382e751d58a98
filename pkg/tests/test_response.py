import itertools
import math

import numpy as np
import pytest

import excitonspec as xs
from excitonspec import (
    DephasingModel,
    PulseEvent,
    QuadratureError,
    enumerate_pathways,
    pathway_contribution,
    polarization_convolved,
    polarization_impulsive,
    response_function,
    select_phase_matched,
    spectrum_2d,
)
from conftest import random_density

ALL_PATTERNS = {n: list(itertools.product((1, -1), repeat=n)) for n in (1, 2, 3)}


def heisenberg_response(order, delays, model, rho):
    """Independent oracle: nested commutators of Heisenberg-picture dipoles
    (undamped evolution only)."""
    eps = model.energies

    def mu_at(t):
        u = np.diag(np.exp(-1j * eps * t))
        return u.conj().T @ model.mu @ u

    times = np.concatenate([[0.0], np.cumsum(delays)])
    state = np.array(rho, dtype=complex)
    for k in range(order):
        m = mu_at(times[k])
        state = m @ state - state @ m
    return complex((-1j) ** order * np.trace(mu_at(times[order]) @ state))


class TestResponseFunction:
    def test_first_order_two_level(self, tls):
        # vertex + free phase by hand: S1(t) = -1j * (-2j sin(w t)) = -2 sin(w t)
        g = np.diag([1.0, 0.0]).astype(complex)
        for t in (0.3, 0.9, 2.4):
            value = response_function(1, (t,), tls, None, g)
            assert value == pytest.approx(-2.0 * math.sin(3.0 * t), abs=1e-14)
            assert abs(value) == pytest.approx(2.0 * abs(math.sin(3.0 * t)), abs=1e-14)

    def test_zero_dipole_all_orders(self):
        model = xs.ExcitonModel(
            h0=np.diag([0.0, 5.0]).astype(complex),
            mu=np.zeros((2, 2), dtype=complex),
            labels=("g", "e"),
        )
        g = np.diag([1.0, 0.0]).astype(complex)
        for order, delays in [(1, (0.5,)), (2, (0.5, 0.3)), (3, (0.5, 0.3, 0.2))]:
            assert response_function(order, delays, model, None, g) == 0.0

    def test_second_order_vanishes_by_parity(self, dimer, dimer_ground):
        noise = DephasingModel.uniform(4, 0.2)
        rng = np.random.default_rng(30)
        for _ in range(25):
            delays = tuple(rng.uniform(0, 3, size=2))
            assert response_function(2, delays, dimer, noise, dimer_ground) == 0.0

    def test_matches_heisenberg_oracle(self, dimer):
        rng = np.random.default_rng(31)
        for _ in range(10):
            rho = random_density(rng, 4)
            for order in (1, 2, 3):
                delays = tuple(rng.uniform(0, 2, size=order))
                mine = response_function(order, delays, dimer, None, rho)
                oracle = heisenberg_response(order, delays, dimer, rho)
                assert mine == pytest.approx(oracle, abs=1e-12)

    def test_invalid_order(self, tls):
        with pytest.raises(ValueError, match="order"):
            response_function(4, (1, 1, 1, 1), tls, None, np.eye(2) / 2)

    def test_negative_delay_rejected(self, tls):
        with pytest.raises(ValueError, match="non-negative"):
            response_function(1, (-0.5,), tls, None, np.eye(2) / 2)


class TestEnumeratePathways:
    def test_counts(self):
        for n in (1, 2, 3):
            terms = enumerate_pathways(n)
            assert len(terms) == 4**n
            assert len({t.sides for t in terms}) == 2**n
            assert len({t.phase_signature for t in terms}) == 2**n

    def test_first_order_two_level_survivors(self, tls):
        # from the ground state exactly two terms are non-zero, one per
        # pattern, rotating at -w and +w respectively
        g = np.diag([1.0, 0.0]).astype(complex)
        t_ref = 0.37
        survivors = {}
        for term in enumerate_pathways(1):
            v = pathway_contribution(term, (t_ref,), tls, None, g)
            if v != 0:
                survivors[term.phase_signature] = (term, v)
        assert set(survivors) == {(1,), (-1,)}
        for sig, (term, v0) in survivors.items():
            # advance the delay and read the rotation frequency off the phase
            v1 = pathway_contribution(term, (t_ref + 0.1,), tls, None, g)
            ratio = v1 / v0
            expected = np.exp(-1j * sig[0] * 3.0 * 0.1)
            assert ratio == pytest.approx(expected, abs=1e-12)

    def test_pathway_sum_equals_pattern_component(self, dimer):
        rng = np.random.default_rng(32)
        rho = random_density(rng, 4)
        noise = DephasingModel.uniform(4, 0.1)
        delays = (0.7, 0.45, 0.6)
        for pattern in ALL_PATTERNS[3]:
            total = sum(
                pathway_contribution(t, delays, dimer, noise, rho)
                for t in enumerate_pathways(3)
                if t.phase_signature == pattern
            )
            direct = select_phase_matched(3, pattern, delays, dimer, noise, rho)
            assert total == pytest.approx(direct, abs=1e-13)

    def test_two_level_rephasing_set(self, tls):
        # brute force: from |g><g| exactly two (-,+,+) terms survive
        g = np.diag([1.0, 0.0]).astype(complex)
        delays = (0.4, 0.6, 0.3)
        nonzero = [
            t
            for t in enumerate_pathways(3)
            if t.phase_signature == (-1, 1, 1)
            and pathway_contribution(t, delays, tls, None, g) != 0
        ]
        assert {(t.sides, t.components) for t in nonzero} == {
            (("R", "L", "R"), (-1, 1, 1)),
            (("R", "R", "L"), (-1, 1, 1)),
        }


class TestSelectPhaseMatched:
    def test_partition_completeness(self, dimer):
        rng = np.random.default_rng(33)
        noise = DephasingModel.uniform(4, 0.07)
        for _ in range(15):
            rho = random_density(rng, 4)
            delays = tuple(rng.uniform(0, 2.5, size=3))
            full = response_function(3, delays, dimer, noise, rho)
            total = sum(
                select_phase_matched(3, pat, delays, dimer, noise, rho)
                for pat in ALL_PATTERNS[3]
            )
            assert abs(total - full) <= 1e-12 * max(1.0, abs(full))

    def test_two_level_rephasing_constant_in_t2(self, tls):
        g = np.diag([1.0, 0.0]).astype(complex)
        values = [
            abs(select_phase_matched(3, (-1, 1, 1), (0.4, t2, 0.3), tls, None, g))
            for t2 in (0.0, 0.5, 1.3, 2.9)
        ]
        assert np.ptp(values) < 1e-13

    def test_zero_dipole(self):
        model = xs.ExcitonModel(
            h0=np.diag([0.0, 5.0]).astype(complex),
            mu=np.zeros((2, 2), dtype=complex),
            labels=("g", "e"),
        )
        g = np.diag([1.0, 0.0]).astype(complex)
        assert select_phase_matched(2, (1, -1), (0.5, 0.2), model, None, g) == 0.0

    def test_pattern_arity_checked(self, tls):
        with pytest.raises(ValueError, match="arity"):
            select_phase_matched(2, (1, 1, 1), (0.5, 0.2), tls, None, np.eye(2) / 2)


class TestDephasingOnPathways:
    def test_detection_time_decay_per_pathway(self, tls):
        # every surviving pathway ends in a single coherence, so |value|
        # scales exactly as exp(-Gamma*t3)
        g = np.diag([1.0, 0.0]).astype(complex)
        t3a, t3b = 0.8, 1.7
        for gamma in (0.01, 0.1, 1.0):
            noise = DephasingModel.uniform(2, gamma)
            for term in enumerate_pathways(3):
                va = pathway_contribution(term, (0.5, 0.3, t3a), tls, noise, g)
                vb = pathway_contribution(term, (0.5, 0.3, t3b), tls, noise, g)
                if va == 0:
                    assert vb == 0
                    continue
                assert abs(vb) / abs(va) == pytest.approx(
                    math.exp(-gamma * (t3b - t3a)), rel=1e-9
                )

    def test_t1_t2_t3_factorization_per_pathway(self, dimer, dimer_ground):
        # Independent oracle: replay each pathway without dephasing,
        # splitting the waiting-time intermediate into populations and
        # coherences.  With uniform gamma the damped value must equal
        #   exp(-gamma*(t1+t3)) * (pop part + exp(-gamma*t2) * coh part),
        # because every t1/t3 interval holds only coherences while t2 can
        # hold either class.
        from excitonspec import free_propagate, split_dipole

        gamma = 0.3
        noise = DephasingModel.uniform(4, gamma)
        delays = (0.6, 0.4, 0.9)
        mu_up, mu_dn = split_dipole(dimer.mu, dimer.energies)

        def split_oracle(term):
            state = np.array(dimer_ground.matrix, dtype=complex)
            ops = [mu_up if c > 0 else mu_dn for c in term.components]
            # vertex 1 and 2, undamped propagation over t1
            for k in (0, 1):
                op = ops[k]
                state = op @ state if term.sides[k] == "L" else state @ op
                if k == 0:
                    state = free_propagate(state, delays[0], dimer, None)
            parts = []
            for selector in ("pop", "coh"):
                piece = np.diag(np.diag(state)) if selector == "pop" else state - np.diag(np.diag(state))
                piece = free_propagate(piece, delays[1], dimer, None)
                piece = ops[2] @ piece if term.sides[2] == "L" else piece @ ops[2]
                piece = free_propagate(piece, delays[2], dimer, None)
                parts.append(complex((-1j) ** 3 * term.sign * np.trace(dimer.mu @ piece)))
            return parts

        base = math.exp(-gamma * (delays[0] + delays[2]))
        for term in enumerate_pathways(3):
            damped = pathway_contribution(term, delays, dimer, noise, dimer_ground)
            pop_part, coh_part = split_oracle(term)
            expected = base * (pop_part + math.exp(-gamma * delays[1]) * coh_part)
            assert damped == pytest.approx(expected, abs=1e-12)
            # pathways with a pure waiting-time class obey the simple
            # modulus law as well
            free_value = pop_part + coh_part
            if free_value == 0:
                continue
            if coh_part == 0:
                assert abs(damped) / abs(free_value) == pytest.approx(base, rel=1e-9)
            elif pop_part == 0:
                assert abs(damped) / abs(free_value) == pytest.approx(
                    base * math.exp(-gamma * delays[1]), rel=1e-9
                )

    def test_dephasing_never_amplifies_a_pathway(self, dimer, dimer_ground):
        rng = np.random.default_rng(34)
        noise = DephasingModel.uniform(4, 0.5)
        for _ in range(5):
            delays = tuple(rng.uniform(0.1, 2.0, size=3))
            for pattern in ALL_PATTERNS[3]:
                damped = abs(select_phase_matched(3, pattern, delays, dimer, noise, dimer_ground))
                free = abs(select_phase_matched(3, pattern, delays, dimer, None, dimer_ground))
                assert damped <= free + 1e-13


class TestPolarizationImpulsive:
    def make_pulses(self, areas=(1.0, 1.0, 1.0)):
        return [
            PulseEvent(0.0, area=areas[0], k_sign=-1),
            PulseEvent(0.7, area=areas[1], k_sign=1),
            PulseEvent(1.15, area=areas[2], k_sign=1),
        ]

    def test_unit_areas_equal_response_component(self, dimer, dimer_ground):
        noise = DephasingModel.uniform(4, 0.1)
        p = polarization_impulsive(
            3, self.make_pulses(), 1.75, None, dimer, noise, dimer_ground
        )
        s = select_phase_matched(
            3, (-1, 1, 1), (0.7, 0.45, 0.6), dimer, noise, dimer_ground
        )
        assert p == pytest.approx(s, abs=1e-14)

    def test_multilinearity_in_areas(self, dimer, dimer_ground):
        base = polarization_impulsive(
            3, self.make_pulses(), 1.75, None, dimer, None, dimer_ground
        )
        doubled = polarization_impulsive(
            3, self.make_pulses((2.0, 2.0, 2.0)), 1.75, None, dimer, None, dimer_ground
        )
        assert doubled == pytest.approx(8.0 * base, rel=1e-13)

    def test_second_order_parity_zero(self, dimer, dimer_ground):
        pulses = [PulseEvent(0.0, k_sign=-1), PulseEvent(0.9, k_sign=1)]
        assert polarization_impulsive(2, pulses, 1.4, None, dimer, None, dimer_ground) == 0.0

    def test_detection_before_last_pulse(self, dimer, dimer_ground):
        with pytest.raises(ValueError, match="detection"):
            polarization_impulsive(
                3, self.make_pulses(), 1.0, None, dimer, None, dimer_ground
            )


class TestPolarizationConvolved:
    def finite_pulses(self, width, carrier=9.5):
        return [
            PulseEvent(0.0, area=1.0, carrier=carrier, mode="finite", width=width, k_sign=-1),
            PulseEvent(0.7, area=0.9, carrier=carrier, mode="finite", width=width, k_sign=1),
            PulseEvent(1.15, area=1.1, carrier=carrier, mode="finite", width=width, k_sign=1),
        ]

    def test_impulsive_limit(self, dimer, dimer_ground):
        noise = DephasingModel.uniform(4, 0.05)
        width = 1e-3
        conv = polarization_convolved(
            3, self.finite_pulses(width), 1.75, None, dimer, noise, dimer_ground,
            step=width / 20,
        )
        imp = polarization_impulsive(
            3,
            [PulseEvent(0.0, 1.0, k_sign=-1), PulseEvent(0.7, 0.9, k_sign=1), PulseEvent(1.15, 1.1, k_sign=1)],
            1.75, None, dimer, noise, dimer_ground,
        )
        assert abs(conv - imp) / abs(imp) < 1e-3

    def test_zero_field(self, dimer, dimer_ground):
        pulses = [
            PulseEvent(0.0, area=0.0, carrier=9.5, mode="finite", width=0.05, k_sign=-1),
            PulseEvent(0.7, area=0.0, carrier=9.5, mode="finite", width=0.05, k_sign=1),
            PulseEvent(1.15, area=0.0, carrier=9.5, mode="finite", width=0.05, k_sign=1),
        ]
        assert polarization_convolved(
            3, pulses, 1.75, None, dimer, None, dimer_ground, step=0.01
        ) == 0.0

    def test_step_halving_self_consistency(self, dimer, dimer_ground):
        pulses = self.finite_pulses(0.05)
        a = polarization_convolved(3, pulses, 1.75, None, dimer, None, dimer_ground, step=0.004)
        b = polarization_convolved(3, pulses, 1.75, None, dimer, None, dimer_ground, step=0.002)
        assert abs(a - b) / abs(b) < 1e-4

    def test_coarse_step_raises(self, dimer, dimer_ground):
        pulses = self.finite_pulses(0.3)
        with pytest.raises(QuadratureError):
            polarization_convolved(
                3, pulses, 3.5, None, dimer, None, dimer_ground, step=0.29
            )

    def test_requires_finite_pulses(self, dimer, dimer_ground):
        with pytest.raises(ValueError, match="finite"):
            polarization_convolved(
                3,
                [PulseEvent(0.0), PulseEvent(0.7), PulseEvent(1.15)],
                1.75, None, dimer, None, dimer_ground, step=0.01,
            )


class TestSpectrum2d:
    def test_pure_coherence_peak_position(self):
        omega0 = 6.0
        t1 = np.arange(0, 256) * 0.05
        t3 = np.arange(0, 256) * 0.05
        vals = np.exp(-1j * omega0 * t1)[:, None] * np.exp(-1j * omega0 * t3)[None, :]
        w1, w3, spec = spectrum_2d(t1, t3, vals)
        i, k = np.unravel_index(np.argmax(np.abs(spec)), spec.shape)
        bin1 = w1[1] - w1[0]
        bin3 = w3[1] - w3[0]
        assert abs(w1[i] - (-omega0)) <= bin1
        assert abs(w3[k] - (-omega0)) <= bin3

    def test_zero_input(self):
        t = np.arange(0, 16) * 0.1
        _, _, spec = spectrum_2d(t, t, np.zeros((16, 16)))
        assert np.max(np.abs(spec)) == 0.0

    def test_damped_peak_width_grows_with_gamma(self):
        t1 = np.arange(0, 256) * 0.05
        t3 = np.arange(0, 256) * 0.05

        def halfwidth(gamma):
            vals = (
                np.exp((-1j * 6.0 - gamma) * t1)[:, None]
                * np.exp((-1j * 6.0 - gamma) * t3)[None, :]
            )
            _, _, spec = spectrum_2d(t1, t3, vals)
            mag = np.abs(spec)
            return int(np.sum(mag > 0.5 * mag.max()))

        assert halfwidth(0.1) < halfwidth(0.5) < halfwidth(1.5)

    def test_nonuniform_grid_rejected(self):
        t_bad = np.array([0.0, 0.1, 0.25, 0.3])
        t_ok = np.arange(0, 4) * 0.1
        with pytest.raises(ValueError, match="uniform"):
            spectrum_2d(t_bad, t_ok, np.zeros((4, 4)))
