"""Perturbative response functions, phase matching and polarizations.

The n-th order response at delays (t1, ..., tn) is built sequentially:
an impulsive interaction vertex -1j*[mu, .], damped free propagation
over the delay, repeated n times, then the expectation value with the
full dipole,

    S(t1, ..., tn) = Tr( mu * G(tn) V ... G(t1) V rho_in ),   V = -1j*[mu, .].

Phase matching: splitting mu = mu_plus + mu_minus into raising and
lowering parts (by energy), each interaction vertex pairs, after the
rotating-wave approximation, with exactly one field component:

  * raising part on the ket, or the action that lowers the bra
    (the raising operator applied from the right)  ->  "+" slot,
  * the converse pairings                          ->  "-" slot.

Counter-rotating pairings are the discarded ones.  Each surviving term
therefore carries a definite sign pattern (s1, ..., sn), its Fourier
component k_s = s1*k1 + ... + sn*kn.  Because both commutator sides of a
vertex share the component sign, the component with pattern s is simply
the nested commutator chain with mu replaced by mu^{s_k} at vertex k, and
summing over all 2^n patterns recovers the full response exactly.

Conventions, recorded in output metadata where relevant:
  * prefactor -1j per interaction vertex (witness quantities use |P|^2
    and are insensitive to it);
  * the rephasing component is the pattern (-1, +1, +1), meaning
    k_s = -k1 + k2 + k3;
  * delays are causal: negative delays are an input error, not zero;
  * detected intensity is |P|^2 at the selected component.

Finite pulses: the polarization is the time-ordered multiple convolution
of the response kernel with one field factor per slot.  Each factor is
the Gaussian envelope times the analytic carrier of its slot,
exp(-1j*s*carrier*(t - arrival)), normalized so the envelope integrates
to the pulse area (impulsive limit: P -> product(areas) * S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .dynamics import DephasingModel, free_propagate
from .models import ExcitonModel
from .operators import state_matrix

#: k_s = -k1 + k2 + k3
REPHASING_PATTERN = (-1, 1, 1)

_ORDERS = (1, 2, 3)


class QuadratureError(RuntimeError):
    """Convolution quadrature failed its step-halving self-check."""


@dataclass(frozen=True)
class PulseEvent:
    """One laser interaction.

    ``k_sign`` labels the +/-k slot this pulse occupies and provides the
    default sign pattern of a sequence.  ``width`` is the Gaussian
    standard deviation, required in finite mode.  ``area`` is the time
    integral of the envelope (dipole*field*time, dimensionless).
    """

    arrival: float
    area: float = 1.0
    carrier: float = 0.0
    mode: str = "impulsive"
    width: Optional[float] = None
    k_sign: int = 1

    def __post_init__(self):
        if self.mode not in ("impulsive", "finite"):
            raise ValueError(f"unknown pulse mode {self.mode!r}")
        if self.mode == "finite" and not (self.width is not None and self.width > 0):
            raise ValueError("finite pulses require width > 0")
        if self.k_sign not in (-1, 1):
            raise ValueError("k_sign must be +1 or -1")


@dataclass(frozen=True)
class ResponseSample:
    """A response or polarization value at a delay tuple."""

    delays: tuple[float, ...]
    value: complex


@dataclass(frozen=True)
class PathwayTerm:
    """One summand of the expanded nested commutators.

    ``sides`` records left/right action per interaction, ``components``
    the raising (+1) / lowering (-1) part of mu used there, and ``sign``
    the (-1)^(#right actions) from the commutator expansion.  The phase
    signature equals the component signs under the rotating-wave pairing
    rule stated in the module docstring.
    """

    sides: tuple[str, ...]
    components: tuple[int, ...]
    sign: int

    @property
    def order(self) -> int:
        return len(self.sides)

    @property
    def phase_signature(self) -> tuple[int, ...]:
        return self.components


def _check_order(order: int) -> None:
    if order not in _ORDERS:
        raise ValueError(f"order must be one of {_ORDERS}, got {order}")


def _check_delays(order: int, delays) -> tuple[float, ...]:
    delays = tuple(float(t) for t in delays)
    if len(delays) != order:
        raise ValueError(f"expected {order} delays, got {len(delays)}")
    if any(t < 0 for t in delays):
        raise ValueError("delays must be non-negative (causal response)")
    return delays


def normalize_pattern(pattern, order: int) -> tuple[int, ...]:
    pat = tuple(int(s) for s in pattern)
    if len(pat) != order:
        raise ValueError(f"pattern arity {len(pat)} does not match order {order}")
    if any(s not in (-1, 1) for s in pat):
        raise ValueError("pattern entries must be +1 or -1")
    return pat


def split_dipole(mu: np.ndarray, energies: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raising/lowering parts of mu by energy: mu_plus[i, j] != 0 only for
    eps_i > eps_j.  Elements between exactly degenerate levels are dropped
    from both parts (none occur in the models built here)."""
    up = energies[:, None] > energies[None, :]
    dn = energies[:, None] < energies[None, :]
    return np.where(up, mu, 0.0), np.where(dn, mu, 0.0)


def enumerate_pathways(order: int) -> list[PathwayTerm]:
    """All 4^order (side, component) terms, in a deterministic order.

    Terms that are structurally null for a particular input state simply
    evaluate to zero; nothing state-dependent is pruned here.
    """
    _check_order(order)
    terms = []
    for sides in product("LR", repeat=order):
        sign = (-1) ** sides.count("R")
        for comps in product((1, -1), repeat=order):
            terms.append(PathwayTerm(sides=sides, components=comps, sign=sign))
    return terms


def pathway_contribution(
    term: PathwayTerm,
    delays,
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
) -> complex:
    """Value of a single pathway term, including the (-1j)^n prefactor."""
    delays = _check_delays(term.order, delays)
    mu_up, mu_dn = split_dipole(model.mu, model.energies)
    state = state_matrix(rho_in)
    for side, comp, dt in zip(term.sides, term.components, delays):
        op = mu_up if comp > 0 else mu_dn
        state = op @ state if side == "L" else state @ op
        state = free_propagate(state, dt, model, noise)
    value = np.trace(model.mu @ state)
    return complex((-1j) ** term.order * term.sign * value)


def response_function(
    order: int,
    delays,
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
) -> complex:
    """Full n-th order response at the given delays (all Fourier components)."""
    _check_order(order)
    delays = _check_delays(order, delays)
    state = state_matrix(rho_in)
    mu = model.mu
    for dt in delays:
        state = -1j * (mu @ state - state @ mu)
        state = free_propagate(state, dt, model, noise)
    return complex(np.trace(mu @ state))


def select_phase_matched(
    order: int,
    pattern,
    delays,
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
) -> complex:
    """The single Fourier component of the response with the given pattern.

    Equals the sum of all pathway terms whose phase signature matches the
    pattern; summing over the 2^order patterns recovers
    ``response_function`` exactly.
    """
    _check_order(order)
    pattern = normalize_pattern(pattern, order)
    delays = _check_delays(order, delays)
    mu_up, mu_dn = split_dipole(model.mu, model.energies)
    state = state_matrix(rho_in)
    for s, dt in zip(pattern, delays):
        op = mu_up if s > 0 else mu_dn
        state = -1j * (op @ state - state @ op)
        state = free_propagate(state, dt, model, noise)
    return complex(np.trace(model.mu @ state))


def _sequence_pattern(pulses: Sequence[PulseEvent], pattern, order: int):
    if pattern is None:
        pattern = tuple(p.k_sign for p in pulses)
    return normalize_pattern(pattern, order)


def _check_pulse_sequence(pulses: Sequence[PulseEvent], order: int, mode: str) -> None:
    if len(pulses) != order:
        raise ValueError(f"expected {order} pulses, got {len(pulses)}")
    arrivals = [p.arrival for p in pulses]
    if any(b <= a for a, b in zip(arrivals, arrivals[1:])):
        raise ValueError("pulse arrivals must be strictly increasing")
    for p in pulses:
        if p.mode != mode:
            raise ValueError(f"all pulses must be {mode} for this polarization")


def polarization_impulsive(
    order: int,
    pulses: Sequence[PulseEvent],
    t: float,
    pattern,
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
) -> complex:
    """Semi-impulsive phase-matched polarization at detection time ``t``.

    P = (product of pulse areas) * S_pattern(delays), with delays taken
    from the arrival times and t_n = t - last arrival.
    """
    _check_order(order)
    _check_pulse_sequence(pulses, order, "impulsive")
    pattern = _sequence_pattern(pulses, pattern, order)
    if t < pulses[-1].arrival:
        raise ValueError("detection time precedes the last pulse")
    arrivals = [p.arrival for p in pulses]
    delays = tuple(b - a for a, b in zip(arrivals, arrivals[1:])) + (t - arrivals[-1],)
    scale = math.prod(p.area for p in pulses)
    return scale * select_phase_matched(order, pattern, delays, model, noise, rho_in)


# ---------------------------------------------------------------------------
# Finite-pulse convolution.
#
# In the element basis E_(i,j) the damped free evolution is diagonal with
# rates lam[(i,j)] = -1j*(eps_i - eps_j) - gamma[i, j], and each vertex is a
# linear transfer matrix.  Written over interaction times v1 <= ... <= vn the
# time-ordered integrand factorizes per vertex, so the midpoint sum reduces
# to chained prefix sums over the per-pulse grids (linear cost in the number
# of quadrature points, with causality enforced by the prefix boundaries).
# ---------------------------------------------------------------------------


def _element_rates(model: ExcitonModel, noise: Optional[DephasingModel]) -> np.ndarray:
    eps = model.energies
    gamma = np.zeros((model.dim, model.dim)) if noise is None else noise.gamma
    return ((-1j * (eps[:, None] - eps[None, :])) - gamma).reshape(-1)


def _commutator_transfer(op: np.ndarray) -> np.ndarray:
    """Matrix of X -> [op, X] over row-major vectorized X."""
    dim = op.shape[0]
    eye = np.eye(dim)
    return np.kron(op, eye) - np.kron(eye, op.T)


def _slot_amplitudes(pulse: PulseEvent, sign: int, v: np.ndarray) -> np.ndarray:
    env = (
        pulse.area
        / (pulse.width * math.sqrt(2.0 * math.pi))
        * np.exp(-0.5 * ((v - pulse.arrival) / pulse.width) ** 2)
    )
    return env * np.exp(-1j * sign * pulse.carrier * (v - pulse.arrival))


def _convolved_once(
    order: int,
    pulses: Sequence[PulseEvent],
    t: float,
    pattern: tuple[int, ...],
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
    step: float,
    truncation: float = 5.0,
) -> complex:
    lam = _element_rates(model, noise)
    mu_up, mu_dn = split_dipole(model.mu, model.energies)
    parts = [mu_up if s > 0 else mu_dn for s in pattern]
    rho = state_matrix(rho_in)
    x1 = (parts[0] @ rho - rho @ parts[0]).reshape(-1)
    transfers = [_commutator_transfer(parts[k]) for k in range(1, order)]
    w = model.mu.T.reshape(-1)

    grids, amps, weights = [], [], []
    for k, p in enumerate(pulses):
        lo = p.arrival - truncation * p.width
        hi = p.arrival + truncation * p.width
        m = max(4, math.ceil((hi - lo) / step))
        h = (hi - lo) / m
        v = lo + (np.arange(m) + 0.5) * h
        grids.append(v)
        amps.append(_slot_amplitudes(p, pattern[k], v))
        weights.append(h)

    # Stage 1: per-point vectors at the first vertex, then a running prefix.
    v1 = grids[0]
    stage = amps[0][:, None] * np.exp(np.outer(-v1, lam)) * x1[None, :]
    prefix = np.cumsum(stage, axis=0)
    prev_v = v1

    def prefix_at(v: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(prev_v, v, side="right") - 1
        out = np.zeros((v.size, lam.size), dtype=complex)
        ok = idx >= 0
        out[ok] = prefix[idx[ok]]
        return out

    for k in range(1, order - 1):
        v = grids[k]
        incoming = prefix_at(v) * np.exp(np.outer(v, lam))
        outgoing = incoming @ transfers[k - 1].T
        stage = amps[k][:, None] * np.exp(np.outer(-v, lam)) * outgoing
        prefix = np.cumsum(stage, axis=0)
        prev_v = v

    v = grids[order - 1]
    valid = v <= t
    if order == 1:
        incoming = np.broadcast_to(x1, (v.size, lam.size))
    else:
        incoming = prefix_at(v) * np.exp(np.outer(v, lam))
        incoming = incoming @ transfers[order - 2].T
    detected = (incoming * np.exp(np.outer(t - v, lam))) @ w
    total = np.sum(amps[order - 1][valid] * detected[valid])
    return complex(total * math.prod(weights) * (-1j) ** order)


def polarization_convolved(
    order: int,
    pulses: Sequence[PulseEvent],
    t: float,
    pattern,
    model: ExcitonModel,
    noise: Optional[DephasingModel],
    rho_in,
    step: Optional[float] = None,
) -> complex:
    """Phase-matched polarization by quadrature of the pulse convolution.

    Midpoint rule over each Gaussian envelope truncated at +/-5 widths.
    The result is checked by step halving: a relative change above 1e-4
    raises QuadratureError; the half-step value is returned otherwise.

    ``rho_in`` is taken as the state at the first interaction time, which
    is exact for inputs stationary under free evolution (any classical
    state).
    """
    _check_order(order)
    _check_pulse_sequence(pulses, order, "finite")
    pattern = _sequence_pattern(pulses, pattern, order)
    if step is None:
        step = min(p.width for p in pulses) / 25.0
    if not step > 0:
        raise ValueError("step must be positive")
    coarse = _convolved_once(order, pulses, t, pattern, model, noise, rho_in, step)
    fine = _convolved_once(order, pulses, t, pattern, model, noise, rho_in, step / 2.0)
    denom = max(abs(coarse), abs(fine), 1e-300)
    if abs(fine - coarse) / denom > 1e-4:
        raise QuadratureError(
            f"step {step:.3e} too coarse: halving changed the result by "
            f"{abs(fine - coarse) / denom:.3e} relative"
        )
    return fine


def spectrum_2d(
    t1_axis: np.ndarray,
    t3_axis: np.ndarray,
    values: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Discrete Fourier transform of a (t1, t3) sample grid at fixed t2.

    Returns (omega1, omega3, spectrum) with angular-frequency axes in
    ascending order.  The transform uses exp(-1j*omega*t) per axis, so an
    undamped coherence exp(-1j*w0*t1 - 1j*w0*t3) peaks at
    (omega1, omega3) = (-w0, -w0).
    """
    t1 = np.asarray(t1_axis, dtype=float)
    t3 = np.asarray(t3_axis, dtype=float)
    vals = np.asarray(values, dtype=complex)
    if vals.shape != (t1.size, t3.size):
        raise ValueError("values must have shape (len(t1_axis), len(t3_axis))")
    for name, axis in (("t1", t1), ("t3", t3)):
        if axis.size < 2:
            raise ValueError(f"{name} axis needs at least two points")
        d = np.diff(axis)
        if np.max(np.abs(d - d[0])) > 1e-9 * max(abs(d[0]), 1e-300):
            raise ValueError(f"{name} axis must be uniform")
    dt1 = t1[1] - t1[0]
    dt3 = t3[1] - t3[0]
    spec = np.fft.fftshift(np.fft.fft2(vals))
    omega1 = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(t1.size, d=dt1))
    omega3 = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(t3.size, d=dt3))
    return omega1, omega3, spec
