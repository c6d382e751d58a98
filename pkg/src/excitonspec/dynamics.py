"""Time evolution between pulses and the nonperturbative oracle.

In the exciton eigenbasis the dissipative free evolution is diagonal in
Liouville space,

    d/dt sigma[n, m] = -1j*(eps_n - eps_m)*sigma[n, m] - gamma[n, m]*sigma[n, m],

so `free_propagate` applies the exact closed-form element-wise factor.
Uniform dephasing damps every coherence at the same rate and leaves
populations unchanged (gamma has zero diagonal); population decay is an
explicit opt-in because it breaks trace preservation.

`nonperturbative_evolve` integrates the full driven master equation with
a fixed-step classical 4th-order Runge-Kutta scheme.  It never invokes
perturbation theory and serves as an independent oracle for the
perturbative response pipeline.

Interaction-vertex convention: each impulsive field interaction
contributes -1j*[mu, sigma].  Overall (-1j)^n prefactors cancel in every
witness quantity, which only uses squared moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .models import ExcitonModel
from .operators import state_matrix


class StepSizeError(RuntimeError):
    """Fixed-step integration became inaccurate or unstable."""


@dataclass(frozen=True)
class DephasingModel:
    """Element-wise relaxation rates gamma[n, m] in the stored basis.

    gamma must be symmetric and non-negative.  A non-zero diagonal
    (population decay) must be requested explicitly.
    """

    gamma: np.ndarray
    allow_population_decay: bool = False

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("gamma must be a square matrix")
        if not np.all(np.isfinite(g)):
            raise ValueError("gamma entries must be finite")
        if np.min(g) < 0:
            raise ValueError("gamma entries must be non-negative")
        if not np.allclose(g, g.T, atol=1e-12):
            raise ValueError("gamma must be symmetric")
        if not self.allow_population_decay and np.max(np.abs(np.diag(g))) > 0:
            raise ValueError(
                "gamma diagonal must be zero (pure dephasing); "
                "pass allow_population_decay=True to enable population decay"
            )
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    @property
    def preserves_trace(self) -> bool:
        return bool(np.max(np.abs(np.diag(self.gamma))) == 0.0)

    @classmethod
    def none(cls, dim: int) -> "DephasingModel":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def uniform(cls, dim: int, rate: float) -> "DephasingModel":
        """All coherences damp at ``rate``; populations are untouched."""
        if rate < 0:
            raise ValueError("rate must be non-negative")
        g = rate * (np.ones((dim, dim)) - np.eye(dim))
        return cls(g)


@dataclass(frozen=True)
class FieldProfile:
    """Real field amplitude with compact support [t_min, t_max]."""

    amplitude: Callable[[float], float]
    t_min: float
    t_max: float

    def __call__(self, t: float) -> float:
        if t < self.t_min or t > self.t_max:
            return 0.0
        value = float(self.amplitude(t))
        if not math.isfinite(value):
            raise ValueError(f"field amplitude not finite at t={t}")
        return value

    @classmethod
    def from_pulses(
        cls,
        pulses: Sequence,
        scale: float = 1.0,
        phases: Optional[Sequence[float]] = None,
        truncation: float = 5.0,
    ) -> "FieldProfile":
        """Sum of Gaussian cosine pulses.

        Each pulse contributes
        scale * area/(width*sqrt(2*pi)) * exp(-(t-arrival)^2/(2*width^2))
              * cos(carrier*(t-arrival) - phase).
        The envelope integrates to ``scale * area``.
        """
        specs = []
        for k, p in enumerate(pulses):
            if p.width is None or not p.width > 0:
                raise ValueError("from_pulses requires finite pulses with width > 0")
            phase = 0.0 if phases is None else float(phases[k])
            specs.append((p.arrival, p.area, p.width, p.carrier, phase))
        lo = min(a - truncation * w for a, _, w, _, _ in specs)
        hi = max(a + truncation * w for a, _, w, _, _ in specs)

        def amplitude(t: float) -> float:
            total = 0.0
            for arrival, area, width, carrier, phase in specs:
                x = (t - arrival) / width
                if abs(x) > truncation:
                    continue
                env = area / (width * math.sqrt(2.0 * math.pi)) * math.exp(-0.5 * x * x)
                total += env * math.cos(carrier * (t - arrival) - phase)
            return scale * total

        return cls(amplitude=amplitude, t_min=lo, t_max=hi)


def _require_diagonal(model: ExcitonModel) -> np.ndarray:
    h0 = model.h0
    scale = 1.0 + float(np.max(np.abs(h0)))
    off = h0 - np.diag(np.diag(h0))
    if np.max(np.abs(off)) > 1e-12 * scale:
        raise ValueError("free propagation requires h0 diagonal in the stored basis")
    return model.energies


def free_propagate(
    state,
    dt: float,
    model: ExcitonModel,
    noise: Optional[DephasingModel] = None,
) -> np.ndarray:
    """Exact dissipative free evolution over ``dt`` in the eigenbasis.

    sigma[n, m] -> sigma[n, m] * exp(-1j*(eps_n - eps_m)*dt - gamma[n, m]*dt)
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    sigma = state_matrix(state)
    eps = _require_diagonal(model)
    if sigma.shape != model.h0.shape:
        raise ValueError("state dimension does not match the model")
    bohr = eps[:, None] - eps[None, :]
    gamma = 0.0 if noise is None else noise.gamma
    if noise is not None and noise.dim != model.dim:
        raise ValueError("noise dimension does not match the model")
    return sigma * np.exp((-1j * bohr - gamma) * dt)


def apply_impulsive_interaction(state, model: ExcitonModel) -> np.ndarray:
    """One perturbative interaction vertex: -1j*[mu, sigma]."""
    sigma = state_matrix(state)
    if sigma.shape != model.mu.shape:
        raise ValueError("state dimension does not match the model")
    return -1j * (model.mu @ sigma - sigma @ model.mu)


def nonperturbative_evolve(
    rho0,
    field: FieldProfile,
    model: ExcitonModel,
    noise: Optional[DephasingModel] = None,
    step: float = None,
    t_end: float = 0.0,
    t_start: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate d/dt sigma = -1j*[h0 + mu*E(t), sigma] - gamma o sigma.

    Fixed-step classical RK4 for bit-for-bit reproducibility; the step is
    snapped so the span divides evenly.  Default step is one fiftieth of
    the shortest Bohr period.  Trace drift beyond 1e-8 (checked when
    gamma preserves the trace) or non-finite entries raise StepSizeError.

    Returns ``(times, states)`` with states[k] the density matrix at
    times[k]; states[0] is the initial state.
    """
    sigma = state_matrix(rho0)
    if sigma.shape != model.h0.shape:
        raise ValueError("state dimension does not match the model")
    gamma = np.zeros((model.dim, model.dim)) if noise is None else noise.gamma
    check_trace = noise is None or noise.preserves_trace
    if t_start is None:
        t_start = min(0.0, field.t_min)
    span = float(t_end) - float(t_start)
    if span <= 0:
        raise ValueError("t_end must exceed t_start")
    if step is None:
        omega_max = float(np.max(np.abs(model.energies)))
        step = (2.0 * math.pi / omega_max) / 50.0 if omega_max > 0 else span / 100.0
    if not step > 0:
        raise ValueError("step must be positive")
    n_steps = max(1, round(span / step))
    h = span / n_steps

    h0 = model.h0
    mu = model.mu

    def rhs(t: float, s: np.ndarray) -> np.ndarray:
        ham = h0 + mu * field(t)
        return -1j * (ham @ s - s @ ham) - gamma * s

    times = t_start + h * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, model.dim, model.dim), dtype=complex)
    states[0] = sigma
    trace0 = complex(np.trace(sigma)).real
    for k in range(n_steps):
        t = times[k]
        k1 = rhs(t, sigma)
        k2 = rhs(t + 0.5 * h, sigma + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, sigma + 0.5 * h * k2)
        k4 = rhs(t + h, sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(sigma)):
            raise StepSizeError(f"state diverged at t={times[k + 1]:.6g}; reduce the step")
        if check_trace:
            drift = abs(complex(np.trace(sigma)).real - trace0)
            if drift > 1e-8:
                raise StepSizeError(
                    f"trace drift {drift:.3e} at t={times[k + 1]:.6g}; reduce the step"
                )
        states[k + 1] = sigma
    return times, states
