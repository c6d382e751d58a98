"""Operation-invasiveness witness built from phase-matched intensities.

The main experiment runs a three-pulse sequence twice: with the middle
pulse (the probed operation) and without it, keeping everything else
fixed.  The witness quantity is the intensity difference at the detector,

    d_rho = |P3|^2 - |P2|^2,

where P3 uses pulses (1, 2, 3) and P2 uses pulses (1, 3).  Control
experiments repeat the with/without pair on classical inputs, the
Hamiltonian eigenstates or known mixtures of them, using only pulses
(2, 3) versus (3):  d_j = |P2_j|^2 - |P1_j|^2.  The controls fix the
classical interval; d_rho outside [min_j d_j, max_j d_j] witnesses
nonclassicality (coherence in the eigenbasis) and simultaneously absorbs
classical disturbances of the apparatus into the bounds.

Classical-mixture semantics: an input given as a ClassicalMixture is a
statistical ensemble, so its detected intensity is the population-
weighted average of per-eigenstate intensities.  This makes
d(mixture) = sum_j p_j d_j exact, which is what the Gibbs-based control
solve inverts.  A DensityMatrix input is a single quantum state and its
intensity is |P(rho)|^2 directly.

Detection conventions for the assembled protocol:

  * "strict": the detector sits at the full phase-matched direction
    k_s = s1*k1 + s2*k2 + s3*k3.  A branch that omits a pulse whose slot
    carries a non-zero sign cannot radiate there, so every reduced branch
    contributes exactly zero.  The ideal protocol then collapses to the
    single condition |P3| != 0 (controls identically zero).
  * "per_branch": each reduced branch is read out at its own restricted
    sign pattern (the slots its pulses occupy).  Lower-order signals
    survive, so controls are generally negative for a parity-tagged
    model (d_j = -|P1_j|^2).

Both are exposed; ``run_main_experiment`` / ``run_control_experiment``
implement the per-branch readout, ``run_protocol`` defaults to strict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .dynamics import DephasingModel
from .models import ClassicalMixture, ExcitonModel, eigenstate, gibbs_populations
from .operators import DensityMatrix, state_matrix
from .response import (
    PulseEvent,
    normalize_pattern,
    polarization_convolved,
    polarization_impulsive,
    select_phase_matched,
)


class InputNotClassicalError(ValueError):
    """Control experiments require an eigenstate or a classical mixture."""


class IllConditionedError(RuntimeError):
    """The control observations do not determine per-level values."""


InputState = Union[DensityMatrix, ClassicalMixture, str, int, np.ndarray]

_MAIN_WITH = (0, 1, 2)
_MAIN_WITHOUT = (0, 2)
_CONTROL_WITH = (1, 2)
_CONTROL_WITHOUT = (2,)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one with/without pair needs.

    ``pattern`` holds the three slot signs of the full sequence; reduced
    branches restrict it to the slots of the pulses they keep.  The
    with-O and without-O branches share all parameters except the
    presence of pulse 2.  ``bypass_first`` replaces pulse 1 by the
    identity, so the input state enters the sequence unchanged (used for
    classical-input soundness checks); the branches then reduce to
    pulses (2, 3) versus (3).
    """

    model: ExcitonModel
    noise: Optional[DephasingModel]
    pulses: tuple[PulseEvent, PulseEvent, PulseEvent]
    detect_time: float
    input_state: InputState
    pattern: tuple[int, int, int] = (-1, 1, 1)
    mode: str = "impulsive"
    semi_impulsive: bool = False
    bypass_first: bool = False
    quad_step: Optional[float] = None

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if len(pulses) != 3:
            raise ValueError("an experiment uses exactly three pulses")
        arrivals = [p.arrival for p in pulses]
        if any(b <= a for a, b in zip(arrivals, arrivals[1:])):
            raise ValueError("pulse arrivals must be strictly increasing")
        if self.detect_time < arrivals[-1]:
            raise ValueError("detection time precedes the last pulse")
        if self.mode not in ("impulsive", "convolved"):
            raise ValueError(f"unknown mode {self.mode!r}")
        expected = "impulsive" if self.mode == "impulsive" else "finite"
        if any(p.mode != expected for p in pulses):
            raise ValueError(f"{self.mode} mode requires {expected} pulses")
        if self.semi_impulsive and self.mode != "impulsive":
            raise ValueError("semi-impulsive readout requires impulsive mode")
        object.__setattr__(self, "pulses", pulses)
        object.__setattr__(self, "pattern", normalize_pattern(self.pattern, 3))


def _branch_polarization(spec: ExperimentSpec, slots: tuple[int, ...], state) -> complex:
    order = len(slots)
    pulses = tuple(spec.pulses[i] for i in slots)
    pattern = tuple(spec.pattern[i] for i in slots)
    if spec.mode == "convolved":
        return polarization_convolved(
            order, pulses, spec.detect_time, pattern, spec.model, spec.noise, state,
            step=spec.quad_step,
        )
    if spec.semi_impulsive:
        arrivals = [p.arrival for p in pulses]
        delays = tuple(b - a for a, b in zip(arrivals, arrivals[1:]))
        delays += (spec.detect_time - arrivals[-1],)
        return select_phase_matched(order, pattern, delays, spec.model, spec.noise, state)
    return polarization_impulsive(
        order, pulses, spec.detect_time, pattern, spec.model, spec.noise, state
    )


def _branch_intensity(spec: ExperimentSpec, slots: tuple[int, ...]) -> float:
    """|P|^2 of one branch; mixtures average per-eigenstate intensities."""
    inp = spec.input_state
    if isinstance(inp, ClassicalMixture):
        if inp.dim != spec.model.dim:
            raise ValueError("mixture dimension does not match the model")
        total = 0.0
        for j, p in enumerate(inp.populations):
            if p == 0.0:
                continue
            value = _branch_polarization(spec, slots, eigenstate(spec.model, j))
            total += float(p) * abs(value) ** 2
        return total
    if isinstance(inp, (str, int, np.integer)) and not isinstance(inp, np.ndarray):
        state = eigenstate(spec.model, inp)
    else:
        state = inp
    return abs(_branch_polarization(spec, slots, state)) ** 2


def run_main_experiment(spec: ExperimentSpec) -> float:
    """d_rho = |P3|^2 - |P2|^2 for the configured input.

    With ``bypass_first`` the pair degrades to |P2|^2 - |P1|^2 on the raw
    input state, the control geometry applied to an arbitrary input.
    """
    if spec.bypass_first:
        with_slots, without_slots = _CONTROL_WITH, _CONTROL_WITHOUT
    else:
        with_slots, without_slots = _MAIN_WITH, _MAIN_WITHOUT
    return _branch_intensity(spec, with_slots) - _branch_intensity(spec, without_slots)


def _require_classical(spec: ExperimentSpec) -> ExperimentSpec:
    inp = spec.input_state
    if isinstance(inp, ClassicalMixture):
        return spec
    if isinstance(inp, (str, int, np.integer)) and not isinstance(inp, np.ndarray):
        return spec
    matrix = state_matrix(inp)
    off = matrix - np.diag(np.diag(matrix))
    if np.max(np.abs(off)) > 1e-10:
        raise InputNotClassicalError(
            "control experiments need an eigenstate or a diagonal (classical) state"
        )
    mixture = ClassicalMixture(np.real(np.diag(matrix)))
    return ExperimentSpec(
        model=spec.model, noise=spec.noise, pulses=spec.pulses,
        detect_time=spec.detect_time, input_state=mixture, pattern=spec.pattern,
        mode=spec.mode, semi_impulsive=spec.semi_impulsive,
        bypass_first=spec.bypass_first, quad_step=spec.quad_step,
    )


def run_control_experiment(spec: ExperimentSpec) -> float:
    """d_j = |P2_j|^2 - |P1_j|^2 for a classical input (pulses 2,3 vs 3)."""
    spec = _require_classical(spec)
    return _branch_intensity(spec, _CONTROL_WITH) - _branch_intensity(spec, _CONTROL_WITHOUT)


@dataclass(frozen=True)
class ControlSolve:
    """Per-level control values recovered from mixture observations."""

    values: np.ndarray
    residual: float
    cond: float


def solve_controls(
    observations: Sequence[tuple[Sequence[float], float]],
    cond_limit: float = 1e8,
) -> ControlSolve:
    """Solve P d = m for per-level d from (populations, measured d) pairs.

    Least squares; requires at least as many observations as levels and a
    population matrix with condition number below ``cond_limit`` (two
    Gibbs inputs at nearly equal temperatures are the classic failure).
    """
    if not observations:
        raise ValueError("at least one observation is required")
    pops = np.array([np.asarray(p, dtype=float) for p, _ in observations])
    measured = np.array([float(m) for _, m in observations])
    n_levels = pops.shape[1]
    if pops.shape[0] < n_levels:
        raise ValueError(
            f"need at least {n_levels} observations for {n_levels} levels, got {pops.shape[0]}"
        )
    cond = float(np.linalg.cond(pops))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedError(
            f"population matrix condition number {cond:.3e} exceeds {cond_limit:.1e}"
        )
    values, *_ = np.linalg.lstsq(pops, measured, rcond=None)
    residual = float(np.linalg.norm(pops @ values - measured))
    return ControlSolve(values=values, residual=residual, cond=cond)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of the witness evaluation plus convention metadata."""

    d_rho: float
    controls: dict[str, float]
    lower: float
    upper: float
    violated: bool
    margin: float
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d_rho": self.d_rho,
            "controls": dict(self.controls),
            "lower": self.lower,
            "upper": self.upper,
            "violated": self.violated,
            "margin": self.margin,
            "notes": dict(self.notes),
        }


def evaluate_witness(
    d_rho: float,
    controls: Mapping[str, float],
    tol: float = 1e-9,
    notes: Optional[dict] = None,
) -> WitnessReport:
    """Compare d_rho against the classical interval spanned by the controls.

    margin = max(lower - d_rho, d_rho - upper, 0); the report flags a
    violation when the margin exceeds ``tol``.  Only min and max of the
    controls matter, so relabeling them cannot change the outcome.
    """
    if not controls:
        raise ValueError("controls must be non-empty")
    lower = min(controls.values())
    upper = max(controls.values())
    margin = max(lower - d_rho, d_rho - upper, 0.0)
    return WitnessReport(
        d_rho=float(d_rho),
        controls={str(k): float(v) for k, v in controls.items()},
        lower=float(lower),
        upper=float(upper),
        violated=bool(margin > tol),
        margin=float(margin),
        notes=dict(notes or {}),
    )


@dataclass(frozen=True)
class ProtocolConfig:
    """Full protocol: main experiment, n+1 controls, evaluation.

    ``control_strategy`` is either "eigenstates" (one control per level)
    or a sequence of inverse temperatures; the latter measures Gibbs
    mixtures and solves the linear system for per-level values.
    """

    model: ExcitonModel
    noise: Optional[DephasingModel]
    pulses: tuple[PulseEvent, PulseEvent, PulseEvent]
    detect_time: float
    input_state: InputState = "g"
    pattern: tuple[int, int, int] = (-1, 1, 1)
    control_strategy: Union[str, Sequence[float]] = "eigenstates"
    detection: str = "strict"
    mode: str = "impulsive"
    semi_impulsive: bool = False
    bypass_first: bool = False
    quad_step: Optional[float] = None
    tol: float = 1e-9

    def __post_init__(self):
        if self.detection not in ("strict", "per_branch"):
            raise ValueError(f"unknown detection convention {self.detection!r}")
        if isinstance(self.control_strategy, str):
            if self.control_strategy != "eigenstates":
                raise ValueError("control_strategy must be 'eigenstates' or a list of betas")
        else:
            betas = tuple(float(b) for b in self.control_strategy)
            if len(betas) < self.model.dim:
                raise ValueError(
                    f"need at least {self.model.dim} Gibbs temperatures, got {len(betas)}"
                )
            object.__setattr__(self, "control_strategy", betas)


def _spec_for(config: ProtocolConfig, input_state: InputState, bypass: bool) -> ExperimentSpec:
    return ExperimentSpec(
        model=config.model, noise=config.noise, pulses=config.pulses,
        detect_time=config.detect_time, input_state=input_state,
        pattern=config.pattern, mode=config.mode,
        semi_impulsive=config.semi_impulsive, bypass_first=bypass,
        quad_step=config.quad_step,
    )


def _strict_d(config: ProtocolConfig, input_state: InputState, slots_pairs) -> float:
    """Branch difference with every pulse-dropping branch pinned to zero.

    At the full k_s direction a branch can only radiate if each slot with
    a non-zero sign is actually occupied; sign patterns here have no zero
    entries, so reduced branches vanish identically.
    """
    with_slots, without_slots = slots_pairs
    spec = _spec_for(config, input_state, bypass=False)
    upper = _branch_intensity(spec, with_slots) if len(with_slots) == 3 else 0.0
    lower = _branch_intensity(spec, without_slots) if len(without_slots) == 3 else 0.0
    return upper - lower


def _main_d(config: ProtocolConfig) -> float:
    slots = (_CONTROL_WITH, _CONTROL_WITHOUT) if config.bypass_first else (_MAIN_WITH, _MAIN_WITHOUT)
    if config.detection == "strict":
        return _strict_d(config, config.input_state, slots)
    return run_main_experiment(_spec_for(config, config.input_state, config.bypass_first))


def _control_d(config: ProtocolConfig, input_state: InputState) -> float:
    if config.detection == "strict":
        return _strict_d(config, input_state, (_CONTROL_WITH, _CONTROL_WITHOUT))
    return run_control_experiment(_spec_for(config, input_state, bypass=True))


def run_protocol(config: ProtocolConfig) -> WitnessReport:
    """Run the main experiment and all controls, then evaluate the witness.

    Deterministic for a given configuration.  When controls come from
    Gibbs observations the report records the solve residual and the
    condition number, making apparatus-error accounting visible.
    """
    d_rho = _main_d(config)
    model = config.model
    notes: dict = {
        "pattern": list(config.pattern),
        "pattern_convention": "(-1,+1,+1) means k_s = -k1+k2+k3",
        "prefactor_convention": "-1j per interaction vertex; intensities |P|^2",
        "detection": config.detection,
        "mode": config.mode,
        "semi_impulsive": config.semi_impulsive,
        "tolerance": config.tol,
    }
    if config.control_strategy == "eigenstates":
        controls = {
            label: _control_d(config, label) for label in model.labels
        }
    else:
        observations = []
        for beta in config.control_strategy:
            mixture = gibbs_populations(model, beta)
            observations.append((mixture.populations, _control_d(config, mixture)))
        solve = solve_controls(observations)
        controls = {label: float(v) for label, v in zip(model.labels, solve.values)}
        notes["control_gibbs_betas"] = [float(b) for b in config.control_strategy]
        notes["control_solve_residual"] = solve.residual
        notes["control_solve_cond"] = solve.cond
    return evaluate_witness(d_rho, controls, tol=config.tol, notes=notes)
