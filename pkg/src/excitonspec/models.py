"""Exciton Hamiltonians, transition dipoles and classical input states.

Energies are angular frequencies with hbar = 1; dipole magnitudes are
scalars (no orientational structure).  Models are stored in the exciton
eigenbasis, ordered by ascending energy, so free evolution is diagonal.

The dimer Hamiltonian in the site basis is

    H = w_A n_A + w_B n_B + J (a_A^+ a_B + a_B^+ a_A)

with hard-core (two-level) site excitations.  Its eigenbasis is
(g, beta, alpha, f): the ground state, the lower and upper single-exciton
states, and the doubly excited state at w_f = w_A + w_B.  The transition
dipole is mu = mu_A (a_A + a_A^+) + mu_B (a_B + a_B^+) rotated into the
exciton basis; it has no diagonal (permanent) part, so levels carry a
definite excitation-number parity and even-order response vanishes for
classical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .operators import DensityMatrix, validate_density


class DegenerateModelError(ValueError):
    """Uncoupled degenerate dimer: the single-exciton block has no unique eigenbasis."""


@dataclass(frozen=True)
class DimerParams:
    """Site energies, coupling and site dipole magnitudes of a dimer."""

    omega_a: float
    omega_b: float
    j_coupling: float
    mu_a: float = 1.0
    mu_b: float = 1.0

    def __post_init__(self):
        if not (self.omega_a > 0 and self.omega_b > 0):
            raise ValueError("site energies must be positive")
        for name in ("omega_a", "omega_b", "j_coupling", "mu_a", "mu_b"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class DimerSpectrum:
    """Closed-form single-exciton spectrum of a dimer.

    ``theta`` is the mixing angle of the upper exciton,
    |alpha> = cos(theta)|A> + sin(theta)|B>.  With omega_a >= omega_b it
    lies in (-pi/4, pi/4]; for omega_a < omega_b the branch extends to
    (-pi/2, pi/2] so that omega_alpha >= omega_beta always holds.
    """

    omega_bar: float
    delta: float
    theta: float
    omega_alpha: float
    omega_beta: float
    omega_f: float


@dataclass(frozen=True)
class ExcitonModel:
    """Hamiltonian + dipole operator in the exciton eigenbasis.

    ``parity`` tags each level with its excitation-number parity (+1 even,
    -1 odd).  When present, h0 must be block diagonal across parity and mu
    must couple opposite parities only.
    """

    h0: np.ndarray
    mu: np.ndarray
    labels: tuple[str, ...]
    parity: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        h0 = np.array(self.h0, dtype=complex)
        mu = np.array(self.mu, dtype=complex)
        if h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
            raise ValueError("h0 must be square")
        if mu.shape != h0.shape:
            raise ValueError("mu and h0 must have the same shape")
        if len(self.labels) != h0.shape[0]:
            raise ValueError("one label per level is required")
        scale = 1.0 + float(np.max(np.abs(h0))) if h0.size else 1.0
        if np.max(np.abs(h0 - h0.conj().T)) > 1e-12 * scale:
            raise ValueError("h0 must be Hermitian")
        mu_scale = 1.0 + float(np.max(np.abs(mu))) if mu.size else 1.0
        if np.max(np.abs(mu - mu.conj().T)) > 1e-12 * mu_scale:
            raise ValueError("mu must be Hermitian")
        if self.parity is not None:
            par = tuple(int(p) for p in self.parity)
            if len(par) != h0.shape[0] or any(p not in (-1, 1) for p in par):
                raise ValueError("parity tags must be +1/-1, one per level")
            same = np.equal.outer(par, par)
            if np.max(np.abs(np.where(same, 0.0, h0))) > 1e-12 * scale:
                raise ValueError("h0 must be block diagonal across parity tags")
            if np.max(np.abs(np.where(same, mu, 0.0))) > 1e-12 * mu_scale:
                raise ValueError("mu must couple opposite parities only")
            object.__setattr__(self, "parity", par)
        h0.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def energies(self) -> np.ndarray:
        """Real diagonal of h0 (eigenenergies when h0 is diagonal)."""
        return np.real(np.diag(self.h0)).copy()

    def level_index(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            idx = int(label)
            if not 0 <= idx < self.dim:
                raise KeyError(f"level index {idx} out of range")
            return idx
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"unknown level label {label!r}; known: {self.labels}") from None


@dataclass(frozen=True)
class ClassicalMixture:
    """Populations over exciton eigenstates; non-negative, summing to one."""

    populations: np.ndarray

    def __post_init__(self):
        p = np.array(self.populations, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("populations must be a non-empty vector")
        if np.min(p) < -1e-12:
            raise ValueError("populations must be non-negative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"populations must sum to 1, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)

    @property
    def dim(self) -> int:
        return self.populations.size

    def as_density(self) -> DensityMatrix:
        return validate_density(np.diag(self.populations.astype(complex)))


def diagonalize_dimer(params: DimerParams) -> DimerSpectrum:
    """Closed-form diagonalization of the dimer's single-exciton block.

    omega_{alpha,beta} = omega_bar +/- delta*sec(2*theta) with
    theta = arctan(J/delta)/2; the delta = 0 case is the continuous
    extension theta -> pi/4 (sign of J), omega_{alpha,beta} = omega_bar +/- |J|.
    """
    delta = 0.5 * (params.omega_a - params.omega_b)
    omega_bar = 0.5 * (params.omega_a + params.omega_b)
    j = params.j_coupling
    if delta == 0.0 and j == 0.0:
        raise DegenerateModelError(
            "omega_a == omega_b with J == 0: single-exciton block is degenerate"
        )
    theta = 0.5 * math.atan2(j, delta)
    half_split = math.hypot(delta, j)  # equals delta*sec(2*theta) on this branch
    return DimerSpectrum(
        omega_bar=omega_bar,
        delta=delta,
        theta=theta,
        omega_alpha=omega_bar + half_split,
        omega_beta=omega_bar - half_split,
        omega_f=params.omega_a + params.omega_b,
    )


def build_dimer(params: DimerParams) -> ExcitonModel:
    """Four-level dimer model in the exciton basis (g, beta, alpha, f).

    h0 = diag(0, omega_beta, omega_alpha, omega_f) from the closed-form
    spectrum; mu is the site dipole rotated by the mixing angle.  Parity
    tags are (even, odd, odd, even).
    """
    spec = diagonalize_dimer(params)
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    mu_a, mu_b = params.mu_a, params.mu_b
    mu = np.zeros((4, 4), dtype=complex)
    mu[0, 1] = mu[1, 0] = -s * mu_a + c * mu_b  # g <-> beta
    mu[0, 2] = mu[2, 0] = c * mu_a + s * mu_b  # g <-> alpha
    mu[1, 3] = mu[3, 1] = c * mu_a - s * mu_b  # beta <-> f
    mu[2, 3] = mu[3, 2] = s * mu_a + c * mu_b  # alpha <-> f
    h0 = np.diag(
        np.array([0.0, spec.omega_beta, spec.omega_alpha, spec.omega_f], dtype=complex)
    )
    return ExcitonModel(
        h0=h0, mu=mu, labels=("g", "beta", "alpha", "f"), parity=(1, -1, -1, 1)
    )


def build_general(
    site_energies: Sequence[float],
    couplings: np.ndarray,
    dipoles: Sequence[float],
    two_exciton: bool = False,
) -> ExcitonModel:
    """Ground state + numerically diagonalized single-exciton manifold.

    Parameters
    ----------
    site_energies : positive site excitation energies, length n.
    couplings : symmetric n x n matrix with zero diagonal.
    dipoles : site transition-dipole magnitudes, length n.
    two_exciton : include the doubly excited level (n == 2 only).

    Eigenvector signs are fixed by making each eigenvector's largest
    component positive, which reproduces the closed-form dimer convention
    away from the equal-mixing point.
    """
    energies = np.asarray(site_energies, dtype=float)
    coup = np.asarray(couplings, dtype=float)
    dip = np.asarray(dipoles, dtype=float)
    n = energies.size
    if n == 0:
        raise ValueError("at least one site is required")
    if np.min(energies) <= 0:
        raise ValueError("site energies must be positive")
    if coup.shape != (n, n):
        raise ValueError(f"couplings must be {n}x{n}")
    if not np.allclose(coup, coup.T, atol=1e-12):
        raise ValueError("couplings must be symmetric")
    if np.max(np.abs(np.diag(coup))) > 0:
        raise ValueError("coupling diagonal must be zero (site energies are separate)")
    if dip.shape != (n,):
        raise ValueError("one dipole magnitude per site is required")
    if two_exciton and n != 2:
        raise ValueError("two-exciton manifold is only supported for n == 2")

    block = np.diag(energies) + coup
    evals, vecs = np.linalg.eigh(block)
    for k in range(n):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, k] = -col

    dim = 1 + n + (1 if two_exciton else 0)
    h0 = np.zeros((dim, dim), dtype=complex)
    mu = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        h0[1 + k, 1 + k] = evals[k]
        amp = float(dip @ vecs[:, k])
        mu[0, 1 + k] = mu[1 + k, 0] = amp
    labels = ["g"] + [f"e{k + 1}" for k in range(n)]
    parity = [1] + [-1] * n
    if two_exciton:
        f = dim - 1
        h0[f, f] = energies.sum()
        # mu couples |f> to exciton k through the *other* site's dipole.
        swapped = dip[::-1]
        for k in range(n):
            amp = float(swapped @ vecs[:, k])
            mu[1 + k, f] = mu[f, 1 + k] = amp
        labels.append("f")
        parity.append(1)
    return ExcitonModel(h0=h0, mu=mu, labels=tuple(labels), parity=tuple(parity))


def gibbs_populations(model: ExcitonModel, beta: float) -> ClassicalMixture:
    """Thermal populations exp(-beta*eps_nu)/Z over the exciton levels."""
    if not beta >= 0:
        raise ValueError("beta must be non-negative")
    eps = model.energies
    if math.isinf(beta):
        w = (eps == eps.min()).astype(float)
    else:
        w = np.exp(-beta * (eps - eps.min()))
    return ClassicalMixture(w / w.sum())


def gibbs_state(model: ExcitonModel, beta: float) -> DensityMatrix:
    """Equilibrium Gibbs state, diagonal in the exciton basis."""
    return gibbs_populations(model, beta).as_density()


def eigenstate(model: ExcitonModel, label) -> DensityMatrix:
    """Projector |nu><nu| for the level named or indexed by ``label``."""
    idx = model.level_index(label)
    proj = np.zeros((model.dim, model.dim), dtype=complex)
    proj[idx, idx] = 1.0
    return validate_density(proj)
