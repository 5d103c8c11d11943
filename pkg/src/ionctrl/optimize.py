"""Derivative-free learning-control search over multi-color pulses.

The parameter space is deliberately small: one amplitude and one phase
per color (per segment, when more than one segment is allowed) plus the
total duration.  An elitist evolutionary strategy with decaying Gaussian
mutation searches it; every run is bit-reproducible from its seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import PulseSchedule, Segment, propagate
from .model import SystemModel

__all__ = [
    "state_fidelity",
    "spin_fidelity",
    "Objective",
    "PulseParams",
    "SearchConfig",
    "GenerationRecord",
    "optimize",
]

log = logging.getLogger(__name__)


def state_fidelity(psi: np.ndarray, target: np.ndarray) -> float:
    """Squared overlap |<target|psi>|^2 of two normalized states."""
    psi = np.asarray(psi, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if psi.shape != target.shape:
        raise ValueError(f"dimension mismatch: {psi.shape} vs {target.shape}")
    for name, vec in (("psi", psi), ("target", target)):
        if abs(np.linalg.norm(vec) - 1.0) > 1e-8:
            raise ValueError(f"{name} is not normalized")
    return float(abs(np.vdot(target, psi)) ** 2)


def spin_fidelity(psi: np.ndarray, target_spin: np.ndarray, basis) -> tuple[float, float]:
    """Fidelity of the reduced spin state against a spin-space target,
    plus the purity of the reduced state.

    The phonon index is traced out; purity 1 means the motion factors
    from the spin state exactly.
    """
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("psi is not normalized")
    spin_dim = 2**basis.ion_count
    if psi.shape != (spin_dim * basis.fock_cutoff,):
        raise ValueError("psi does not live on the given basis")
    target_spin = np.asarray(target_spin, dtype=complex)
    if target_spin.shape != (spin_dim,):
        raise ValueError(f"target_spin must have dimension {spin_dim}")
    if abs(np.linalg.norm(target_spin) - 1.0) > 1e-8:
        raise ValueError("target_spin is not normalized")
    amp = psi.reshape(spin_dim, basis.fock_cutoff)
    rho = amp @ amp.conj().T
    fidelity = float(np.real(target_spin.conj() @ rho @ target_spin))
    purity = float(np.real(np.trace(rho @ rho)))
    return fidelity, purity


@dataclass(frozen=True)
class Objective:
    """State-fidelity or reduced-spin-fidelity target from a fixed
    initial state.  For spin targets the score is the fidelity when the
    reduced state is pure enough (purity >= purity_floor) and
    fidelity * purity otherwise, so factorization of the motion is part
    of what the search must achieve."""

    kind: str  # "state_fidelity" | "spin_fidelity"
    target: np.ndarray
    initial: np.ndarray
    purity_floor: float = 0.99

    def __post_init__(self):
        if self.kind not in ("state_fidelity", "spin_fidelity"):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if abs(np.linalg.norm(self.initial) - 1.0) > 1e-8:
            raise ValueError("initial state is not normalized")
        if abs(np.linalg.norm(self.target) - 1.0) > 1e-8:
            raise ValueError("target is not normalized")

    def score(self, psi: np.ndarray, basis) -> float:
        if self.kind == "state_fidelity":
            return state_fidelity(psi, self.target)
        fid, purity = spin_fidelity(psi, self.target, basis)
        return fid if purity >= self.purity_floor else fid * purity


@dataclass(frozen=True)
class PulseParams:
    """One candidate pulse: per-segment amplitudes and phases for each
    color, plus the total duration (segments share it equally)."""

    amplitudes: tuple[tuple[float, ...], ...]
    phases: tuple[tuple[float, ...], ...]
    duration: float

    def to_schedule(self, colors) -> PulseSchedule:
        n_seg = len(self.amplitudes)
        seg_time = self.duration / n_seg
        segments = []
        for amps, phis in zip(self.amplitudes, self.phases):
            realized = tuple(
                replace(color, rabi=float(a), phase=float(p % (2 * np.pi)))
                for color, a, p in zip(colors, amps, phis)
            )
            segments.append(Segment(colors=realized, duration=seg_time))
        return PulseSchedule(segments=tuple(segments))


@dataclass(frozen=True)
class SearchConfig:
    omega_max: float
    t_max: float
    segments: int = 1
    population: int = 32
    elite: int = 8
    generations: int = 200
    mutation_scale: float = 0.25
    mutation_decay: float = 0.97
    mutation_floor: float = 0.005
    restart_after: int = 50

    def __post_init__(self):
        if self.omega_max <= 0 or self.t_max <= 0:
            raise ValueError("omega_max and t_max must be positive")
        if not 1 <= self.segments <= 8:
            raise ValueError("segments must be between 1 and 8")
        if not 0 < self.elite < self.population:
            raise ValueError("need 0 < elite < population")
        if self.generations < 1:
            raise ValueError("generations must be positive")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_score: float
    mean_score: float
    mutation_scale: float


def _vector_to_params(x: np.ndarray, n_seg: int, n_colors: int) -> PulseParams:
    block = n_seg * n_colors
    amps = x[:block].reshape(n_seg, n_colors)
    phis = x[block : 2 * block].reshape(n_seg, n_colors)
    return PulseParams(
        amplitudes=tuple(tuple(float(a) for a in row) for row in amps),
        phases=tuple(tuple(float(p) for p in row) for row in phis),
        duration=float(x[-1]),
    )


def optimize(
    model: SystemModel,
    colors,
    objective: Objective,
    search: SearchConfig,
    seed: int,
) -> tuple[PulseParams, float, list[GenerationRecord]]:
    """Elitist evolutionary search; returns the best pulse found, its
    score and the per-generation history (best-so-far is monotone).

    Per generation the elite fraction survives unchanged, children are
    recombined uniformly from two elite parents and Gaussian-mutated
    with a per-bound scaled step that decays generation by generation;
    after `restart_after` stagnant generations everything but the best
    candidate is reseeded and the mutation scale reset.
    """
    colors = tuple(colors)
    if not colors:
        raise ValueError("need at least one color to optimize")
    for color in colors:
        model.check_color(color)
    rng = np.random.default_rng(seed)
    n_seg, n_colors = search.segments, len(colors)
    block = n_seg * n_colors
    dim = 2 * block + 1
    t_floor = 1e-6 * search.t_max

    lower = np.concatenate([np.zeros(block), np.zeros(block), [t_floor]])
    upper = np.concatenate(
        [np.full(block, search.omega_max), np.full(block, 2 * np.pi), [search.t_max]]
    )
    span = upper - lower

    def clip(x: np.ndarray) -> np.ndarray:
        x = x.copy()
        x[:block] = np.clip(x[:block], lower[:block], upper[:block])
        x[block : 2 * block] = np.mod(x[block : 2 * block], 2 * np.pi)
        x[-1] = np.clip(x[-1], t_floor, search.t_max)
        return x

    def sample() -> np.ndarray:
        return lower + span * rng.random(dim)

    def evaluate(x: np.ndarray) -> float:
        params = _vector_to_params(x, n_seg, n_colors)
        try:
            traj = propagate(model, params.to_schedule(colors), objective.initial)
        except (ValueError, RuntimeError) as exc:
            log.warning("discarding candidate: %s", exc)
            return -np.inf
        return objective.score(traj.final, model.basis)

    population = np.array([sample() for _ in range(search.population)])
    scores = np.array([evaluate(x) for x in population])

    best_idx = int(np.argmax(scores))
    best_x = population[best_idx].copy()
    best_score = float(scores[best_idx])
    history: list[GenerationRecord] = []
    scale = search.mutation_scale
    stagnant = 0

    for gen in range(search.generations):
        order = np.argsort(-scores, kind="stable")
        elites = population[order[: search.elite]]
        elite_scores = scores[order[: search.elite]]

        children = []
        for _ in range(search.population - search.elite):
            pa, pb = rng.integers(0, search.elite, size=2)
            mask = rng.random(dim) < 0.5
            child = np.where(mask, elites[pa], elites[pb])
            child = child + rng.standard_normal(dim) * scale * span
            children.append(clip(child))
        child_scores = np.array([evaluate(x) for x in children])

        population = np.vstack([elites, children])
        scores = np.concatenate([elite_scores, child_scores])

        gen_best = int(np.argmax(scores))
        if scores[gen_best] > best_score + 1e-12:
            best_score = float(scores[gen_best])
            best_x = population[gen_best].copy()
            stagnant = 0
        else:
            stagnant += 1

        history.append(
            GenerationRecord(
                generation=gen,
                best_score=best_score,
                mean_score=float(np.mean(scores)),
                mutation_scale=scale,
            )
        )
        scale = max(scale * search.mutation_decay, search.mutation_floor)
        if stagnant >= search.restart_after:
            population = np.array([best_x] + [sample() for _ in range(search.population - 1)])
            scores = np.array([best_score] + [evaluate(x) for x in population[1:]])
            scale = search.mutation_scale
            stagnant = 0

    return _vector_to_params(best_x, n_seg, n_colors), best_score, history
