"""Dynamical Lie algebra generation and controllability verdicts.

The algebra spanned by i*drift, i*controls and their iterated
commutators decides whether a finite system is controllable: saturation
at dimension >= d^2 - 1 (all of su(d) up to a global phase) means every
unitary on the space is reachable.  Growth of the dimension with the
Fock cutoff is the numerical signature of an algebra that does not
close on the untruncated ladder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FieldColor, SIDEBANDS, SystemModel, coupling_strength

__all__ = [
    "LieAlgebraResult",
    "dynamical_lie_algebra",
    "controllability_verdict",
    "TransitionCoupling",
    "DegenerateGroup",
    "degeneracy_report",
]

_SIDEBAND_OFFSET = {"carrier": 0.0, "blue": +1.0, "red": -1.0}


@dataclass(frozen=True)
class LieAlgebraResult:
    basis: np.ndarray  # (dimension, d, d) stacked skew-Hermitian, trace-orthonormal
    dimension: int
    saturated: bool
    generations: int
    history: tuple[tuple[int, int, int], ...]  # (generation, new_directions, cumulative)


def _check_hermitian(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square")
    scale = max(1.0, float(np.abs(mat).max()))
    if np.max(np.abs(mat - mat.conj().T)) > 1e-10 * scale:
        raise ValueError(f"{name} must be Hermitian")
    return mat


def dynamical_lie_algebra(
    drift: np.ndarray,
    controls,
    tol: float | None = None,
    max_dim: int | None = None,
) -> LieAlgebraResult:
    """Orthonormal basis of the algebra generated by i*drift and i*controls.

    Gram-Schmidt under the trace inner product with a re-orthogonalization
    pass per insertion; commutator sweeps pair each newly found element
    with everything found so far and stop when a full sweep adds nothing
    (saturated) or the dimension reaches max_dim.  Reaching d^2, the
    dimension of all skew-Hermitian matrices, is genuine saturation (no
    further direction exists); stopping at a smaller cap is reported as
    unsaturated growth.
    """
    mats = [_check_hermitian(drift, "drift")]
    mats += [_check_hermitian(c, f"control {i}") for i, c in enumerate(controls)]
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise ValueError("drift and controls must share one dimension")
    full = d * d
    cap = full if max_dim is None else min(int(max_dim), full)
    if cap < 1:
        raise ValueError("max_dim must be positive")
    seeds = [1j * m for m in mats]
    scale = max(np.linalg.norm(s) for s in seeds)
    if scale == 0.0:
        raise ValueError("all generators are zero")
    if tol is None:
        tol = 1e-8 * scale
    if tol <= 0:
        raise ValueError("tol must be positive")

    flat = np.zeros((cap, full), dtype=complex)
    stacked = np.zeros((cap, d, d), dtype=complex)
    count = 0

    def try_add(mat: np.ndarray) -> bool:
        nonlocal count
        x = (mat - mat.conj().T) / 2  # keep roundoff from leaking a Hermitian part
        v = x.ravel()
        for _ in range(2):
            if count:
                coeff = (flat[:count].conj() @ v).real
                v = v - coeff @ flat[:count]
        norm = np.linalg.norm(v)
        if norm <= tol:
            return False
        flat[count] = v / norm
        stacked[count] = flat[count].reshape(d, d)
        count += 1
        return True

    history = []
    for s in seeds:
        if count >= cap:
            break
        try_add(s)
    history.append((0, count, count))

    generations = 0
    saturated = count >= full
    gen_start = 0
    while count < cap:
        generations += 1
        prev_count = count
        for i in range(gen_start, prev_count):
            if count >= cap:
                break
            x = stacked[i]
            partners = stacked[:i]
            if not len(partners):
                continue
            comms = partners @ x - x @ partners
            # single-pass batch filter; try_add re-projects each survivor
            # with the re-orthogonalization pass before inserting it
            c_flat = comms.reshape(i, full)
            coeff = (c_flat @ flat[:count].conj().T).real
            c_flat = c_flat - coeff @ flat[:count]
            norms = np.linalg.norm(c_flat, axis=1)
            for j in np.nonzero(norms > tol)[0]:
                if count >= cap:
                    break
                try_add(comms[j])
        added = count - prev_count
        history.append((generations, added, count))
        if added == 0:
            saturated = True
            break
        gen_start = prev_count
    if count >= cap:
        saturated = saturated or (count >= full)

    return LieAlgebraResult(
        basis=stacked[:count].copy(),
        dimension=count,
        saturated=bool(saturated),
        generations=generations,
        history=tuple(history),
    )


def controllability_verdict(result: LieAlgebraResult, space_dim: int) -> str:
    """'controllable' iff saturated with dimension >= space_dim^2 - 1
    (su(N) up to global phase), 'uncontrollable' iff saturated below,
    'inconclusive' if the sweep never saturated."""
    if not result.saturated:
        return "inconclusive"
    if result.dimension >= space_dim * space_dim - 1:
        return "controllable"
    return "uncontrollable"


@dataclass(frozen=True)
class TransitionCoupling:
    ion: int
    sideband: str
    n_from: int
    n_to: int
    magnitude: float


@dataclass(frozen=True)
class DegenerateGroup:
    color_index: int
    frequency: float
    transitions: tuple[TransitionCoupling, ...]
    distinguishable: bool


def degeneracy_report(
    model: SystemModel,
    colors,
    tol: float = 1e-9,
) -> list[DegenerateGroup]:
    """Transitions driven at one resonance frequency, per color.

    Individually addressed colors drive only their target ion; under
    uniform illumination every ion whose transition frequency matches
    the field is driven.  A degenerate group is distinguishable iff its
    coupling magnitudes are pairwise unequal beyond `tol`: equal-strength
    degenerate transitions cannot be steered apart by that color.
    """
    omega_m = model.trap.mode_freq
    report = []
    for ci, color in enumerate(colors):
        model.check_color(color)
        freq = model.ions[color.target_ion].qubit_splitting + _SIDEBAND_OFFSET[color.sideband] * omega_m
        transitions = []
        for ion_index, ion in enumerate(model.ions):
            if model.ions[color.target_ion].individually_addressable and ion_index != color.target_ion:
                continue
            for sideband in SIDEBANDS:
                if abs(ion.qubit_splitting + _SIDEBAND_OFFSET[sideband] * omega_m - freq) > 1e-9:
                    continue
                probe = FieldColor(target_ion=ion_index, sideband=sideband)
                shift = {"carrier": 0, "blue": 1, "red": -1}[sideband]
                for n in range(model.basis.fock_cutoff):
                    if not 0 <= n + shift < model.basis.fock_cutoff:
                        continue
                    mag = abs(coupling_strength(model, probe, n))
                    if mag < 1e-12:
                        continue
                    transitions.append(
                        TransitionCoupling(
                            ion=ion_index,
                            sideband=sideband,
                            n_from=n,
                            n_to=n + shift,
                            magnitude=float(mag),
                        )
                    )
        mags = [t.magnitude for t in transitions]
        distinguishable = all(
            abs(mags[i] - mags[j]) > tol for i in range(len(mags)) for j in range(i + 1, len(mags))
        )
        report.append(
            DegenerateGroup(
                color_index=ci,
                frequency=float(freq),
                transitions=tuple(transitions),
                distinguishable=distinguishable,
            )
        )
    return report
