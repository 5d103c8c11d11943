"""Pulse schedules and state propagation.

`propagate` evolves under the piecewise-constant multi-color resonant
model (each color contributes only its resonant manifold, drift absorbed
into the frame).  `propagate_timedep_oracle` keeps every color's
coupling to all phonon manifolds, each oscillating at its multiple of
the mode frequency, and serves as the independent check on that
approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import BasisState, ConvergenceError, SPIN_DOWN, SPIN_UP, displacement_element
from .model import FieldColor, SystemModel, control_raising, coupling_strength

__all__ = [
    "Segment",
    "PulseSchedule",
    "Trajectory",
    "propagate",
    "propagate_timedep_oracle",
    "BchDefectResult",
    "bch_defect",
    "law_eberly_sequence",
    "subspace_population",
    "leakage",
]

_PHONON_SHIFT = {"carrier": 0, "blue": +1, "red": -1}


@dataclass(frozen=True)
class Segment:
    """A set of simultaneously active colors held constant for a duration."""

    colors: tuple[FieldColor, ...]
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple[Segment, ...]

    @property
    def total_time(self) -> float:
        return sum(seg.duration for seg in self.segments)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray   # (samples,)
    states: np.ndarray  # (samples, dim)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _check_normalized(psi: np.ndarray, what: str = "state", tol: float = 1e-8) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{what} is not normalized (norm {norm})")
    return psi


def _check_resonant(schedule: PulseSchedule) -> None:
    for seg in schedule.segments:
        for color in seg.colors:
            if color.detuning != 0.0:
                raise ValueError("propagation supports only resonant colors (detuning 0)")


def segment_hamiltonian(model: SystemModel, segment: Segment) -> np.ndarray:
    """Rotating-frame Hamiltonian of one segment: sum over colors of
    rabi * (e^{i phase} K + h.c.) with K the color's raising operator."""
    dim = model.basis.dimension
    h = np.zeros((dim, dim), dtype=complex)
    for color in segment.colors:
        k = control_raising(model, color)
        h += color.rabi * np.exp(1j * color.phase) * k
    return h + h.conj().T


def _evolve(h: np.ndarray, psi: np.ndarray, times: np.ndarray) -> np.ndarray:
    """exp(-i h t) psi for each t, via one Hermitian eigendecomposition."""
    w, v = np.linalg.eigh(h)
    coeff = v.conj().T @ psi
    phases = np.exp(-1j * np.outer(times, w))
    return (phases * coeff) @ v.T


def propagate(
    model: SystemModel,
    schedule: PulseSchedule,
    psi0: np.ndarray,
    samples_per_segment: int = 1,
) -> Trajectory:
    """Evolve psi0 through the schedule, sampling each segment uniformly."""
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    psi = _check_normalized(psi0, "psi0")
    _check_resonant(schedule)
    times = [0.0]
    states = [psi]
    t0 = 0.0
    for seg in schedule.segments:
        h = segment_hamiltonian(model, seg)
        taus = seg.duration * np.arange(1, samples_per_segment + 1) / samples_per_segment
        samples = _evolve(h, psi, taus)
        for tau, st in zip(taus, samples):
            times.append(t0 + tau)
            states.append(st)
        psi = samples[-1]
        t0 += seg.duration
    return Trajectory(times=np.array(times), states=np.array(states))


def _manifold_terms(model: SystemModel, color: FieldColor):
    """All phonon-manifold raising operators of one color with the
    multiple of the mode frequency each acquires in the rotating frame.

    Yields (frequency_multiple, matrix): the resonant manifold comes out
    at multiple 0 and equals the model's control_raising operator; LDL
    models retain the three first-order manifolds, exact models all of
    them.
    """
    basis = model.basis
    n_levels = basis.fock_cutoff
    eta = model.effective_eta(color.target_ion)
    resonant_shift = _PHONON_SHIFT[color.sideband]
    pseudo_sideband = {0: "carrier", 1: "blue", -1: "red"}
    dns = (-1, 0, 1) if model.ldl else range(-(n_levels - 1), n_levels)
    for dn in dns:
        k = np.zeros((basis.dimension, basis.dimension), dtype=complex)
        nonzero = False
        for state in basis.states():
            if state.spins[color.target_ion] != SPIN_DOWN:
                continue
            n_to = state.phonon + dn
            if not 0 <= n_to < n_levels:
                continue
            if model.ldl:
                probe = FieldColor(target_ion=color.target_ion, sideband=pseudo_sideband[dn])
                elem = coupling_strength(model, probe, state.phonon)
            else:
                elem = displacement_element(n_to, state.phonon, eta)
            if abs(elem) < 1e-16:
                continue
            flipped = list(state.spins)
            flipped[color.target_ion] = SPIN_UP
            upper = BasisState(spins=tuple(flipped), phonon=n_to)
            k[basis.index(upper), basis.index(state)] = elem
            nonzero = True
        if nonzero:
            yield dn - resonant_shift, k


def _oracle_final_state(
    model: SystemModel,
    schedule: PulseSchedule,
    psi0: np.ndarray,
    dt: float,
):
    """Single pass of the time-dependent integrator; returns the list of
    segment-boundary (time, state) samples."""
    omega = model.trap.mode_freq
    psi = np.asarray(psi0, dtype=complex)
    t0 = 0.0
    samples = [(0.0, psi)]
    for seg in schedule.segments:
        groups: dict[int, np.ndarray] = {}
        for color in seg.colors:
            amp = color.rabi * np.exp(1j * color.phase)
            for mult, k in _manifold_terms(model, color):
                if mult in groups:
                    groups[mult] = groups[mult] + amp * k
                else:
                    groups[mult] = amp * k
        n_steps = max(1, math.ceil(seg.duration / dt))
        h_step = seg.duration / n_steps
        for step in range(n_steps):
            t_mid = t0 + (step + 0.5) * h_step
            h = np.zeros((model.basis.dimension,) * 2, dtype=complex)
            for mult, w_mat in groups.items():
                h += np.exp(1j * mult * omega * t_mid) * w_mat
            h = h + h.conj().T
            w, v = np.linalg.eigh(h)
            psi = v @ (np.exp(-1j * w * h_step) * (v.conj().T @ psi))
        t0 += seg.duration
        samples.append((t0, psi))
    return samples


def propagate_timedep_oracle(
    model: SystemModel,
    schedule: PulseSchedule,
    psi0: np.ndarray,
    dt: float,
    check_convergence: bool = True,
) -> Trajectory:
    """Integrate with all off-resonant manifolds retained.

    Stepwise exponentials of the Hamiltonian frozen at step midpoints;
    dt must resolve the mode frequency (dt * mode_freq < 0.05).  With
    check_convergence the integration is repeated at dt/2 and the finer
    result returned; a final-state shift above 1e-6 is an error.
    """
    psi = _check_normalized(psi0, "psi0")
    _check_resonant(schedule)
    if dt <= 0 or dt * model.trap.mode_freq >= 0.05:
        raise ValueError("dt must satisfy dt * mode_freq < 0.05")
    samples = _oracle_final_state(model, schedule, psi, dt)
    if check_convergence:
        finer = _oracle_final_state(model, schedule, psi, dt / 2)
        drift = np.linalg.norm(samples[-1][1] - finer[-1][1])
        if drift > 1e-6:
            raise ConvergenceError(
                f"halving dt moved the final state by {drift:.3e} (> 1e-6); decrease dt"
            )
        samples = finer
    times = np.array([t for t, _ in samples])
    states = np.array([s for _, s in samples])
    return Trajectory(times=times, states=states)


@dataclass(frozen=True)
class BchDefectResult:
    rows: tuple[tuple[float, float, float], ...]  # (dt, defect1, defect2)
    slope1: float
    slope2: float


def _expm_i_hermitian(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(i * scale * h) for Hermitian h."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * scale * w)) @ v.conj().T


def bch_defect(hc: np.ndarray, hb: np.ndarray, dt_list) -> BchDefectResult:
    """Spectral-norm defect of the split product against the exact
    exponential, without and with the first commutator correction.

    defect1(dt) = |exp(i(Hc+Hb)dt) - exp(iHc dt) exp(iHb dt)|  ~ dt^2
    defect2 adds the correction exp([Hc,Hb] dt^2 / 2)           ~ dt^3

    The correction's sign is fixed by the order fit: with it the defect
    must collapse one order faster, and it vanishes identically when
    either input is zero or the inputs commute.
    """
    hc = np.asarray(hc, dtype=complex)
    hb = np.asarray(hb, dtype=complex)
    if hc.shape != hb.shape:
        raise ValueError("inputs must have equal dimension")
    comm = hc @ hb - hb @ hc
    comm_herm = -1j * comm  # [Hc,Hb] is anti-Hermitian
    rows = []
    for dt in dt_list:
        exact = _expm_i_hermitian(hc + hb, dt)
        split = _expm_i_hermitian(hc, dt) @ _expm_i_hermitian(hb, dt)
        correction = _expm_i_hermitian(comm_herm, 0.5 * dt * dt)
        d1 = float(np.linalg.norm(exact - split, 2))
        d2 = float(np.linalg.norm(exact - split @ correction, 2))
        rows.append((float(dt), d1, d2))

    def _slope(col: int) -> float:
        xs = [math.log(r[0]) for r in rows if r[col] > 1e-13]
        ys = [math.log(r[col]) for r in rows if r[col] > 1e-13]
        if len(xs) < 2:
            return float("nan")
        return float(np.polyfit(xs, ys, 1)[0])

    return BchDefectResult(rows=tuple(rows), slope1=_slope(1), slope2=_slope(2))


def _solve_pair_rotation(amp_from: complex, amp_to: complex, zero: str) -> tuple[float, float]:
    """Angle theta and drive phase psi of a resonant two-level rotation
    U = [[cos t, -i e^{-i psi} sin t], [-i e^{i psi} sin t, cos t]]
    (basis order: from, to) that zeroes the requested component."""
    if zero == "to":
        theta = math.atan2(abs(amp_to), abs(amp_from))
        psi = np.angle(amp_to) - np.angle(amp_from) - np.pi / 2
    elif zero == "from":
        theta = math.atan2(abs(amp_from), abs(amp_to))
        psi = np.angle(amp_to) - np.angle(amp_from) + np.pi / 2
    else:
        raise ValueError("zero must be 'from' or 'to'")
    return theta, float(psi % (2 * np.pi))


def law_eberly_sequence(model: SystemModel, target: np.ndarray) -> PulseSchedule:
    """Single-color carrier/red pulse schedule preparing `target` from
    |down, 0> on a one-ion model.

    Built by backward recursion: from the highest occupied phonon rung
    downward, a carrier rotation empties the up state of that rung and a
    red-sideband rotation moves the remaining down amplitude one rung
    lower; reversing the inverted pulses yields the forward schedule.
    """
    if model.basis.ion_count != 1:
        raise ValueError("the alternating-pulse construction applies to one ion")
    target = _check_normalized(target, "target")
    basis = model.basis
    n_levels = basis.fock_cutoff

    def idx(spin: int, n: int) -> int:
        return basis.index(BasisState(spins=(spin,), phonon=n))

    occupied = [n for n in range(n_levels) for s in (SPIN_DOWN, SPIN_UP) if abs(target[idx(s, n)]) > 1e-12]
    n_max = max(occupied) if occupied else 0

    state = target.copy()
    backward: list[Segment] = []

    def apply_backward(sideband: str, pair_from: int, pair_to: int, zero: str) -> None:
        color = FieldColor(target_ion=0, sideband=sideband)
        kappa = coupling_strength(model, color, basis.state(pair_from).phonon)
        amp_from, amp_to = state[pair_from], state[pair_to]
        if abs(amp_from) < 1e-12 and abs(amp_to) < 1e-12:
            return
        if zero == "to" and abs(amp_to) < 1e-12:
            return
        if zero == "from" and abs(amp_from) < 1e-12:
            return
        if abs(kappa) < 1e-12:
            raise ValueError(
                f"{sideband} coupling vanishes at rung {basis.state(pair_from).phonon};"
                " target unreachable with this Lamb-Dicke parameter"
            )
        theta, psi = _solve_pair_rotation(amp_from, amp_to, zero)
        if theta < 1e-14:
            return
        phase = float((psi - np.angle(kappa)) % (2 * np.pi))
        duration = theta / abs(kappa)
        seg = Segment(
            colors=(FieldColor(target_ion=0, sideband=sideband, rabi=1.0, phase=phase),),
            duration=duration,
        )
        backward.append(seg)
        h = segment_hamiltonian(model, seg)
        w, v = np.linalg.eigh(h)
        state[:] = v @ (np.exp(-1j * w * duration) * (v.conj().T @ state))

    for m in range(n_max, 0, -1):
        # carrier pair (down,m) -> (up,m): empty the upper component
        apply_backward("carrier", idx(SPIN_DOWN, m), idx(SPIN_UP, m), zero="to")
        # red pair (down,m) -> (up,m-1): move everything off the rung
        apply_backward("red", idx(SPIN_DOWN, m), idx(SPIN_UP, m - 1), zero="from")
    apply_backward("carrier", idx(SPIN_DOWN, 0), idx(SPIN_UP, 0), zero="to")

    residual = 1.0 - abs(state[idx(SPIN_DOWN, 0)])
    if residual > 1e-8:
        raise ConvergenceError(f"backward recursion left residual {residual:.3e} outside |down,0>")

    forward = []
    for seg in reversed(backward):
        color = seg.colors[0]
        inverted = FieldColor(
            target_ion=color.target_ion,
            sideband=color.sideband,
            rabi=color.rabi,
            phase=float((color.phase + np.pi) % (2 * np.pi)),
        )
        forward.append(Segment(colors=(inverted,), duration=seg.duration))
    return PulseSchedule(segments=tuple(forward))


def subspace_population(trajectory: Trajectory, subspace) -> np.ndarray:
    """Population inside the given basis indices at each sample."""
    indices = sorted(set(int(i) for i in subspace))
    if not indices:
        raise ValueError("subspace must be nonempty")
    dim = trajectory.states.shape[1]
    if indices[0] < 0 or indices[-1] >= dim:
        raise ValueError("subspace index outside state dimension")
    return np.sum(np.abs(trajectory.states[:, indices]) ** 2, axis=1)


def leakage(trajectory: Trajectory, subspace) -> float:
    """Maximum population found outside the subspace over the trajectory."""
    inside = subspace_population(trajectory, subspace)
    total = np.sum(np.abs(trajectory.states) ** 2, axis=1)
    return float(np.max(total - inside))
