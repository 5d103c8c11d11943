"""Acceptance gate: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL
line per criterion with its runtime against the stated budget.

Criterion 1 is split: part (a), the blue-family truncation value
0.527667 from L_6^1, holds; part (b) as stated demands that 0.322548 be
a zero of L_5^0, which is false (the zeros of L_5^0 start at 0.2635603;
0.322548 is the smallest zero of L_4^0).  Part (b) is asserted exactly
as stated and therefore fails; the carrier-family truncation physics is
covered by the L_4^0 / L_5^0 tests in the module suites.
"""

import time

import numpy as np
import pytest

import ionctrl as ic
from ionctrl import (
    BasisState,
    FieldColor,
    IonConfig,
    Objective,
    PulseSchedule,
    SearchConfig,
    Segment,
    SystemModel,
    TrapConfig,
    TruncatedBasis,
)
from ionctrl.csvio import write_csv

ROOT_BLUE = ic.laguerre_zeros(6, 1)[0]


def report(name, ok, budget, elapsed, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {name}: {status} [{elapsed:.2f}s / budget {budget:.0f}s] {detail}")


def one_ion(eta, cutoff, ldl=False):
    return SystemModel(
        trap=TrapConfig(1.0, eta),
        ions=(IonConfig(),),
        basis=TruncatedBasis(1, cutoff),
        ldl=ldl,
    )


def two_ion(eta, cutoff):
    return SystemModel(
        trap=TrapConfig(1.0, eta, (1.0, 1.0)),
        ions=(IonConfig(), IonConfig()),
        basis=TruncatedBasis(2, cutoff),
    )


def ground(model):
    return model.basis.vector(BasisState((0,) * model.basis.ion_count, 0))


def random_bichromatic_schedules(rng, count):
    schedules = []
    for _ in range(count):
        segs = tuple(
            Segment(
                (
                    FieldColor(0, "carrier", rabi=float(rng.uniform(0.1, 0.6)), phase=float(rng.uniform(0, 2 * np.pi))),
                    FieldColor(0, "blue", rabi=float(rng.uniform(0.1, 0.6)), phase=float(rng.uniform(0, 2 * np.pi))),
                ),
                float(rng.uniform(30.0, 100.0)),
            )
            for _ in range(int(rng.integers(1, 4)))
        )
        schedules.append(PulseSchedule(segments=segs))
    return schedules


def test_criterion_1a_blue_truncation_value():
    t0 = time.monotonic()
    roots = ic.laguerre_zeros(6, 1)
    nearest = min(roots, key=lambda r: abs(r - 0.527667))
    elapsed = time.monotonic() - t0
    ok = abs(nearest - 0.527667) <= 1e-5 and elapsed < 1.0
    report(
        "1a (L_6^1 truncation value)",
        ok,
        1.0,
        elapsed,
        f"smallest zero {roots[0]:.9f} vs reported 0.527667",
    )
    assert abs(nearest - 0.527667) <= 1e-5
    assert elapsed < 1.0


def test_criterion_1b_carrier_truncation_value_as_stated():
    t0 = time.monotonic()
    roots = ic.laguerre_zeros(5, 0)
    gap = min(abs(r - 0.322548) for r in roots)
    elapsed = time.monotonic() - t0
    ok = gap <= 1e-5 and elapsed < 1.0
    report(
        "1b (L_5^0 truncation value, as stated)",
        ok,
        1.0,
        elapsed,
        f"zeros of L_5^0 start at {roots[0]:.7f}; 0.322548 is the smallest zero of "
        f"L_4^0 ({ic.laguerre_zeros(4, 0)[0]:.7f}), so the stated identity is "
        f"unattainable (closest L_5^0 zero is {gap:.4f} away)",
    )
    assert elapsed < 1.0
    assert gap <= 1e-5  # fails: the stated value is not a zero of L_5^0


def test_criterion_2_matrix_element_oracle_equivalence():
    t0 = time.monotonic()
    worst = 0.0
    for eta in (0.1, 0.5, 0.9, np.sqrt(0.527667)):
        block = ic.displacement_exact(eta, 13)
        for n_to in range(13):
            for n_from in range(13):
                diff = abs(ic.displacement_element(n_to, n_from, eta) - block[n_to, n_from])
                worst = max(worst, diff)
    elapsed = time.monotonic() - t0
    ok = worst < 1e-9 and elapsed < 10.0
    report("2 (closed form vs exponential oracle)", ok, 10.0, elapsed, f"worst |diff| {worst:.2e}")
    assert worst < 1e-9
    assert elapsed < 10.0


def test_criterion_3_closed_subsystem_leakage_contrast():
    t0 = time.monotonic()
    colors = [FieldColor(0, "carrier"), FieldColor(0, "blue")]

    sealed = one_ion(np.sqrt(ROOT_BLUE), 25)
    subspace = ic.closed_subspace(sealed, colors)
    assert subspace is not None and len(subspace) == 14

    rng = np.random.default_rng(42)
    schedules = random_bichromatic_schedules(rng, 20)
    psi0 = ground(sealed)
    sealed_leaks = [
        ic.leakage(ic.propagate(sealed, s, psi0, samples_per_segment=8), subspace)
        for s in schedules
    ]

    porous = one_ion(np.sqrt(0.5), 25)
    basis = porous.basis
    would_be = [basis.index(BasisState((s,), n)) for s in (0, 1) for n in range(7)]
    porous_leaks = [
        ic.leakage(ic.propagate(porous, s, ground(porous), samples_per_segment=8), would_be)
        for s in schedules
    ]
    elapsed = time.monotonic() - t0
    ok = max(sealed_leaks) < 1e-8 and max(porous_leaks) > 1e-3 and elapsed < 60.0
    report(
        "3 (closed-subsystem leakage contrast)",
        ok,
        60.0,
        elapsed,
        f"max leakage at Laguerre zero {max(sealed_leaks):.2e}, at eta^2=0.5 {max(porous_leaks):.2e}",
    )
    assert max(sealed_leaks) < 1e-8
    assert max(porous_leaks) > 1e-3
    assert elapsed < 60.0


def test_criterion_4_controllability_verdicts():
    t0 = time.monotonic()
    colors = [FieldColor(0, "carrier"), FieldColor(0, "blue")]

    # (a) one-ion truncated subsystem
    model_a = one_ion(np.sqrt(ROOT_BLUE), 20)
    idx = np.array(ic.closed_subspace(model_a, colors))
    drift = ic.build_drift(model_a)[np.ix_(idx, idx)]
    controls = [ic.build_control(model_a, c)[np.ix_(idx, idx)] for c in colors]
    result_a = ic.dynamical_lie_algebra(drift, controls)
    verdict_a = ic.controllability_verdict(result_a, len(idx))
    ok_a = verdict_a == "controllable" and result_a.dimension >= 14 * 14 - 1

    # (b) LDL growth with cutoff
    dims = []
    hit_cap = []
    for cutoff in (6, 8, 10):
        model_b = one_ion(0.1, cutoff, ldl=True)
        res = ic.dynamical_lie_algebra(
            ic.build_drift(model_b),
            [ic.build_control(model_b, c) for c in colors],
        )
        dims.append(res.dimension)
        space = model_b.basis.dimension
        hit_cap.append(res.dimension == space * space)
    ok_b = dims[0] < dims[1] < dims[2] and all(hit_cap)

    # (c) two-ion truncated model, individual addressing
    model_c = two_ion(np.sqrt(ROOT_BLUE), 16)
    colors_c = [FieldColor(0, "blue"), FieldColor(1, "blue"), FieldColor(0, "carrier")]
    idx_c = np.array(ic.closed_subspace(model_c, colors_c))
    drift_c = ic.build_drift(model_c)[np.ix_(idx_c, idx_c)]
    controls_c = [ic.build_control(model_c, c)[np.ix_(idx_c, idx_c)] for c in colors_c]
    result_c = ic.dynamical_lie_algebra(drift_c, controls_c)
    verdict_c = ic.controllability_verdict(result_c, len(idx_c))
    ok_c = verdict_c == "controllable"

    elapsed = time.monotonic() - t0
    ok = ok_a and ok_b and ok_c and elapsed < 300.0
    report(
        "4 (controllability verdicts)",
        ok,
        300.0,
        elapsed,
        f"(a) dim {result_a.dimension} {verdict_a}; (b) LDL dims {dims} all at cap; "
        f"(c) dim {result_c.dimension} {verdict_c} on {len(idx_c)} states",
    )
    assert ok_a
    assert ok_b
    assert ok_c
    assert elapsed < 300.0


def test_criterion_5_split_product_order_check():
    t0 = time.monotonic()
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    dts = [0.2, 0.1, 0.05, 0.025]
    pauli = ic.bch_defect(sx, sy, dts)

    model = one_ion(0.5, 8)
    hc = ic.build_control(model, FieldColor(0, "carrier"))
    hb = ic.build_control(model, FieldColor(0, "blue"))
    pair = ic.bch_defect(hc, hb, dts)
    collapse = ic.bch_defect(hc, np.zeros_like(hb), dts)
    collapse_max = max(row[1] for row in collapse.rows)

    elapsed = time.monotonic() - t0
    slopes_ok = (
        abs(pauli.slope1 - 2.0) <= 0.1
        and abs(pauli.slope2 - 3.0) <= 0.1
        and abs(pair.slope1 - 2.0) <= 0.1
        and abs(pair.slope2 - 3.0) <= 0.1
    )
    ok = slopes_ok and collapse_max <= 1e-12 and elapsed < 30.0
    report(
        "5 (split-product order check)",
        ok,
        30.0,
        elapsed,
        f"slopes pauli ({pauli.slope1:.2f}, {pauli.slope2:.2f}), "
        f"controls ({pair.slope1:.2f}, {pair.slope2:.2f}); single-color defect {collapse_max:.1e}",
    )
    assert slopes_ok
    assert collapse_max <= 1e-12
    assert elapsed < 30.0


def test_criterion_6_alternating_pulse_replay():
    t0 = time.monotonic()
    model = one_ion(0.15, 8, ldl=True)
    basis = model.basis
    rng = np.random.default_rng(2026)
    psi0 = ground(model)
    worst = 1.0
    for _ in range(50):
        target = np.zeros(basis.dimension, dtype=complex)
        for s in (0, 1):
            for n in range(5):
                target[basis.index(BasisState((s,), n))] = rng.standard_normal() + 1j * rng.standard_normal()
        target /= np.linalg.norm(target)
        schedule = ic.law_eberly_sequence(model, target)
        replay = ic.propagate(model, schedule, psi0)
        worst = min(worst, float(abs(np.vdot(target, replay.final)) ** 2))
    elapsed = time.monotonic() - t0
    ok = worst >= 1.0 - 1e-6 and elapsed < 60.0
    report(
        "6 (alternating-pulse replay)", ok, 60.0, elapsed, f"worst replay fidelity {worst:.9f}"
    )
    assert worst >= 1.0 - 1e-6
    assert elapsed < 60.0


def test_criterion_7_two_ion_entanglement_at_desk_scale():
    t0 = time.monotonic()
    model = two_ion(np.sqrt(ROOT_BLUE), 8)
    psi0 = ground(model)
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / np.sqrt(2.0)
    objective = Objective(kind="spin_fidelity", target=bell, initial=psi0, purity_floor=0.99)
    colors = [FieldColor(0, "blue"), FieldColor(1, "blue"), FieldColor(0, "carrier")]
    search = SearchConfig(
        omega_max=0.2,
        t_max=200.0,
        segments=4,
        generations=2000,
        restart_after=60,
    )
    seed = 1  # documented seed; the run is bit-reproducible
    params, score, history = ic.optimize(model, colors, objective, search, seed=seed)
    final = ic.propagate(model, params.to_schedule(colors), psi0).final
    fidelity, purity = ic.spin_fidelity(final, bell, model.basis)
    best = [h.best_score for h in history]
    monotone = all(b <= a + 1e-15 for b, a in zip(best, best[1:]))
    elapsed = time.monotonic() - t0
    ok = fidelity >= 0.99 and purity >= 0.99 and monotone and elapsed < 1800.0
    report(
        "7 (two-ion entanglement, seed 1)",
        ok,
        1800.0,
        elapsed,
        f"spin Bell fidelity {fidelity:.6f}, purity {purity:.6f}, duration {params.duration:.1f}",
    )
    assert fidelity >= 0.99
    assert purity >= 0.99
    assert monotone
    assert elapsed < 1800.0


def test_criterion_8_coupling_curve_zero_crossings(tmp_path):
    t0 = time.monotonic()
    files = {}
    crossings_ok = True
    detail = []
    for (degree, order), label in (((5, 0), "carrier"), ((6, 1), "blue")):
        xs = np.linspace(0.0, 2.0, 2001)
        curve = ic.laguerre_curve(degree, order, xs)
        path = write_csv(
            tmp_path / f"curve_{label}.csv",
            ["x", "value"],
            curve,
            {"family": label, "degree": degree, "order": order},
        )
        files[label] = path
        brackets = [
            (curve[i][0], curve[i + 1][0])
            for i in range(len(curve) - 1)
            if curve[i][1] * curve[i + 1][1] < 0
        ]
        for root in (r for r in ic.laguerre_zeros(degree, order) if r <= 2.0):
            inside = any(lo <= root <= hi for lo, hi in brackets)
            crossings_ok = crossings_ok and inside
            detail.append(f"{label} zero {root:.6f} bracketed={inside}")
    elapsed = time.monotonic() - t0
    ok = crossings_ok and elapsed < 1.0
    report("8 (curve zero crossings)", ok, 1.0, elapsed, "; ".join(detail))
    assert crossings_ok
    assert elapsed < 1.0
    assert all(p.exists() for p in files.values())


def test_criterion_9_rwa_validity_trend():
    t0 = time.monotonic()
    model = one_ion(np.sqrt(ROOT_BLUE), 12)
    psi0 = ground(model)
    g = abs(ic.coupling_strength(model, FieldColor(0, "carrier"), 0))
    distances = []
    for ratio in (0.05, 0.02, 0.01):
        rabi = ratio * model.trap.mode_freq
        duration = 2 * np.pi / (2 * rabi * g)  # one carrier Rabi period at n=0
        schedule = PulseSchedule(
            segments=(
                Segment(
                    (FieldColor(0, "carrier", rabi=rabi), FieldColor(0, "blue", rabi=rabi)),
                    duration,
                ),
            )
        )
        exact = ic.propagate_timedep_oracle(model, schedule, psi0, dt=0.005)
        rwa = ic.propagate(model, schedule, psi0)
        distances.append(float(np.linalg.norm(exact.final - rwa.final)))
    elapsed = time.monotonic() - t0
    monotone = distances[0] > distances[1] > distances[2]
    ok = monotone and distances[1] < 5e-2 and elapsed < 300.0
    report(
        "9 (RWA validity trend)",
        ok,
        300.0,
        elapsed,
        f"norm distances at rabi/mode_freq 0.05/0.02/0.01: "
        + ", ".join(f"{d:.4f}" for d in distances),
    )
    assert monotone
    assert distances[1] < 5e-2
    assert elapsed < 300.0
