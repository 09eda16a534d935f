"""Acceptance suite: one test per headline criterion, printed pass/fail lines.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
summary lines as they complete.  Expensive artifacts (the Scheme 1 intensity
curve, Scheme 2/3 saturation points, the imaging loop) are computed once per
session and shared.
"""

import time

import numpy as np
import pytest

from sseit.atomdata import Manifold, StateLabel
from sseit.budget import BudgetInput, max_array, rescatter_probability
from sseit.dressed import protection_map
from sseit.experiments import (
    ImagingLoopConfig,
    field_sweep,
    imaging_loop,
    polarization_sweep,
    scheme3_analysis,
    suppression_curve,
)
from sseit.hamiltonian import build_rwa_hamiltonian
from sseit.lindblad import (
    DensityMatrix,
    collapse_operators,
    evolve,
    steady_rate,
    suppression_factor,
)
from sseit.schemes import scheme1, scheme2, toy_model

CLOCK4 = StateLabel(Manifold.S6, 4, 0)


def report(criterion: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {criterion}: {status} - {detail}")


# ---------------------------------------------------------------------------
# shared expensive artifacts

@pytest.fixture(scope="session")
def scheme1_curve():
    intensities = np.logspace(-1, 4, 40)
    start = time.perf_counter()
    points = suppression_curve(scheme1(), intensities)
    elapsed = time.perf_counter() - start
    return points, elapsed


@pytest.fixture(scope="session")
def scheme2_saturation():
    points = suppression_curve(scheme2(), [3e3, 1e4])
    return points[-1].ratio


@pytest.fixture(scope="session")
def scheme3_saturation():
    points = scheme3_analysis([1e3, 1e4])
    return points[-1]


@pytest.fixture(scope="session")
def imaging_loop_report():
    return imaging_loop(scheme2(1000.0), ImagingLoopConfig(inner_repeats=3))


# ---------------------------------------------------------------------------
# criterion 1: closed-form array budgets reproduce the published array sizes

def test_criterion_1_budget_exactness():
    start = time.perf_counter()

    def budget(dim, target):
        return max_array(BudgetInput(
            wavelength=852.35e-9, lattice_spacing=5e-6, photons=100.0,
            suppression=8e-5, dimensionality=dim, error_target=target,
        )).atoms

    atoms = (budget(3, 1e-4), budget(3, 1e-3), budget(2, 1e-4))
    elapsed = time.perf_counter() - start
    ok = atoms == (125, 157464, 62500) and elapsed < 0.5
    report("1 (budget exactness)", ok,
           f"3D/1e-4 -> {atoms[0]}, 3D/1e-3 -> {atoms[1]}, 2D/1e-4 -> {atoms[2]} "
           f"in {elapsed * 1e3:.1f} ms")
    assert atoms == (125, 157464, 62500)
    assert elapsed < 0.5


# criterion 2: adjacent-atom rescattering probability

def test_criterion_2_adjacent_atom_probability():
    p = rescatter_probability(852.35e-9, 5e-6)
    ok = 3.5e-4 <= p <= 4.2e-4 and 0.035 <= 100 * p <= 0.042
    report("2 (adjacent-atom probability)", ok,
           f"p = {p:.4e} per photon, {100 * p:.4f} per 100 photons")
    assert 3.5e-4 <= p <= 4.2e-4
    assert 0.035 <= 100 * p <= 0.042


# criterion 3: toy 3-level scaling

def test_criterion_3_toy3_slope():
    start = time.perf_counter()
    intensities = np.logspace(1, 3, 9)
    points = suppression_curve(toy_model(3), intensities)
    slope = np.polyfit(np.log10(intensities),
                       np.log10([p.ratio for p in points]), 1)[0]
    elapsed = time.perf_counter() - start
    ok = abs(slope + 1.0) <= 0.05 and elapsed < 60
    report("3 (toy 3-level scaling)", ok,
           f"log-log slope {slope:.4f} in {elapsed:.1f} s")
    assert slope == pytest.approx(-1.0, abs=0.05)
    assert elapsed < 60


# criterion 4: simplified-system features

def test_criterion_4_appendix_toy_features():
    start = time.perf_counter()

    # 4-level: saturation above 1e3 W/cm2
    i4 = np.array([1e3, 3e3, 1e4, 3e4])
    r4 = [suppression_factor(toy_model(4), i) for i in i4]
    slope4 = np.polyfit(np.log10(i4), np.log10(r4), 1)[0]

    # 5-level: resonant-column peak near 800 W/cm2
    cfg5 = toy_model(5)
    i5 = np.logspace(1, 4, 31)
    map5 = protection_map(cfg5, [0.0], i5, CLOCK4)
    peak5 = i5[int(np.argmax(map5.resonant_column()))]

    # 6-level: both the peak and the saturation
    i6 = np.logspace(2, 4.5, 16)
    r6 = np.array([suppression_factor(toy_model(6), i) for i in i6])
    k = int(np.argmax(r6))
    peak6 = i6[k]
    interior_peak = 0 < k < len(i6) - 1
    top = i6 >= 1e4
    slope6 = np.polyfit(np.log10(i6[top]), np.log10(r6[top]), 1)[0]

    elapsed = time.perf_counter() - start
    ok = (abs(slope4) < 0.1 and 400 <= peak5 <= 1200
          and interior_peak and 400 <= peak6 <= 1200 and abs(slope6) < 0.1
          and elapsed < 600)
    report("4 (simplified-system features)", ok,
           f"4-level plateau slope {slope4:+.3f}; 5-level peak {peak5:.0f} W/cm2; "
           f"6-level peak {peak6:.0f} W/cm2 with plateau slope {slope6:+.3f}; "
           f"{elapsed:.0f} s")
    assert abs(slope4) < 0.1
    assert 400 <= peak5 <= 1200
    assert interior_peak and 400 <= peak6 <= 1200
    assert abs(slope6) < 0.1
    assert elapsed < 600


# criterion 5: Scheme 1 headline numbers

def test_criterion_5_scheme1_saturated_value(scheme1_curve):
    """Saturated R band as specified.

    Every other anchor of the model (toy slopes, the 400 W/cm2 peak, the
    ~800 W/cm2 five-level crossing, dipole sum rules, lifetimes) validates,
    and the plateau value is confirmed by an independent fixed-bright-state
    calculation, but with the shipped atomic data the detected-state
    normalization puts the plateau at ~3.7e-5, a factor ~2.2 below the
    published 8e-5 rather than within 2.  The band is asserted as specified.
    """
    points, _ = scheme1_curve
    saturated = points[-1].ratio
    ok = 4e-5 <= saturated <= 1.6e-4
    report("5a (Scheme 1 saturated R)", ok,
           f"R = {saturated:.3e} at {points[-1].intensity:.3g} W/cm2, "
           f"band [4e-5, 1.6e-4]; see also R_vs_unprotected = "
           f"{points[-1].ratio_vs_unprotected:.3e}")
    assert 4e-5 <= saturated <= 1.6e-4


def test_criterion_5_scheme1_peak_position(scheme1_curve):
    points, _ = scheme1_curve
    rs = np.array([p.ratio for p in points])
    ii = np.array([p.intensity for p in points])
    # interior local maxima (R decreases monotonically away from zero
    # intensity, so the rescattering resonance is a bump on that slope)
    local = [k for k in range(1, len(rs) - 1)
             if rs[k] > rs[k - 1] and rs[k] > rs[k + 1]]
    ok = bool(local)
    k = max(local, key=lambda k: rs[k]) if local else -1
    ok = ok and 200 <= ii[k] <= 600
    report("5b (Scheme 1 peak near 400 W/cm2)", ok,
           f"dominant local maximum R = {rs[k]:.3e} at {ii[k]:.0f} W/cm2")
    assert local, "no interior local maximum found"
    assert 200 <= ii[k] <= 600


def test_criterion_5_detected_rate_stability():
    cfg = scheme1().replace(spectator_sink=True)
    reg = cfg.registry
    jumps = collapse_operators(reg)
    rates = []
    for intensity in (1e-1, 1e1, 1e3, 1e4):
        h = build_rwa_hamiltonian(cfg.with_protection_intensity(intensity))
        trace = evolve(DensityMatrix.from_state(cfg.detected_state, reg),
                       h, jumps, reg, duration=3e-6, sample_every=2e-8)
        rates.append(steady_rate(trace))
    spread = (max(rates) - min(rates)) / min(rates)
    ok = spread < 0.01
    report("5c (detected-rate stability)", ok,
           f"cycling rate varies {spread * 100:.4f}% over 1e-1..1e4 W/cm2")
    assert spread < 0.01


def test_criterion_5_runtime(scheme1_curve):
    points, elapsed = scheme1_curve
    ok = elapsed < 1800 and len(points) == 40
    report("5d (Scheme 1 runtime)", ok,
           f"40-point intensity curve in {elapsed / 60:.1f} min")
    assert len(points) == 40
    assert elapsed < 1800


# criterion 6: Scheme 1 leak channels

def test_criterion_6_scheme1_leak_channels():
    cfg = scheme1(3e3).replace(spectator_sink=True)
    reg = cfg.registry
    h = build_rwa_hamiltonian(cfg)
    jumps = collapse_operators(reg)
    trace = evolve(DensityMatrix.from_state(CLOCK4, reg), h, jumps, reg,
                   duration=3e-6, sample_every=2e-8)
    allowed = {CLOCK4, *cfg.watch_states}
    outside = sum(
        max(float(trace.populations[-1, i]), 0.0)
        for i, s in enumerate(reg.basis) if s not in allowed
    )
    ok = outside < 1e-6
    report("6 (Scheme 1 leak channels)", ok,
           f"population outside the declared leak set after 3 us: {outside:.3e}")
    assert outside < 1e-6


# criterion 7: Scheme 2 behavior

def test_criterion_7_protected_state_linear_decay():
    cfg = scheme2(2e3).replace(spectator_sink=True)
    reg = cfg.registry
    h = build_rwa_hamiltonian(cfg)
    jumps = collapse_operators(reg)
    trace = evolve(DensityMatrix.from_state(cfg.protected_states[0], reg),
                   h, jumps, reg, duration=3e-6, sample_every=2e-8)
    pop = trace.population(cfg.protected_states[0])
    mask = trace.times >= 5e-7
    coef = np.polyfit(trace.times[mask], pop[mask], 1)
    residual = pop[mask] - np.polyval(coef, trace.times[mask])
    span = abs(coef[0]) * (trace.times[-1] - 5e-7)
    rel = float(np.abs(residual).max() / span)
    ok = rel < 0.05
    report("7a (Scheme 2 linear decay)", ok,
           f"post-transient linear fit residual {rel * 100:.3f}% of the decay span")
    assert rel < 0.05


def test_criterion_7_imaging_loop_pumps(imaging_loop_report):
    rep = imaging_loop_report
    ok = rep.pumped_fraction >= 0.99
    report("7b (imaging loop pumping)", ok,
           f"pumped fraction {rep.pumped_fraction:.4f} with tau = "
           f"{rep.tau * 1e6:.1f} us, {rep.photons_per_cycle[0]:.2f} photons/cycle")
    assert rep.pumped_fraction >= 0.99


def test_criterion_7_scheme2_matches_scheme1(scheme1_curve, scheme2_saturation):
    points, _ = scheme1_curve
    s1 = points[-1].ratio
    s2 = scheme2_saturation
    factor = max(s1 / s2, s2 / s1)
    ok = factor <= 3.0
    report("7c (Scheme 2 vs Scheme 1)", ok,
           f"saturated R: scheme1 {s1:.3e}, scheme2 {s2:.3e} (factor {factor:.2f})")
    assert factor <= 3.0


# criterion 8: polarization imperfections

def test_criterion_8_protection_impurity_bound():
    """Transfer error bound at 1e-4 wrong-pi fraction, zero field.

    In this model the |3,2> filling at zero field is dominated by the
    incoherent cascade through the Autler-Townes wings of the dressed
    |4'',4''> level (confirmed against a third-order dressed-state
    calculation), which puts the error near 2e-2 per 100 photons rather
    than below 1e-4.  The bound is asserted as specified.
    """
    sweep = polarization_sweep(scheme2(), wrong_q=0, fractions=[1e-4])
    error = sweep.error_per_100_photons[0]
    ok = error <= 1e-4
    report("8a (wrong-pi fraction 1e-4 at B=0)", ok,
           f"|3,2> transfer error {error:.3e} per 100 photons, bound 1e-4")
    assert error <= 1e-4


def test_criterion_8_field_suppression_monotone():
    """Monotone error decrease with applied field at 5e-4 wrong fraction.

    The incoherent cascade that dominates this model's transfer error is
    insensitive to the ground-state Zeeman splitting, so the curve is flat
    within a few percent instead of monotonically decreasing.  Asserted as
    specified.
    """
    fields = np.array([0.0, 5.0, 10.0, 15.0, 20.0]) * 1e-4
    sweep = field_sweep(scheme2(), b_values=fields, fraction=5e-4)
    errors = sweep.error_per_100_photons
    non_increasing = all(b <= a * (1 + 1e-9) for a, b in zip(errors, errors[1:]))
    report("8b (field suppression monotone)", non_increasing,
           "errors over 0..20 G: " + ", ".join(f"{e:.3e}" for e in errors))
    assert non_increasing


def test_criterion_8_detection_impurity_floor():
    """Detection-beam impurity floor.

    The EIT-protected detection-impurity channel leaves a small real
    residual (~5e-6 per 100 photons at a 5e-3 fraction) above the specified
    1e-6 floor; asserted as specified.
    """
    sweep = polarization_sweep(scheme2(), wrong_q=0, fractions=[5e-3],
                               beam="detection")
    error = sweep.error_per_100_photons[0]
    ok = error < 1e-6
    report("8c (detection impurity floor)", ok,
           f"|3,2> transfer error {error:.3e} per 100 photons at fraction 5e-3")
    assert error < 1e-6


# criterion 9: Scheme 3 vs Scheme 2

def test_criterion_9_scheme3_improvement(scheme2_saturation, scheme3_saturation):
    s2 = scheme2_saturation
    r_pi = scheme3_saturation.r_pi
    factor = s2 / r_pi
    ok = 1.5 <= factor <= 4.0
    report("9 (Scheme 3 pi-channel improvement)", ok,
           f"scheme2 R {s2:.3e} / scheme3 R_pi {r_pi:.3e} = {factor:.2f} "
           f"(leakage {scheme3_saturation.leakage_error:.3e} per 100 photons)")
    assert 1.5 <= factor <= 4.0


# criterion 10: always-on property suites

def test_criterion_10_property_suites():
    start = time.perf_counter()

    # Lindblad trace/hermiticity/positivity over 5 us (validate=True raises
    # on violation of 1e-8 / 1e-8 / 1e-6)
    cfg = toy_model(5, protection_intensity=400.0)
    reg = cfg.registry
    trace = evolve(
        DensityMatrix.from_state(CLOCK4, reg), build_rwa_hamiltonian(cfg),
        collapse_operators(reg), reg, duration=5e-6, sample_every=2e-8,
        validate=True,
    )

    # angular-momentum orthogonality and the dipole sum rule at 1e-12
    from sseit.angular import hyperfine_dipole_element, wigner3j

    total = sum(
        5 * wigner3j(2, 2, 2, m1, -m1 - 1, 1) ** 2 for m1 in range(-2, 3)
    )
    ortho_ok = abs(total - 1.0) < 1e-12
    stretch = hyperfine_dipole_element(
        4, 4, 5, 5, 1, j_lower=0.5, j_upper=1.5, nuclear_spin=3.5,
        reduced_element=1.0)
    channel_sum = 0.0
    for f in (3, 4):
        for q in (-1, 0, 1):
            m = 5 - q
            if abs(m) <= f:
                channel_sum += hyperfine_dipole_element(
                    f, m, 5, 5, q, j_lower=0.5, j_upper=1.5, nuclear_spin=3.5,
                    reduced_element=1.0) ** 2
    sum_rule_ok = abs(stretch**2 / channel_sum - 1.0) < 1e-12

    # dressed-vs-Lindblad weak-probe agreement within 10%
    from sseit.dressed import dressed_rate_estimate
    from sseit.lightfield import rabi_frequency

    cfg3 = toy_model(3)
    g = CLOCK4
    i = StateLabel(Manifold.P6_32, 5, 1)
    e = StateLabel(Manifold.S7, 4, 1)
    om_det = abs(rabi_frequency(cfg3.detection, g, i, cfg3.registry))
    om_1 = abs(rabi_frequency(cfg3.protection.replace(intensity=1.0), i, e,
                              cfg3.registry))
    cfg3 = cfg3.with_protection_intensity((100.0 * om_det / om_1) ** 2)
    lb = steady_rate(evolve(
        DensityMatrix.from_state(g, cfg3.registry), build_rwa_hamiltonian(cfg3),
        collapse_operators(cfg3.registry), cfg3.registry,
        duration=3e-6, sample_every=2e-8,
    ))
    dr = dressed_rate_estimate(cfg3, g)
    oracle_ok = abs(lb - dr) / dr < 0.10

    # deterministic outputs independent of worker count
    grid_map_1 = protection_map(toy_model(4), [0.0, 1e8], [10.0, 100.0],
                                CLOCK4, workers=1)
    grid_map_2 = protection_map(toy_model(4), [0.0, 1e8], [10.0, 100.0],
                                CLOCK4, workers=2)
    determinism_ok = np.array_equal(grid_map_1.values, grid_map_2.values)

    elapsed = time.perf_counter() - start
    ok = ortho_ok and sum_rule_ok and oracle_ok and determinism_ok
    report("10 (property suites)", ok,
           f"5 us invariants held; orthogonality {ortho_ok}, sum rule "
           f"{sum_rule_ok}, dressed-vs-Lindblad dev "
           f"{abs(lb - dr) / dr * 100:.1f}%, worker determinism "
           f"{determinism_ok}; {elapsed:.0f} s")
    assert trace.times[-1] == pytest.approx(5e-6)
    assert ortho_ok
    assert sum_rule_ok
    assert oracle_ok
    assert determinism_ok
