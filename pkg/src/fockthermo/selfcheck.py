"""Self-contained invariant suite behind the ``validate`` subcommand.

Each check exercises one documented invariant group at reduced scale so the
whole battery stays fast; the pytest suite re-asserts the same physics at
full tolerance. ``MANIFEST`` lists which module each check covers, so
coverage of the invariant catalogue is itself testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bath import BathParams, rates, thermal_occupation, thermal_occupation_dT
from .bounds import bound_coherent, bound_fock_linear, bound_fock_quadratic, bound_squeezed
from .dynamics import (
    EvolutionConfig,
    EvolutionMethod,
    evolve,
    mean_photon_analytic,
    short_time_populations,
)
from .errors import FockThermoError
from .fisher import (
    DerivativeConfig,
    FisherMethod,
    cfi_number_basis,
    d_dT_state,
    qfi_point,
    qfi_sld,
)
from .fockspace import annihilation, creation, validate_density
from .probes import ProbeKind, ProbeSpec, default_dim, energy_match, make_state
from .sweep import SweepAxis, SweepMethod, SweepSpec, fit_scaling_exponent, run_sweep

FIG_BATH = BathParams()  # omega=1, T=0.5, gamma=0.1, g=0.05, markovian


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    passed: bool
    detail: str


_REGISTRY: list[tuple[str, str, Callable[[], tuple[bool, str]]]] = []


def _register(group: str, name: str):
    def wrap(fn):
        _REGISTRY.append((group, name, fn))
        return fn

    return wrap


# --------------------------------------------------------------------------
# fockspace
# --------------------------------------------------------------------------

@_register("fockspace", "adjoint_identity")
def _check_adjoint() -> tuple[bool, str]:
    worst = max(
        float(np.max(np.abs(creation(d) - annihilation(d).conj().T))) for d in (2, 3, 17, 40)
    )
    return worst == 0.0, f"max |a_dag - a^T*| = {worst:.1e}"


@_register("fockspace", "commutator_block")
def _check_commutator() -> tuple[bool, str]:
    worst = 0.0
    for d in (2, 5, 23, 40):
        a = annihilation(d)
        comm = a @ a.conj().T - a.conj().T @ a
        block = comm[: d - 1, : d - 1] - np.eye(d - 1)
        worst = max(worst, float(np.max(np.abs(block))))
    return worst < 1e-13, f"max block defect {worst:.1e} (corner excluded)"


@_register("fockspace", "state_spectra")
def _check_spectra() -> tuple[bool, str]:
    worst_imag, worst_sum = 0.0, 0.0
    for spec in (ProbeSpec.fock(2), ProbeSpec.coherent(1.0), ProbeSpec.squeezed(0.6),
                 ProbeSpec.thermal(0.5)):
        rho = make_state(spec, default_dim(spec))
        eig = np.linalg.eigvals(rho.mat)
        worst_imag = max(worst_imag, float(np.max(np.abs(eig.imag))))
        worst_sum = max(worst_sum, abs(float(eig.real.sum()) - 1.0))
    ok = worst_imag < 1e-10 and worst_sum < 1e-9
    return ok, f"max |Im eig| {worst_imag:.1e}, max |sum-1| {worst_sum:.1e}"


# --------------------------------------------------------------------------
# bath
# --------------------------------------------------------------------------

@_register("bath", "detailed_balance")
def _check_detailed_balance() -> tuple[bool, str]:
    worst = 0.0
    for x in np.logspace(-2, 2, 25):
        bath = BathParams(omega=1.0, T=1.0 / x)
        r = rates(bath)
        worst = max(worst, abs(r.gamma_plus / r.gamma_minus - math.exp(-x)) / math.exp(-x))
    return worst < 1e-12, f"max relative balance defect {worst:.1e}"


@_register("bath", "rate_gap_identity")
def _check_rate_gap() -> tuple[bool, str]:
    worst = 0.0  # in units of one ulp of gamma_minus
    for T in (0.05, 0.5, 5.0, 50.0):
        r = rates(BathParams(T=T))
        defect = abs(r.gamma_minus - r.gamma_plus - r.gamma0)
        worst = max(worst, defect / np.spacing(r.gamma_minus))
    return worst <= 1.0, f"max |(G- - G+) - G0| = {worst:.2f} ulp"


@_register("bath", "occupation_derivative_positive")
def _check_derivative_positive() -> tuple[bool, str]:
    vals = [thermal_occupation_dT(1.0, T) for T in np.logspace(-2, 2, 25)]
    return all(v > 0.0 for v in vals), f"min derivative {min(vals):.3e}"


@_register("bath", "derivative_vs_finite_difference")
def _check_derivative_fd() -> tuple[bool, str]:
    worst = 0.0
    for T in np.logspace(-1, 1, 9):
        h = 1e-6 * T
        fd = (thermal_occupation(1.0, T + h) - thermal_occupation(1.0, T - h)) / (2 * h)
        worst = max(worst, abs(fd / thermal_occupation_dT(1.0, T) - 1.0))
    return worst < 1e-7, f"max relative FD mismatch {worst:.1e}"


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------

@_register("probes", "states_validate")
def _check_states_validate() -> tuple[bool, str]:
    bad = []
    for spec in (ProbeSpec.fock(3), ProbeSpec.coherent(1.0), ProbeSpec.squeezed(0.8814),
                 ProbeSpec.thermal(1.0)):
        report = validate_density(make_state(spec, default_dim(spec)))
        if not report.passed:
            bad.append(f"{spec.canonical()}: {report.summary()}")
    return not bad, "; ".join(bad) or "all probe classes pass"


@_register("probes", "energy_matching")
def _check_energy_matching() -> tuple[bool, str]:
    worst = 0.0
    for n in (1.0, 2.0, 3.0):
        match = energy_match(n)
        for spec in (ProbeSpec.coherent(match.alpha_mod), ProbeSpec.squeezed(match.r)):
            rho = make_state(spec, default_dim(spec))
            worst = max(worst, abs(rho.mean_photon() - n))
    return worst < 1e-9, f"max |<n> - target| = {worst:.1e}"


@_register("probes", "squeezed_odd_levels")
def _check_squeezed_parity() -> tuple[bool, str]:
    rho = make_state(ProbeSpec.squeezed(0.8814), 60)
    odd = float(np.max(rho.populations[1::2]))
    return odd == 0.0, f"max odd-level population {odd:.1e}"


@_register("probes", "thermal_geometric")
def _check_thermal_geometric() -> tuple[bool, str]:
    nbar = 0.5
    p = make_state(ProbeSpec.thermal(nbar), 40).populations
    ratio = nbar / (nbar + 1.0)
    rel = np.abs(p[1:25] / p[:24] - ratio) / ratio
    worst = float(np.max(rel))
    return worst < 1e-12, f"max geometric-ratio defect {worst:.1e}"


# --------------------------------------------------------------------------
# dynamics
# --------------------------------------------------------------------------

@_register("dynamics", "trace_preservation")
def _check_trace() -> tuple[bool, str]:
    rho = make_state(ProbeSpec.coherent(1.0), 40)
    out = evolve(rho, rates(FIG_BATH), EvolutionConfig(t_final=0.5))
    defect = abs(float(out.mat.trace().real) - 1.0)
    return defect < 1e-9, f"|tr - 1| = {defect:.1e}"


@_register("dynamics", "diagonality_preservation")
def _check_diagonality() -> tuple[bool, str]:
    worst = 0.0
    for spec in (ProbeSpec.fock(1), ProbeSpec.thermal(0.5)):
        rho = make_state(spec, 40)
        out = evolve(rho, rates(FIG_BATH), EvolutionConfig(t_final=0.5))
        worst = max(worst, out.max_offdiagonal())
    return worst < 1e-12, f"max off-diagonal modulus {worst:.1e}"


@_register("dynamics", "oracle_agreement")
def _check_oracle_agreement() -> tuple[bool, str]:
    worst = 0.0
    for T in (0.3, 1.0):
        r = rates(FIG_BATH.with_temperature(T))
        for t in (0.2, 1.0):
            rho = make_state(ProbeSpec.fock(1), 30)
            full = evolve(rho, r, EvolutionConfig(t_final=t, method=EvolutionMethod.RK4_FULL))
            fast = evolve(rho, r, EvolutionConfig(t_final=t, method=EvolutionMethod.BIRTH_DEATH_EXPM))
            worst = max(worst, float(np.max(np.abs(full.populations - fast.populations))))
    return worst <= 1e-8, f"sup-norm population gap {worst:.1e}"


@_register("dynamics", "thermal_stationarity")
def _check_stationarity() -> tuple[bool, str]:
    nT = thermal_occupation(FIG_BATH.omega, FIG_BATH.T)
    rho = make_state(ProbeSpec.thermal(nT), 40)
    out = evolve(rho, rates(FIG_BATH), EvolutionConfig(t_final=1.0))
    drift = float(np.max(np.abs(out.mat - rho.mat)))
    return drift < 1e-8, f"sup-norm drift over t=1: {drift:.1e}"


@_register("dynamics", "first_moment_law")
def _check_first_moment() -> tuple[bool, str]:
    r = rates(FIG_BATH)
    worst = 0.0
    for spec in (ProbeSpec.fock(1), ProbeSpec.coherent(1.0), ProbeSpec.squeezed(0.8814),
                 ProbeSpec.thermal(0.5)):
        rho = make_state(spec, default_dim(spec))
        out = evolve(rho, r, EvolutionConfig(t_final=0.5))
        expected = mean_photon_analytic(rho.mean_photon(), r, 0.5)
        worst = max(worst, abs(out.mean_photon() - expected))
    return worst < 1e-7, f"max |<n> - analytic| = {worst:.1e}"


@_register("dynamics", "short_time_consistency")
def _check_short_time() -> tuple[bool, str]:
    r = rates(FIG_BATH)
    t = 1e-3 / r.gamma0 * 0.1  # Gamma0 t = 1e-4
    rho = evolve(make_state(ProbeSpec.fock(1), 30), r,
                 EvolutionConfig(t_final=t, method=EvolutionMethod.BIRTH_DEATH_EXPM))
    pred = short_time_populations(1, r, t)
    p = rho.populations
    band = 10.0 * r.gamma0 * t
    ratios = [p[0] / pred.p_below, p[1] / pred.p_stay, p[2] / pred.p_above]
    ok = all(1.0 - band <= x <= 1.0 + band for x in ratios)
    return ok, f"ratios to first order: {', '.join(f'{x:.6f}' for x in ratios)}"


# --------------------------------------------------------------------------
# fisher
# --------------------------------------------------------------------------

@_register("fisher", "cfi_equals_qfi_diagonal")
def _check_cfi_qfi_equal() -> tuple[bool, str]:
    worst = 0.0
    for spec in (ProbeSpec.fock(1), ProbeSpec.thermal(0.5)):
        c = qfi_point(spec, FIG_BATH, 0.2, FisherMethod.CFI_NUMBER).value
        q = qfi_point(spec, FIG_BATH, 0.2, FisherMethod.QFI_SLD).value
        worst = max(worst, abs(q - c) / c)
    return worst < 1e-8, f"max relative gap {worst:.1e}"


@_register("fisher", "qfi_at_least_cfi")
def _check_qfi_dominates() -> tuple[bool, str]:
    deriv = d_dT_state(ProbeSpec.coherent(1.0), FIG_BATH, 0.05)
    q = qfi_sld(deriv.rho, deriv.drho)
    c = cfi_number_basis(deriv.rho.populations, deriv.drho.diagonal().real)
    return q >= c - 1e-9, f"QFI {q:.6e} vs CFI {c:.6e}"


@_register("fisher", "phase_invariance")
def _check_phase_invariance() -> tuple[bool, str]:
    a = qfi_point(ProbeSpec.coherent(1.0), FIG_BATH, 0.05, FisherMethod.QFI_SLD).value
    b = qfi_point(ProbeSpec.coherent(1.0 * np.exp(0.7j)), FIG_BATH, 0.05,
                  FisherMethod.QFI_SLD).value
    rel = abs(a - b) / a
    return rel < 1e-8, f"relative phase sensitivity {rel:.1e}"


@_register("fisher", "richardson_consistency")
def _check_richardson() -> tuple[bool, str]:
    cfg = DerivativeConfig()
    plain = qfi_point(ProbeSpec.fock(1), FIG_BATH, 0.1, FisherMethod.CFI_NUMBER,
                      diff=DerivativeConfig(richardson=False)).value
    rich = qfi_point(ProbeSpec.fock(1), FIG_BATH, 0.1, FisherMethod.CFI_NUMBER).value
    rel = abs(rich - plain) / rich
    return rel < 100.0 * cfg.h_rel**2, f"|F_rich - F_plain|/F = {rel:.1e}"


@_register("fisher", "cramer_rao_identity")
def _check_cramer_rao() -> tuple[bool, str]:
    rec = qfi_point(ProbeSpec.fock(1), FIG_BATH, 0.1, FisherMethod.CFI_NUMBER)
    product = rec.delta_t_min**2 * rec.value
    return product == 1.0, f"deltaT^2 * F = {product!r}"


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------

@_register("bounds", "time_homogeneity")
def _check_homogeneity() -> tuple[bool, str]:
    t = 0.01
    lin = bound_fock_linear(2, FIG_BATH, 2 * t).value / bound_fock_linear(2, FIG_BATH, t).value
    quad = bound_squeezed(1.0, FIG_BATH, 2 * t).value / bound_squeezed(1.0, FIG_BATH, t).value
    coh = bound_coherent(1.0, FIG_BATH, 2 * t).value / bound_coherent(1.0, FIG_BATH, t).value
    ok = lin == 2.0 and quad == 4.0 and coh == 4.0
    return ok, f"scaling under t->2t: {lin}, {quad}, {coh}"


@_register("bounds", "monotone_in_n")
def _check_monotone() -> tuple[bool, str]:
    vals = [bound_fock_linear(n, FIG_BATH, 0.01).value for n in range(8)]
    ok = all(b > a for a, b in zip(vals, vals[1:]))
    return ok, f"linear law over n=0..7 spans {vals[0]:.3e}..{vals[-1]:.3e}"


@_register("bounds", "nonnegative_grid")
def _check_nonnegative() -> tuple[bool, str]:
    low = math.inf
    for x in np.logspace(math.log10(0.1), math.log10(20.0), 9):
        bath = BathParams(omega=1.0, T=1.0 / x)
        for n in (0, 1, 5, 10):
            low = min(
                low,
                bound_fock_linear(n, bath, 0.01).value,
                bound_fock_quadratic(n, bath, 0.01).value,
                bound_squeezed(float(n), bath, 0.01).value,
                bound_coherent(float(n), bath, 0.01).value,
            )
    return low >= 0.0, f"minimum over grid {low:.3e}"


@_register("bounds", "short_time_ratio")
def _check_short_time_ratio() -> tuple[bool, str]:
    r = rates(FIG_BATH)
    msgs = []
    ok = True
    for g0t, tol in ((1e-4, 0.05), (1e-5, 0.01)):
        t = g0t / r.gamma0
        cfi = qfi_point(ProbeSpec.fock(1), FIG_BATH, t, FisherMethod.CFI_NUMBER).value
        ratio = cfi / bound_fock_linear(1, FIG_BATH, t).value
        ok = ok and abs(ratio - 1.0) <= tol
        msgs.append(f"G0t={g0t:g}: ratio {ratio:.6f}")
    return ok, "; ".join(msgs)


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

@_register("sweep", "determinism")
def _check_determinism() -> tuple[bool, str]:
    spec = SweepSpec(
        axis=SweepAxis.TIME,
        axis_values=(0.01, 0.02, 0.05, 0.1),
        probes=(ProbeSpec.fock(1),),
        methods=(SweepMethod.BOUND_FOCK_LINEAR, SweepMethod.CFI),
        bath=FIG_BATH,
    )
    body1 = run_sweep(spec, workers=1).csv_body()
    body2 = run_sweep(spec, workers=2).csv_body()
    return body1 == body2, f"{len(body1)} CSV bytes, workers 1 vs 2"


@_register("sweep", "fit_exactness")
def _check_fit() -> tuple[bool, str]:
    ts = np.logspace(-3, -1, 6)
    lin = fit_scaling_exponent(ts, 3.0 * ts)
    quad = fit_scaling_exponent(ts, 0.5 * ts**2)
    ok = abs(lin.slope - 1.0) < 1e-9 and abs(quad.slope - 2.0) < 1e-9 and lin.r_squared > 1 - 1e-12
    return ok, f"slopes {lin.slope:.12f}, {quad.slope:.12f}"


@_register("sweep", "time_axis_monotone")
def _check_time_monotone() -> tuple[bool, str]:
    # information is nondecreasing in t while Gamma0 t <= 0.05
    spec = SweepSpec(
        axis=SweepAxis.TIME,
        axis_values=(0.1, 0.25, 0.5),
        probes=(ProbeSpec.fock(1),),
        methods=(SweepMethod.CFI,),
        bath=FIG_BATH,
    )
    vals = [row.qfi for row in run_sweep(spec, workers=1).rows]
    ok = all(b >= a for a, b in zip(vals, vals[1:]))
    return ok, f"CFI over t=(0.1, 0.25, 0.5): {', '.join(f'{v:.5e}' for v in vals)}"


@_register("sweep", "energy_matched_rows")
def _check_energy_matched_rows() -> tuple[bool, str]:
    spec = SweepSpec(
        axis=SweepAxis.EXCITATION_N,
        axis_values=(1.0, 3.0),
        probes=(ProbeKind.SQUEEZED, ProbeKind.COHERENT),
        methods=(SweepMethod.BOUND_SQUEEZED, SweepMethod.BOUND_COHERENT),
        bath=FIG_BATH,
        t=0.01,
    )
    worst = 0.0
    for row in run_sweep(spec, workers=1).rows:
        probe = ProbeSpec.parse(row.probe)
        rho = make_state(probe, default_dim(probe))
        worst = max(worst, abs(rho.mean_photon() - row.axis_value))
    return worst < 1e-8, f"max |<n> - axis value| = {worst:.1e}"


# --------------------------------------------------------------------------
# cli
# --------------------------------------------------------------------------

@_register("cli", "config_round_trip")
def _check_config_round_trip() -> tuple[bool, str]:
    from .cli import RunConfig, parse_config_text  # deferred: cli imports this module

    cfg = RunConfig(T=0.25, probe="fock:2", axis="time", axis_values=(0.01, 0.1))
    again = parse_config_text(cfg.to_text())
    return again == cfg, "serialize -> parse is the identity" if again == cfg else "round trip drifted"


MANIFEST: dict[str, tuple[str, ...]] = {
    "fockspace": ("adjoint_identity", "commutator_block", "state_spectra"),
    "bath": (
        "detailed_balance",
        "rate_gap_identity",
        "occupation_derivative_positive",
        "derivative_vs_finite_difference",
    ),
    "probes": ("states_validate", "energy_matching", "squeezed_odd_levels", "thermal_geometric"),
    "dynamics": (
        "trace_preservation",
        "diagonality_preservation",
        "oracle_agreement",
        "thermal_stationarity",
        "first_moment_law",
        "short_time_consistency",
    ),
    "fisher": (
        "cfi_equals_qfi_diagonal",
        "qfi_at_least_cfi",
        "phase_invariance",
        "richardson_consistency",
        "cramer_rao_identity",
    ),
    "bounds": ("time_homogeneity", "monotone_in_n", "nonnegative_grid", "short_time_ratio"),
    "sweep": ("determinism", "fit_exactness", "time_axis_monotone", "energy_matched_rows"),
    "cli": ("config_round_trip",),
}


def registered_checks() -> list[tuple[str, str]]:
    return [(group, name) for group, name, _ in _REGISTRY]


def run_selfcheck() -> list[CheckResult]:
    """Execute every registered invariant check."""
    results = []
    for group, name, fn in _REGISTRY:
        try:
            passed, detail = fn()
        except FockThermoError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name=name, group=group, passed=passed, detail=detail))
    return results
