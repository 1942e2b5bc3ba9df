"""Temperature-sensitivity measures of the evolved probe.

The state derivative is taken end to end: the full evolution is run at
shifted bath temperatures and differenced centrally (optionally with one
Richardson step), so a single code path covers every probe class. From
(rho, d rho/dT) two figures of merit follow:

* number-basis classical Fisher information sum_m (dp_m)^2 / p_m, and
* the full quantum Fisher information
  2 sum_{ij} |<i| d rho |j>|^2 / (lambda_i + lambda_j)
  over the eigendecomposition of rho.

For number-diagonal states the two coincide; for states with coherences
the quantum value can only be larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .bath import BathParams, rates
from .dynamics import (
    EvolutionConfig,
    EvolutionMethod,
    evolve,
    population_vector,
)
from .errors import DomainError, SingularSupportError
from .fockspace import EIGENVALUE_FLOOR, LEAKAGE_BUDGET, DensityMatrix
from .probes import ProbeSpec, default_dim, make_state

# Populations below this are excluded from classical Fisher sums: they add
# at most numerical noise but can explode by division.
P_FLOOR = 1e-14

# A zero-probability outcome whose derivative exceeds this is a genuine
# information divergence rather than roundoff.
SINGULAR_DP = 1e-12


class FisherMethod(str, Enum):
    CFI_NUMBER = "cfi"
    QFI_SLD = "qfi"


@dataclass(frozen=True)
class DerivativeConfig:
    """Central-difference step control for d/dT."""

    h_rel: float = 1e-4
    richardson: bool = True
    h_abs_floor: float = 1e-7

    def __post_init__(self) -> None:
        if not (self.h_rel > 0.0) or not (self.h_abs_floor > 0.0):
            raise DomainError("h_rel and h_abs_floor must both be > 0")


DEFAULT_DIFF = DerivativeConfig()


@dataclass(frozen=True)
class TemperatureDerivative:
    """Evolved state, its temperature derivative, and evaluation diagnostics."""

    rho: DensityMatrix
    drho: np.ndarray
    h_used: float
    leakage: float
    dim: int


def _pick_method(probe: ProbeSpec, method: EvolutionMethod | None) -> EvolutionMethod:
    if method is not None:
        return method
    if probe.is_number_diagonal:
        return EvolutionMethod.BIRTH_DEATH_EXPM
    return EvolutionMethod.RK4_FULL


def d_dT_state(
    probe: ProbeSpec,
    bath: BathParams,
    t: float,
    *,
    dim: int | None = None,
    method: EvolutionMethod | None = None,
    dt: float | None = None,
    leakage_budget: float = LEAKAGE_BUDGET,
    diff: DerivativeConfig = DEFAULT_DIFF,
) -> TemperatureDerivative:
    """Evolved state rho(t; T) and its central-difference d rho/dT.

    The probe itself is temperature independent; only the bath rates move.
    All shifted evolutions share one step size (chosen from the central
    rates) so integrator bias cancels in the difference. With Richardson
    enabled the h and h/2 estimates combine as (4 D_{h/2} - D_h) / 3.
    """
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    dim = default_dim(probe) if dim is None else dim
    rho0 = make_state(probe, dim)
    evo_method = _pick_method(probe, method)

    h = max(diff.h_rel * bath.T, diff.h_abs_floor)
    while bath.T - h <= 0.0:
        h /= 2.0
        if bath.T + h == bath.T:
            raise DomainError(f"derivative step underflowed at T={bath.T!r}")

    step = dt
    if step is None and evo_method is EvolutionMethod.RK4_FULL and t > 0.0:
        step = EvolutionConfig(t_final=t).step(rates(bath))

    def run(T_shifted: float) -> DensityMatrix:
        cfg = EvolutionConfig(t_final=t, dt=step, method=evo_method, leakage_budget=leakage_budget)
        return evolve(rho0, rates(bath.with_temperature(T_shifted)), cfg)

    center = run(bath.T)
    plus, minus = run(bath.T + h), run(bath.T - h)
    deriv = (plus.mat - minus.mat) / (2.0 * h)
    states = [center, plus, minus]
    if diff.richardson:
        plus2, minus2 = run(bath.T + h / 2.0), run(bath.T - h / 2.0)
        half = (plus2.mat - minus2.mat) / h
        deriv = (4.0 * half - deriv) / 3.0
        states += [plus2, minus2]
    deriv = 0.5 * (deriv + deriv.conj().T)
    leakage = max(s.top_level_population for s in states)
    return TemperatureDerivative(rho=center, drho=deriv, h_used=h, leakage=leakage, dim=dim)


def cfi_number_basis(p: np.ndarray, dp: np.ndarray, *, p_floor: float = P_FLOOR) -> float:
    """Classical Fisher information of the photon-number distribution."""
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if p.shape != dp.shape:
        raise DomainError(f"p and dp must have equal length, got {p.shape} vs {dp.shape}")
    singular = (p <= 0.0) & (np.abs(dp) > SINGULAR_DP)
    if np.any(singular):
        m = int(np.argmax(singular))
        raise SingularSupportError(
            f"outcome m={m} has p=0 but dp={dp[m]:.3e}: Fisher information diverges"
        )
    keep = p > p_floor
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def qfi_sld(
    rho: DensityMatrix | np.ndarray,
    drho: np.ndarray,
    *,
    lam_floor: float = EIGENVALUE_FLOOR,
) -> float:
    """Quantum Fisher information from the symmetric logarithmic derivative."""
    value, _ = qfi_sld_detailed(rho, drho, lam_floor=lam_floor)
    return value


def qfi_sld_detailed(
    rho: DensityMatrix | np.ndarray,
    drho: np.ndarray,
    *,
    lam_floor: float = EIGENVALUE_FLOOR,
) -> tuple[float, int]:
    """QFI plus the number of eigenpairs dropped by the spectral floor.

    Eigenvalues with |lambda| < the floor are treated as exact zeros, and
    pairs with lambda_i + lambda_j <= lam_floor are excluded from the sum.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if float(np.max(np.abs(mat - mat.conj().T))) > 1e-10:
        raise DomainError("qfi_sld: state is not Hermitian")
    if float(np.max(np.abs(drho - drho.conj().T))) > 1e-10:
        raise DomainError("qfi_sld: state derivative is not Hermitian")
    lam, vecs = np.linalg.eigh(mat)
    lam = np.where(np.abs(lam) < EIGENVALUE_FLOOR, 0.0, lam)
    # roundoff negatives clamp to zero so no denominator can sit near zero
    # with the wrong sign; genuine positivity violations are caught upstream
    lam = np.where(lam < 0.0, 0.0, lam)
    m = vecs.conj().T @ drho @ vecs
    denom = lam[:, None] + lam[None, :]
    keep = denom > lam_floor
    value = 2.0 * float(np.sum(np.abs(m[keep]) ** 2 / denom[keep]))
    dropped = int(keep.size - int(keep.sum()))
    return value, dropped


def delta_t_min(fisher_value: float) -> float:
    """Cramer-Rao floor 1/sqrt(F); infinite for zero information."""
    if fisher_value < 0.0:
        raise DomainError(f"Fisher information must be >= 0, got {fisher_value!r}")
    if fisher_value == 0.0:
        return math.inf
    return 1.0 / math.sqrt(fisher_value)


@dataclass(frozen=True)
class QfiRecord:
    """One evaluated Fisher-information point with its inputs and diagnostics."""

    value: float
    method: str
    t: float
    probe: ProbeSpec
    bath: BathParams
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = self.value
        if v < 0.0:
            if v < -1e-12:
                raise DomainError(f"Fisher information {v!r} is negative beyond roundoff")
            object.__setattr__(self, "value", 0.0)

    @property
    def delta_t_min(self) -> float:
        return delta_t_min(self.value)


def qfi_point(
    probe: ProbeSpec,
    bath: BathParams,
    t: float,
    method: FisherMethod,
    *,
    dim: int | None = None,
    evolution: EvolutionMethod | None = None,
    dt: float | None = None,
    leakage_budget: float = LEAKAGE_BUDGET,
    diff: DerivativeConfig = DEFAULT_DIFF,
) -> QfiRecord:
    """Single Fisher-information evaluation at time t."""
    method = FisherMethod(method)
    deriv = d_dT_state(
        probe, bath, t,
        dim=dim, method=evolution, dt=dt, leakage_budget=leakage_budget, diff=diff,
    )
    dropped = 0
    if method is FisherMethod.CFI_NUMBER:
        p = population_vector(deriv.rho.populations)
        value = cfi_number_basis(p, deriv.drho.diagonal().real)
    else:
        value, dropped = qfi_sld_detailed(deriv.rho, deriv.drho)
    if -1e-12 <= value < 0.0:
        value = 0.0
    return QfiRecord(
        value=value,
        method=method.value,
        t=t,
        probe=probe,
        bath=bath,
        diagnostics={
            "h_used": deriv.h_used,
            "dropped_pairs": dropped,
            "leakage": deriv.leakage,
            "dim": deriv.dim,
        },
    )


def qfi_curve(
    probe: ProbeSpec,
    bath: BathParams,
    t_grid: Sequence[float],
    method: FisherMethod,
    *,
    dim: int | None = None,
    evolution: EvolutionMethod | None = None,
    dt: float | None = None,
    leakage_budget: float = LEAKAGE_BUDGET,
    diff: DerivativeConfig = DEFAULT_DIFF,
) -> list[QfiRecord]:
    """Fisher information along an ascending time grid."""
    t_grid = list(t_grid)
    if not t_grid:
        raise DomainError("t_grid must be nonempty")
    if any(t < 0.0 for t in t_grid) or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise DomainError("t_grid must be strictly ascending and nonnegative")
    return [
        qfi_point(
            probe, bath, t, method,
            dim=dim, evolution=evolution, dt=dt, leakage_budget=leakage_budget, diff=diff,
        )
        for t in t_grid
    ]
