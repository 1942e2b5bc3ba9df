"""Initial probe states: Fock, coherent, squeezed vacuum, and thermal.

Coherent and squeezed amplitude vectors are built by stable two-term
recurrences and renormalized after truncation, so the trace is exactly 1
while the discarded tail is bounded by the truncation budget. The
squeezed vacuum occupies even levels only; the thermal state is the
geometric distribution with ratio nbar/(nbar+1).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InvalidDimensionError, TruncationError
from .fockspace import DensityMatrix, check_dim

# A freshly constructed state must keep its renormalized top-level
# population below this; the discarded tail mass gets a looser hard cap
# (parity-structured states have an exactly empty top level, so the tail
# cap is what catches gross under-truncation for them).
TRUNCATION_TOL = 1e-10
TAIL_CAP = 1e-8

# Hard ceiling for automatic dimension growth; the FOCKTHERMO_DIM_MAX
# environment variable can lower it as a safety valve.
DIM_CEILING = 4096
DIM_MAX_ENV = "FOCKTHERMO_DIM_MAX"


def dim_ceiling() -> int:
    """Effective cap on automatic truncation growth."""
    raw = os.environ.get(DIM_MAX_ENV)
    if raw is None:
        return DIM_CEILING
    try:
        val = int(raw)
        if val < 2:
            raise ValueError
    except ValueError:
        raise DomainError(f"{DIM_MAX_ENV} must be an integer >= 2, got {raw!r}") from None
    return min(val, DIM_CEILING)


class ProbeKind(str, Enum):
    FOCK = "fock"
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    THERMAL = "thermal"


@dataclass(frozen=True)
class ProbeSpec:
    """Tagged description of an initial state.

    Exactly one of the payload fields is meaningful, selected by ``kind``:
    ``n`` (Fock), ``alpha`` (coherent), ``r`` (squeezed vacuum),
    ``nbar`` (thermal).
    """

    kind: ProbeKind
    n: int = 0
    alpha: complex = 0j
    r: float = 0.0
    nbar: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProbeKind(self.kind))
        if self.kind is ProbeKind.FOCK:
            if not isinstance(self.n, (int, np.integer)) or self.n < 0:
                raise DomainError(f"Fock excitation must be an integer >= 0, got {self.n!r}")
        elif self.kind is ProbeKind.COHERENT:
            if not np.isfinite(complex(self.alpha).real) or not np.isfinite(complex(self.alpha).imag):
                raise DomainError(f"coherent amplitude must be finite, got {self.alpha!r}")
        elif self.kind is ProbeKind.SQUEEZED:
            if not math.isfinite(self.r):
                raise DomainError(f"squeezing parameter must be finite, got {self.r!r}")
        else:
            if not (self.nbar >= 0.0) or not math.isfinite(self.nbar):
                raise DomainError(f"thermal occupation must be >= 0, got {self.nbar!r}")

    @classmethod
    def fock(cls, n: int) -> "ProbeSpec":
        return cls(kind=ProbeKind.FOCK, n=int(n))

    @classmethod
    def coherent(cls, alpha: complex) -> "ProbeSpec":
        return cls(kind=ProbeKind.COHERENT, alpha=complex(alpha))

    @classmethod
    def squeezed(cls, r: float) -> "ProbeSpec":
        return cls(kind=ProbeKind.SQUEEZED, r=float(r))

    @classmethod
    def thermal(cls, nbar: float) -> "ProbeSpec":
        return cls(kind=ProbeKind.THERMAL, nbar=float(nbar))

    @property
    def mean_photon(self) -> float:
        if self.kind is ProbeKind.FOCK:
            return float(self.n)
        if self.kind is ProbeKind.COHERENT:
            return abs(self.alpha) ** 2
        if self.kind is ProbeKind.SQUEEZED:
            return math.sinh(self.r) ** 2
        return self.nbar

    @property
    def is_number_diagonal(self) -> bool:
        return self.kind in (ProbeKind.FOCK, ProbeKind.THERMAL)

    def canonical(self) -> str:
        """Canonical text form, e.g. ``fock:3`` or ``squeezed:0.8813735870195429``."""
        if self.kind is ProbeKind.FOCK:
            return f"fock:{self.n}"
        if self.kind is ProbeKind.COHERENT:
            a = complex(self.alpha)
            payload = repr(a.real) if a.imag == 0.0 else repr(a).strip("()")
            return f"coherent:{payload}"
        if self.kind is ProbeKind.SQUEEZED:
            return f"squeezed:{self.r!r}"
        return f"thermal:{self.nbar!r}"

    @classmethod
    def parse(cls, text: str) -> "ProbeSpec":
        """Inverse of :meth:`canonical`; accepts e.g. ``fock:3``, ``coherent:1.0``."""
        head, sep, payload = text.strip().partition(":")
        if not sep or not payload:
            raise DomainError(f"probe spec must look like 'kind:value', got {text!r}")
        try:
            kind = ProbeKind(head.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in ProbeKind)
            raise DomainError(f"unknown probe kind {head!r} (expected one of: {valid})") from None
        payload = payload.strip()
        try:
            if kind is ProbeKind.FOCK:
                return cls.fock(int(payload))
            if kind is ProbeKind.COHERENT:
                return cls.coherent(complex(payload))
            if kind is ProbeKind.SQUEEZED:
                return cls.squeezed(float(payload))
            return cls.thermal(float(payload))
        except ValueError as exc:
            raise DomainError(f"bad probe payload in {text!r}: {exc}") from None


@dataclass(frozen=True)
class EnergyMatch:
    """Gaussian-probe parameters sharing a target mean photon number."""

    n_target: float
    r: float
    alpha_mod: float


def energy_match(n_target: float) -> EnergyMatch:
    """Squeezing and coherent amplitude with mean energy n_target.

    sinh^2(r) = n_target and alpha_mod^2 = n_target hold to machine
    precision by construction (r = asinh(sqrt(n_target))).
    """
    if not (n_target >= 0.0) or not math.isfinite(n_target):
        raise DomainError(f"target mean photon number must be >= 0, got {n_target!r}")
    root = math.sqrt(n_target)
    return EnergyMatch(n_target=float(n_target), r=math.asinh(root), alpha_mod=root)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalized truncation of exp(-|a|^2/2) sum_m a^m/sqrt(m!) |m>."""
    check_dim(dim)
    c = np.zeros(dim, dtype=complex)
    c[0] = 1.0
    for m in range(1, dim):
        c[m] = c[m - 1] * alpha / math.sqrt(m)
    return c * math.exp(-abs(alpha) ** 2 / 2.0)


def squeezed_amplitudes(r: float, dim: int) -> np.ndarray:
    """Unnormalized squeezed-vacuum amplitudes on even levels.

    c_{2k} = c_{2k-2} * (-tanh r) * sqrt((2k-1)/(2k)) starting from
    c_0 = 1/sqrt(cosh r); odd levels are exactly zero.
    """
    check_dim(dim)
    c = np.zeros(dim, dtype=complex)
    c[0] = 1.0 / math.sqrt(math.cosh(r))
    th = math.tanh(r)
    for k in range(1, (dim - 1) // 2 + 1):
        c[2 * k] = c[2 * k - 2] * (-th) * math.sqrt((2 * k - 1) / (2 * k))
    return c


def thermal_populations(nbar: float, dim: int) -> np.ndarray:
    """Unnormalized geometric populations (nbar/(nbar+1))^m."""
    check_dim(dim)
    if nbar == 0.0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    ratio = nbar / (nbar + 1.0)
    return ratio ** np.arange(dim) / (nbar + 1.0)


def _check_truncation(tail: float, top: float, what: str, dim: int) -> None:
    if tail > TAIL_CAP or top > TRUNCATION_TOL:
        raise TruncationError(
            f"dim={dim} too small for {what}: discarded tail {tail:.3e} "
            f"(cap {TAIL_CAP:.0e}), top-level population {top:.3e} "
            f"(budget {TRUNCATION_TOL:.0e}); raise dim"
        )


def make_state(spec: ProbeSpec, dim: int) -> DensityMatrix:
    """Density matrix of the probe on a dim-level space.

    Raises :class:`TruncationError` when the truncated tail or the top-level
    population exceeds the construction budget, and
    :class:`InvalidDimensionError` for a Fock excitation outside the space.
    """
    check_dim(dim)
    if spec.kind is ProbeKind.FOCK:
        if spec.n >= dim:
            raise InvalidDimensionError(f"Fock excitation n={spec.n} needs dim > n, got dim={dim}")
        mat = np.zeros((dim, dim), dtype=complex)
        mat[spec.n, spec.n] = 1.0
        return DensityMatrix(mat)

    if spec.kind is ProbeKind.THERMAL:
        p = thermal_populations(spec.nbar, dim)
        tail = max(0.0, 1.0 - float(p.sum()))
        p = p / p.sum()
        _check_truncation(tail, float(p[-1]), f"thermal nbar={spec.nbar}", dim)
        return DensityMatrix(np.diag(p).astype(complex))

    if spec.kind is ProbeKind.COHERENT:
        c = coherent_amplitudes(spec.alpha, dim)
        what = f"coherent |alpha|={abs(spec.alpha)}"
    else:
        c = squeezed_amplitudes(spec.r, dim)
        what = f"squeezed r={spec.r}"
    norm_sq = float(np.vdot(c, c).real)
    tail = max(0.0, 1.0 - norm_sq)
    c = c / math.sqrt(norm_sq)
    top = float(abs(c[-1]) ** 2)
    _check_truncation(tail, top, what, dim)
    return DensityMatrix(np.outer(c, c.conj()))


def default_dim(spec: ProbeSpec, minimum: int = 40, max_dim: int | None = None) -> int:
    """Truncation adequate for the probe: max(40, 8*max(n, nbar)+20),
    grown further until the discarded tail is negligible.

    Squeezed (and high-nbar thermal) states have slowly decaying tails, so
    the closed-form floor alone can under-truncate them; growth stops once
    tail * dim <= 1e-9, which caps the renormalization shift of the mean
    photon number below 1e-9 as well. Growth never exceeds ``max_dim``
    (default: :func:`dim_ceiling`).
    """
    if max_dim is None:
        max_dim = dim_ceiling()
    base = max(minimum, int(math.ceil(8 * max(spec.mean_photon, 0.0) + 20)))
    if spec.kind is ProbeKind.FOCK:
        if spec.n + 2 > max_dim:
            raise TruncationError(
                f"Fock n={spec.n} needs at least {spec.n + 2} levels, above the cap {max_dim}"
            )
        return min(max(base, spec.n + 2), max_dim)
    dim = min(base, max_dim)
    while dim <= max_dim:
        if spec.kind is ProbeKind.COHERENT:
            c = coherent_amplitudes(spec.alpha, dim)
            tail = max(0.0, 1.0 - float(np.vdot(c, c).real))
        elif spec.kind is ProbeKind.SQUEEZED:
            c = squeezed_amplitudes(spec.r, dim)
            tail = max(0.0, 1.0 - float(np.vdot(c, c).real))
        else:
            tail = max(0.0, 1.0 - float(thermal_populations(spec.nbar, dim).sum()))
        if tail * dim <= 1e-9:
            return dim
        dim += 4
    raise TruncationError(
        f"no dimension <= {max_dim} reaches the truncation budget for {spec.canonical()}"
    )
