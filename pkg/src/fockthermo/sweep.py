"""Parameter sweeps over excitation number, temperature, coupling, decay
rate, or time, evaluated point by point with deterministic aggregation.

Every point is a pure computation, so results are identical for any worker
count; points are split round-robin across a process pool and reassembled
by index. CSV bodies carry a fixed column schema and are written
atomically (temp file + rename); a JSON mirror adds a metadata block.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bath import BathParams, RateModel
from .bounds import (
    bound_coherent,
    bound_fock_linear,
    bound_fock_quadratic,
    bound_squeezed,
    short_time_valid,
)
from .errors import DomainError, FockThermoError, InsufficientDataError, SweepError
from .fisher import DEFAULT_DIFF, DerivativeConfig, FisherMethod, delta_t_min, qfi_point
from .probes import ProbeKind, ProbeSpec, energy_match

CSV_HEADER = "axis,axis_value,probe,method,qfi,delta_t_min,valid_short_time,leakage,h_used,dim"


class SweepAxis(str, Enum):
    EXCITATION_N = "excitation_n"
    TEMPERATURE = "temperature"
    COUPLING_G = "coupling_g"
    DECAY_GAMMA = "decay_gamma"
    TIME = "time"


class SweepMethod(str, Enum):
    CFI = "cfi"
    QFI = "qfi"
    BOUND_FOCK_LINEAR = "bound_fock_linear"
    BOUND_FOCK_QUADRATIC = "bound_fock_quadratic"
    BOUND_SQUEEZED = "bound_squeezed"
    BOUND_COHERENT = "bound_coherent"


# A bound method only applies to the probe class it was derived for.
_BOUND_FOR_KIND = {
    ProbeKind.FOCK: {SweepMethod.BOUND_FOCK_LINEAR, SweepMethod.BOUND_FOCK_QUADRATIC},
    ProbeKind.SQUEEZED: {SweepMethod.BOUND_SQUEEZED},
    ProbeKind.COHERENT: {SweepMethod.BOUND_COHERENT},
    ProbeKind.THERMAL: set(),
}


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    axis_values: tuple[float, ...]
    probes: tuple[ProbeSpec | ProbeKind, ...]
    methods: tuple[SweepMethod, ...] = (SweepMethod.QFI,)
    bath: BathParams = BathParams()
    t: float = 0.5
    dim: int | None = None
    diff: DerivativeConfig = DEFAULT_DIFF
    leakage_budget: float = 1e-8

    def __post_init__(self) -> None:
        object.__setattr__(self, "axis", SweepAxis(self.axis))
        object.__setattr__(self, "axis_values", tuple(float(v) for v in self.axis_values))
        object.__setattr__(self, "methods", tuple(SweepMethod(m) for m in self.methods))
        if not self.axis_values:
            raise DomainError("axis_values must be nonempty")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise DomainError("axis_values must be strictly ascending")
        if not self.probes or not self.methods:
            raise DomainError("probes and methods must be nonempty")
        probes = []
        for p in self.probes:
            if isinstance(p, ProbeSpec):
                if self.axis is SweepAxis.EXCITATION_N:
                    raise DomainError(
                        "the excitation axis instantiates probes per axis value; "
                        f"pass probe kinds, not {p.canonical()!r}"
                    )
                probes.append(p)
            else:
                kind = ProbeKind(p)
                if self.axis is not SweepAxis.EXCITATION_N:
                    raise DomainError(
                        f"bare probe kind {kind.value!r} is only valid on the excitation axis"
                    )
                probes.append(kind)
        object.__setattr__(self, "probes", tuple(probes))
        self._validate_axis_domain()

    def _validate_axis_domain(self) -> None:
        low = self.axis_values[0]
        if self.axis is SweepAxis.EXCITATION_N:
            if any(v != int(v) or v < 0 for v in self.axis_values):
                raise DomainError("excitation axis values must be integers >= 0")
        elif self.axis in (SweepAxis.TEMPERATURE, SweepAxis.DECAY_GAMMA):
            if low <= 0.0:
                raise DomainError(f"{self.axis.value} values must be > 0")
        elif self.axis is SweepAxis.COUPLING_G:
            if low < 0.0:
                raise DomainError("coupling values must be >= 0")
        elif low < 0.0:
            raise DomainError("time values must be >= 0")

    def echo(self) -> dict:
        return {
            "axis": self.axis.value,
            "axis_values": list(self.axis_values),
            "probes": [
                p.canonical() if isinstance(p, ProbeSpec) else p.value for p in self.probes
            ],
            "methods": [m.value for m in self.methods],
            "bath": {
                "omega": self.bath.omega,
                "T": self.bath.T,
                "gamma": self.bath.gamma,
                "g": self.bath.g,
                "rate_model": self.bath.rate_model.value,
            },
            "t": self.t,
            "dim": self.dim,
        }


@dataclass(frozen=True)
class SweepRow:
    axis: str
    axis_value: float
    probe: str
    method: str
    qfi: float
    delta_t_min: float
    valid_short_time: bool
    leakage: float
    h_used: float
    dim: int
    error: str | None = None

    def csv_line(self) -> str:
        f = lambda x: format(x, ".9g")
        return ",".join(
            [
                self.axis,
                f(self.axis_value),
                self.probe,
                self.method,
                f(self.qfi),
                f(self.delta_t_min),
                "true" if self.valid_short_time else "false",
                f(self.leakage),
                f(self.h_used),
                str(self.dim),
            ]
        )

    def as_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("qfi", "delta_t_min", "leakage", "h_used"):
            if isinstance(d[key], float) and not math.isfinite(d[key]):
                d[key] = None
        return d


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    metadata: dict

    def csv_body(self) -> str:
        return "\n".join([CSV_HEADER] + [row.csv_line() for row in self.rows]) + "\n"

    def write_csv(self, path: str | Path) -> None:
        _atomic_write(Path(path), self.csv_body())

    def write_json(self, path: str | Path) -> None:
        payload = {
            "metadata": self.metadata,
            "rows": [row.as_json_dict() for row in self.rows],
        }
        _atomic_write(Path(path), json.dumps(payload, indent=2, allow_nan=False) + "\n")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class _Point:
    axis: SweepAxis
    axis_value: float
    bath: BathParams
    t: float
    probe: ProbeSpec
    method: SweepMethod
    dim: int | None
    diff: DerivativeConfig
    leakage_budget: float


def _instantiate_probe(entry: ProbeSpec | ProbeKind, n: float) -> ProbeSpec:
    if isinstance(entry, ProbeSpec):
        return entry
    match = energy_match(n)
    if entry is ProbeKind.FOCK:
        return ProbeSpec.fock(int(n))
    if entry is ProbeKind.SQUEEZED:
        return ProbeSpec.squeezed(match.r)
    if entry is ProbeKind.COHERENT:
        return ProbeSpec.coherent(match.alpha_mod)
    return ProbeSpec.thermal(n)


def _plan(spec: SweepSpec) -> list[_Point]:
    points: list[_Point] = []
    for value in spec.axis_values:
        bath, t = spec.bath, spec.t
        if spec.axis is SweepAxis.TEMPERATURE:
            bath = dataclasses.replace(bath, T=value)
        elif spec.axis is SweepAxis.COUPLING_G:
            bath = dataclasses.replace(bath, g=value, rate_model=RateModel.PURCELL)
        elif spec.axis is SweepAxis.DECAY_GAMMA:
            bath = dataclasses.replace(bath, gamma=value, rate_model=RateModel.MARKOVIAN)
        elif spec.axis is SweepAxis.TIME:
            t = value
        for entry in spec.probes:
            probe = _instantiate_probe(entry, value)
            for method in spec.methods:
                if method.value.startswith("bound_") and method not in _BOUND_FOR_KIND[probe.kind]:
                    continue  # bound derived for a different probe class
                points.append(
                    _Point(
                        axis=spec.axis,
                        axis_value=value,
                        bath=bath,
                        t=t,
                        probe=probe,
                        method=method,
                        dim=spec.dim,
                        diff=spec.diff,
                        leakage_budget=spec.leakage_budget,
                    )
                )
    return points


def _evaluate_point(pt: _Point) -> SweepRow:
    base = dict(
        axis=pt.axis.value,
        axis_value=pt.axis_value,
        probe=pt.probe.canonical(),
        method=pt.method.value,
    )
    try:
        if pt.method in (SweepMethod.CFI, SweepMethod.QFI):
            fisher_method = (
                FisherMethod.CFI_NUMBER if pt.method is SweepMethod.CFI else FisherMethod.QFI_SLD
            )
            record = qfi_point(
                pt.probe, pt.bath, pt.t, fisher_method,
                dim=pt.dim, leakage_budget=pt.leakage_budget, diff=pt.diff,
            )
            return SweepRow(
                **base,
                qfi=record.value,
                delta_t_min=record.delta_t_min,
                valid_short_time=short_time_valid(pt.bath, pt.t, pt.probe.mean_photon),
                leakage=record.diagnostics["leakage"],
                h_used=record.diagnostics["h_used"],
                dim=record.diagnostics["dim"],
            )
        if pt.method is SweepMethod.BOUND_FOCK_LINEAR:
            bound = bound_fock_linear(pt.probe.n, pt.bath, pt.t)
        elif pt.method is SweepMethod.BOUND_FOCK_QUADRATIC:
            bound = bound_fock_quadratic(pt.probe.n, pt.bath, pt.t)
        elif pt.method is SweepMethod.BOUND_SQUEEZED:
            bound = bound_squeezed(pt.probe.mean_photon, pt.bath, pt.t)
        else:
            bound = bound_coherent(pt.probe.mean_photon, pt.bath, pt.t)
        return SweepRow(
            **base,
            qfi=bound.value,
            delta_t_min=delta_t_min(bound.value),
            valid_short_time=bound.valid_short_time,
            leakage=0.0,
            h_used=0.0,
            dim=0,
        )
    except FockThermoError as exc:
        return SweepRow(
            **base,
            qfi=math.nan,
            delta_t_min=math.nan,
            valid_short_time=False,
            leakage=math.nan,
            h_used=math.nan,
            dim=0,
            error=f"{type(exc).__name__}: {exc}",
        )


def _evaluate_slice(batch: list[tuple[int, _Point]]) -> list[tuple[int, SweepRow]]:
    return [(idx, _evaluate_point(pt)) for idx, pt in batch]


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate the sweep; output is independent of the worker count.

    Individual point failures are recorded on their rows and the sweep
    continues; more than 50% failures raise :class:`SweepError`.
    """
    started = time.monotonic()
    points = _plan(spec)
    if not points:
        raise SweepError("sweep plan is empty (no probe/method combination applies)")
    workers = os.cpu_count() or 1 if workers is None else int(workers)
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers!r}")
    indexed = list(enumerate(points))
    if workers == 1 or len(points) == 1:
        gathered = _evaluate_slice(indexed)
    else:
        workers = min(workers, len(points))
        slices = [indexed[i::workers] for i in range(workers)]  # static round-robin
        gathered = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_evaluate_slice, slices):
                gathered.extend(part)
    gathered.sort(key=lambda pair: pair[0])
    rows = tuple(row for _, row in gathered)

    failures = [
        {"axis_value": r.axis_value, "probe": r.probe, "method": r.method, "reason": r.error}
        for r in rows
        if r.error is not None
    ]
    if len(failures) * 2 > len(rows):
        raise SweepError(
            f"{len(failures)}/{len(rows)} sweep points failed; first: {failures[0]['reason']}"
        )
    metadata = {
        "spec": spec.echo(),
        "version": __version__,
        "wall_time_s": time.monotonic() - started,
        "n_points": len(rows),
        "n_failed": len(failures),
        "failures": failures,
    }
    return SweepResult(rows=rows, metadata=metadata)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    n_used: int


def fit_scaling_exponent(times: Sequence[float], values: Sequence[float]) -> ScalingFit:
    """Least-squares slope of log(value) against log(t).

    Nonpositive values are excluded; at least four usable points are
    required.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise DomainError("times and values must have equal length")
    keep = (times > 0.0) & (values > 0.0) & np.isfinite(values)
    if int(keep.sum()) < 4:
        raise InsufficientDataError(
            f"need >= 4 positive points for a power-law fit, have {int(keep.sum())}"
        )
    x = np.log(times[keep])
    y = np.log(values[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ScalingFit(
        slope=float(slope), intercept=float(intercept), r_squared=r2, n_used=int(keep.sum())
    )
