"""Experiment configuration and run reports."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError

EXPERIMENTS = ("fig1", "consistency", "multiscale", "verify")
OUT_ENV = "TDA_OUT_DIR"


@dataclass(frozen=True)
class Fig1Params:
    grid: int = 64
    well_radius: float = 14.0
    band: float = 1.5  # half-width of the zero-valued ring
    disc_radius: float = 7.0  # masked centre in variant (ii)
    noise_radius: float = 24.5  # distance of the noise holes from the centre
    noise_angles: tuple[float, ...] = (20.0, 140.0, 260.0)
    near_band: float = 0.05  # fraction of d - b


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "verify"
    p: float = 2.0
    dims: tuple[int, ...] = (0, 1)
    seed: int = 0
    sample_sizes: tuple[int, ...] = (25, 50, 100, 200, 400)
    replicates: int = 20
    t_grid: tuple[float, ...] = tuple(np.geomspace(0.01, 10.0, 16).tolist())
    t_checks: tuple[float, ...] = (0.1, 1.0, 10.0)
    perturbations: int = 50
    circle_size: int = 24
    rate_s: float = 2.0  # user-supplied exponent s > d_p*(alpha) for the rate table
    graph: str = "barbell"  # barbell | cycle | path to an edge CSV or OFF mesh
    volumes: str | None = None
    alpha: str | None = None
    weighting: str = "unit"  # mesh edge weights: unit | cotangent
    trials: int = 200
    complexes: int = 100
    fault: str | None = None  # verify negative control, e.g. "skip-diagonal-zeroing"
    tol: float = 1e-9
    fig1: Fig1Params = field(default_factory=Fig1Params)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InputError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not self.p >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        if list(self.sample_sizes) != sorted(set(self.sample_sizes)):
            raise InputError("sample sizes must be strictly increasing")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        ts = np.asarray(self.t_grid, dtype=float)
        if ts.size < 2 or (ts <= 0).any() or (np.diff(ts) <= 0).any():
            raise InputError("t-grid must be positive and strictly increasing")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


def _coerce(cls, data: dict):
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(names)
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    for k, v in data.items():
        if k == "fig1":
            v = _coerce(Fig1Params, v)
        elif isinstance(v, list):
            v = tuple(v)
        kw[k] = v
    return cls(**kw)


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a TOML or JSON config; keyword overrides win. Keys may use dashes."""
    data: dict = {}
    if path is not None:
        text = Path(path).read_bytes()
        if str(path).endswith(".json"):
            data = json.loads(text)
        else:
            try:
                import tomllib
            except ModuleNotFoundError:  # Python 3.10
                import tomli as tomllib

            data = tomllib.loads(text.decode())
    data = {k.replace("-", "_"): v for k, v in data.items()}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return _coerce(ExperimentConfig, data)


def output_dir(cli_value=None, default="runs") -> Path:
    """``--out`` beats the environment override, which beats the default."""
    return Path(cli_value or os.environ.get(OUT_ENV) or default)


# -- reports -------------------------------------------------------------------------


def jsonable(obj):
    """Plain JSON value; non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    return obj


@dataclass(frozen=True)
class Verdict:
    """``lhs <= rhs + tol``; ``margin`` is ``rhs - lhs`` (negative when violated)."""

    name: str
    lhs: float
    rhs: float
    tol: float = 0.0
    relation: str = "<="

    @property
    def margin(self) -> float:
        if self.lhs == self.rhs:
            return 0.0
        if self.relation == "==":
            return -abs(self.lhs - self.rhs)
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "tol": self.tol,
            "margin": self.margin,
            "holds": self.holds,
        }


@dataclass
class RunReport:
    experiment: str
    config: dict
    inputs_digest: str = ""
    stages: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def check(self, name, lhs, rhs, tol=0.0, relation="<=") -> Verdict:
        v = Verdict(name, float(lhs), float(rhs), tol, relation)
        self.verdicts.append(v)
        return v

    def require(self, name: str, ok: bool) -> Verdict:
        """A boolean assertion, recorded as ``1 == 1`` or ``0 == 1``."""
        return self.check(name, float(bool(ok)), 1.0, relation="==")

    @property
    def ok(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.holds]

    def to_dict(self) -> dict:
        return jsonable(
            {
                "experiment": self.experiment,
                "config": self.config,
                "inputs_digest": self.inputs_digest,
                "ok": self.ok,
                "stages": self.stages,
                "verdicts": [v.to_dict() for v in self.verdicts],
            }
        )

    def write(self, out: Path) -> None:
        """report.json is byte-deterministic; wall-clock times go to timings.json."""
        out.mkdir(parents=True, exist_ok=True)
        dump = lambda obj: json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"  # noqa: E731
        (out / "report.json").write_text(dump(self.to_dict()))
        (out / "timings.json").write_text(dump(jsonable(self.timings)))


def digest(config: ExperimentConfig, files=()) -> str:
    h = hashlib.sha256(json.dumps(jsonable(config.to_dict()), sort_keys=True).encode())
    for f in files:
        if f is not None and Path(f).is_file():
            h.update(Path(f).read_bytes())
    return h.hexdigest()
