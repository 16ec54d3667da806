"""Run configuration and deterministic JSON/CSV output."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .arith import frac_str, parse_frac
from .checks import to_plain
from .errors import InvalidParams
from .spaces import GridFunction, SpectrumPoint
from .systems import (
    CircleWinding,
    ConstPoint,
    ExpWinding,
    IdentityInterval,
    InductiveSystem,
    RootOrbit,
    SystemParams,
    default_t_seq,
    default_z_seq,
    multiplicity_matrix,
)

CONFIG_FIELDS = ("k_seq", "t_seq", "z_seq", "stage_count", "grid_resolution", "seed", "random_count")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run. Defaults reproduce the acceptance suite."""

    stage_count: int = 6
    grid_resolution: int = 4096
    k_seq: tuple[int, ...] | None = None
    t_seq: tuple[Fraction, ...] | None = None
    z_seq: tuple[Fraction, ...] | None = None
    seed: int = 0
    random_count: int = 100

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(CONFIG_FIELDS)
        if unknown:
            raise InvalidParams(f"unknown config fields: {sorted(unknown)}")
        kw: dict[str, Any] = {}
        try:
            for key in ("stage_count", "grid_resolution", "seed", "random_count"):
                if key in data:
                    kw[key] = int(data[key])
            if "k_seq" in data:
                kw["k_seq"] = tuple(int(k) for k in data["k_seq"])
            for key in ("t_seq", "z_seq"):
                if key in data:
                    kw[key] = tuple(parse_frac(str(v)) for v in data[key])
        except (TypeError, ValueError) as exc:
            raise InvalidParams(f"malformed config: {exc}") from exc
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParams(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidParams("config must be a JSON object")
        return cls.from_mapping(data)

    def params(self) -> SystemParams:
        steps = max(self.stage_count - 1, 0)
        ks = self.k_seq if self.k_seq is not None else tuple(range(2, steps + 2))
        try:
            ts = tuple(SpectrumPoint.interval(t) for t in self.t_seq) if self.t_seq is not None else default_t_seq(steps)
            zs = tuple(SpectrumPoint.circle(z) for z in self.z_seq) if self.z_seq is not None else default_z_seq(steps)
        except ValueError as exc:
            raise InvalidParams(str(exc)) from exc
        return SystemParams(ks, ts, zs, self.stage_count, self.grid_resolution)

    def to_json(self) -> dict:
        p = self.params()
        return {
            "stage_count": self.stage_count,
            "grid_resolution": self.grid_resolution,
            "k_seq": list(p.k_seq),
            "t_seq": [frac_str(t.coordinate) for t in p.t_seq],
            "z_seq": [frac_str(z.coordinate) for z in p.z_seq],
            "seed": self.seed,
            "random_count": self.random_count,
        }


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------


def map_to_json(lam) -> dict:
    if isinstance(lam, ConstPoint):
        c = lam.point.coordinate
        return {"map": "const", "space": lam.point.space.value, "point": frac_str(c) if isinstance(c, (Fraction, int)) else c}
    if isinstance(lam, IdentityInterval):
        return {"map": "id"}
    if isinstance(lam, CircleWinding):
        return {"map": "z^w", "winding": lam.winding}
    if isinstance(lam, ExpWinding):
        return {"map": "exp", "winding": lam.winding}
    if isinstance(lam, RootOrbit):
        return {"map": "orbit", "order": lam.order, "start": lam.start, "stop": lam.stop, "stride": lam.stride}
    raise TypeError(f"unknown spectral map {lam!r}")


def system_to_json(sys: InductiveSystem) -> dict:
    stages = [
        {"stage": n, "blocks": [{"size": b.size, "space": b.space.value} for b in sys.blocks(n)]}
        for n in range(1, sys.stage_count + 1)
    ]
    steps = []
    for n in range(1, sys.stage_count):
        h = sys.step(n)
        parts = []
        for (i, j), part in sorted(h.parts.items()):
            parts.append(
                {
                    "source": i + 1,
                    "target": j + 1,
                    "rank": part.rank,
                    "pattern": [{**map_to_json(t.map), "mult": t.mult} for t in part.pattern.terms],
                }
            )
        steps.append({"step": n, "multiplicities": multiplicity_matrix(h), "parts": parts})
    return to_plain({"name": sys.name, "stages": stages, "steps": steps})


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def dumps(doc: Any) -> str:
    return json.dumps(to_plain(doc), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, doc: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc))


def write_functions_csv(path: Path, columns: Sequence[tuple[str, GridFunction]]) -> None:
    """One row per node: ``x`` followed by the named functions (all on one grid)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    x = columns[0][1].nodes
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [name for name, _ in columns])
        data = np.column_stack([x] + [f.samples for _, f in columns])
        for row in data:
            w.writerow([repr(float(v)) for v in row])
