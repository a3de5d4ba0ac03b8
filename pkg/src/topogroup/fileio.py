"""File formats: point CSV, label lists, trajectory JSONL, diagram records.

Coordinates are written with 17 significant digits, which round-trips any
IEEE double bit-exactly through text.  Trajectory floats go through json,
whose repr-based serialization is also exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import EmptyInputError, RaggedDimensionsError
from .optim import Trajectory
from .persistence import PersistenceDiagram

__all__ = [
    "write_points_csv",
    "read_points_csv",
    "labels_path_for",
    "write_labels",
    "read_labels",
    "write_trajectory",
    "read_trajectory",
    "validate_trajectory",
    "diagram_records",
    "write_diagram",
    "write_summary",
]


def write_points_csv(path, points: np.ndarray) -> None:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    with open(path, "w") as fh:
        for row in points:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_points_csv(path) -> np.ndarray:
    """Parse a point-per-row CSV; a single leading non-numeric row is
    treated as a header and skipped."""
    rows = []
    saw_data = False
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
                saw_data = True
            except ValueError:
                if not saw_data and not rows:
                    continue  # optional header
                raise ValueError(f"{path}: line {ln} is not a comma-separated list of numbers") from None
    if not rows:
        raise EmptyInputError(f"{path}: no points")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise RaggedDimensionsError(f"{path}: rows have differing numbers of coordinates")
    return np.array(rows, dtype=np.float64)


def labels_path_for(points_path) -> Path:
    p = Path(points_path)
    return p.with_name(p.stem + ".labels" + (p.suffix or ".csv"))


def write_labels(path, labels) -> None:
    with open(path, "w") as fh:
        for lab in labels:
            fh.write(str(lab) + "\n")


def read_labels(path) -> list[str]:
    with open(path) as fh:
        return [line.strip() for line in fh if line.strip()]


def _record_dict(rec) -> dict:
    d = {"step": rec.step, "loss": rec.loss, "rho": rec.rho, "tau": rec.tau}
    if rec.points is not None:
        d["points"] = rec.points.tolist()
    return d


def write_trajectory(path, trajectory: Trajectory) -> None:
    with open(path, "w") as fh:
        for rec in trajectory.records:
            fh.write(json.dumps(_record_dict(rec)) + "\n")


def read_trajectory(path) -> list[dict]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            if "points" in d:
                d["points"] = np.array(d["points"], dtype=np.float64)
            records.append(d)
    return records


def validate_trajectory(records, lam: float) -> None:
    """Every record must satisfy loss == rho + lam * tau, float-exact.

    The optimizer stores the sum it actually used and json round-trips
    doubles exactly, so any mismatch means the file was edited or the lam
    is wrong.
    """
    for d in records:
        expect = d["rho"] + lam * d["tau"]
        if d["loss"] != expect:
            raise ValueError(
                f"step {d['step']}: loss {d['loss']!r} != rho + lam*tau = {expect!r} (lam={lam!r})"
            )


def diagram_records(diagrams) -> list[dict]:
    out = []
    for diagram in diagrams:
        if isinstance(diagram, PersistenceDiagram):
            pairs = diagram.pairs
        else:
            pairs = tuple(diagram)
        for pair in pairs:
            out.append({
                "dimension": pair.dimension,
                "birth": pair.birth,
                "death": "inf" if pair.essential else pair.death,
                "birth_simplex": list(pair.birth_simplex.vertices),
                "death_simplex": None if pair.death_simplex is None else list(pair.death_simplex.vertices),
            })
    return out


def write_diagram(path, diagrams) -> None:
    with open(path, "w") as fh:
        for rec in diagram_records(diagrams):
            fh.write(json.dumps(rec) + "\n")


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
