"""File formats: matrix CSV, graph JSON, data CSV, report JSON.

Matrices travel as headerless CSV with 12 significant digits.  Graphs and
colorings are JSON documents ``{"d": int, "edges": [[u, v], ...],
"colors": [c, ...]}`` with 1-based vertices and colors; the colors entry is
optional on input (absent means every edge its own class).  Data tables
are CSV with a mandatory header row; a leading ``anchor`` column carries
1-based per-row anchor labels for synthetic per-anchor samples.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DataError, GraphError
from .graphs import ColoredGraph
from .pipeline import ExceedanceSample
from .rcon import FitReport

MATRIX_FMT = "%.12g"


def write_matrix(path, matrix: np.ndarray) -> None:
    np.savetxt(path, np.asarray(matrix, dtype=float), delimiter=",", fmt=MATRIX_FMT)


def read_matrix(path) -> np.ndarray:
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ValueError(f"malformed matrix CSV {path}: {exc}") from None
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix in {path} is not square: shape {m.shape}")
    return m


def save_graph(path, graph: ColoredGraph) -> None:
    doc = {
        "d": graph.d,
        "edges": [[u + 1, v + 1] for u, v in graph.edges],
        "colors": [c + 1 for c in graph.colors],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_graph(path) -> ColoredGraph:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed graph JSON {path}: {exc}") from None
    for key in ("d", "edges"):
        if key not in doc:
            raise ValueError(f"graph JSON {path} is missing the {key!r} field")
    edges = [(int(u) - 1, int(v) - 1) for u, v in doc["edges"]]
    if "colors" in doc and doc["colors"] is not None:
        labels = [int(c) for c in doc["colors"]]
        if len(labels) != len(edges):
            raise ValueError(
                f"graph JSON {path}: {len(labels)} colors for {len(edges)} edges"
            )
        try:
            return ColoredGraph.from_labels(int(doc["d"]), edges, labels)
        except GraphError as exc:
            raise ValueError(f"graph JSON {path}: {exc}") from None
    try:
        return ColoredGraph.trivial(int(doc["d"]), edges)
    except GraphError as exc:
        raise ValueError(f"graph JSON {path}: {exc}") from None


def write_data(path, data: np.ndarray, anchors=None, names=None) -> None:
    data = np.asarray(data, dtype=float)
    d = data.shape[1]
    names = list(names) if names is not None else [f"V{j + 1}" for j in range(d)]
    if anchors is not None:
        header = ",".join(["anchor"] + names)
        body = np.column_stack([np.asarray(anchors, dtype=int) + 1, data])
        fmt = ["%d"] + [MATRIX_FMT] * d
    else:
        header = ",".join(names)
        body = data
        fmt = MATRIX_FMT
    np.savetxt(path, body, delimiter=",", fmt=fmt, header=header, comments="")


def read_data(path) -> ExceedanceSample:
    """Read a data CSV (header required) into an unshifted sample container."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValueError(f"data file {path} is empty")
    names = [t.strip() for t in text[0].split(",")]
    try:
        float(names[0])
    except ValueError:
        pass
    else:
        raise ValueError(f"data file {path} must have a header row with variable names")
    try:
        body = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"malformed data CSV {path}: {exc}") from None
    if body.shape[1] != len(names):
        raise ValueError(
            f"data file {path}: {len(names)} header fields but {body.shape[1]} columns"
        )
    if names[0] == "anchor":
        anchors = body[:, 0].astype(int) - 1
        return ExceedanceSample(y=body[:, 1:], anchors=anchors, names=names[1:])
    return ExceedanceSample(y=body, names=names)


def write_report(path, report: FitReport) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
