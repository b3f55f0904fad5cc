"""Event-stream loading, chronological splits, and negative sampling.

An event stream is a timestamp-sorted sequence of interactions (src, dst, t)
with optional per-event feature vectors.  Node ids are re-indexed to a dense
0..num_nodes-1 range on load; the value ``num_nodes`` itself is reserved as
the padding sentinel throughout the package and never appears as an endpoint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    DataError,
    EmptyInputError,
    EmptyMaskError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)

TRAIN, VAL, TEST = "train", "val", "test"


@dataclass(frozen=True)
class CsvLayout:
    """Column layout of an edge-stream CSV file.

    The canonical layout is ``src,dst,t[,label][,f1..fk]``.  A label column,
    when present, is ignored; this package only does link prediction.  Fields
    left as ``None`` are sniffed: the header by attempting to parse the first
    row as numbers, the label column by assuming any fourth column is one.
    """

    has_header: bool | None = None
    label_column: bool | None = None
    delimiter: str = ","


class EdgeEvent(NamedTuple):
    src: int
    dst: int
    t: float
    edge_idx: int
    feat: np.ndarray


@dataclass
class TemporalGraph:
    """Struct-of-arrays view of a timestamp-sorted event stream."""

    src: np.ndarray          # (E,) int64, values in [0, num_nodes)
    dst: np.ndarray          # (E,) int64
    t: np.ndarray            # (E,) float64, non-decreasing
    edge_feats: np.ndarray   # (E, d_E) float64
    node_feats: np.ndarray   # (num_nodes, d_N) float64
    num_nodes: int
    id_map: dict[int, int] | None = None   # original id -> dense id, if remapped

    @property
    def num_events(self) -> int:
        return self.src.shape[0]

    @property
    def edge_dim(self) -> int:
        return self.edge_feats.shape[1]

    @property
    def node_dim(self) -> int:
        return self.node_feats.shape[1]

    @property
    def sentinel(self) -> int:
        return self.num_nodes

    def event(self, i: int) -> EdgeEvent:
        return EdgeEvent(int(self.src[i]), int(self.dst[i]), float(self.t[i]),
                         i, self.edge_feats[i])

    def check(self) -> "TemporalGraph":
        E = self.num_events
        if E == 0:
            raise EmptyInputError("event stream is empty")
        if not (self.dst.shape == (E,) and self.t.shape == (E,)):
            raise SchemaError("src/dst/t length mismatch")
        if np.any(np.diff(self.t) < 0):
            raise DataError("timestamps are not non-decreasing")
        lo = min(self.src.min(), self.dst.min())
        hi = max(self.src.max(), self.dst.max())
        if lo < 0 or hi >= self.num_nodes:
            raise DataError("endpoint ids outside [0, num_nodes)")
        return self


@dataclass(frozen=True)
class SplitSpec:
    """Chronological split boundaries plus the optional inductive node mask."""

    train_end: int
    val_end: int
    num_events: int
    mode: str = "transductive"
    inductive_nodes: frozenset[int] = field(default_factory=frozenset)

    def phase_range(self, phase: str) -> tuple[int, int]:
        if phase == TRAIN:
            return 0, self.train_end
        if phase == VAL:
            return self.train_end, self.val_end
        if phase == TEST:
            return self.val_end, self.num_events
        raise ValueError(f"unknown phase {phase!r}")


def _sniff_header(row: list[str]) -> bool:
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return True
    return False


def load_events(path: str | Path, fmt: CsvLayout = CsvLayout()) -> TemporalGraph:
    """Load a CSV event stream, sort it by time, and densify node ids.

    Rows must agree on column count (feature arity).  Malformed cells raise
    ``ParseError`` with the 1-based line number.  Sorting is stable, so
    events sharing a timestamp keep their file order.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=fmt.delimiter)
        rows = list(reader)
    rows = [(i + 1, r) for i, r in enumerate(rows) if r]   # keep line numbers
    if not rows:
        raise EmptyInputError(f"{path}: no rows")

    has_header = fmt.has_header
    if has_header is None:
        has_header = _sniff_header(rows[0][1])
    if has_header:
        rows = rows[1:]
    if not rows:
        raise EmptyInputError(f"{path}: header only, no events")

    ncols = len(rows[0][1])
    if ncols < 3:
        raise SchemaError(f"{path}: need at least src,dst,t columns, got {ncols}")
    has_label = fmt.label_column
    if has_label is None:
        has_label = ncols >= 4
    feat_start = 4 if has_label else 3
    if has_label and ncols < 4:
        raise SchemaError(f"{path}: label column requested but only {ncols} columns")

    src, dst, ts, feats = [], [], [], []
    for line_no, row in rows:
        if len(row) != ncols:
            raise SchemaError(
                f"{path}: line {line_no}: expected {ncols} columns, got {len(row)}")
        try:
            src.append(int(float(row[0])))
            dst.append(int(float(row[1])))
            ts.append(float(row[2]))
            feats.append([float(c) for c in row[feat_start:]])
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None

    edge_feats = np.asarray(feats, dtype=np.float64)
    if edge_feats.size == 0:
        edge_feats = np.zeros((len(rows), 0), dtype=np.float64)
    return from_arrays(np.asarray(src, dtype=np.int64),
                       np.asarray(dst, dtype=np.int64),
                       np.asarray(ts, dtype=np.float64),
                       edge_feats=edge_feats)


def from_arrays(src, dst, t, edge_feats=None, node_feats=None) -> TemporalGraph:
    """Build a TemporalGraph from raw arrays: sort by time, densify ids."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    t = np.asarray(t, dtype=np.float64)
    if src.size == 0:
        raise EmptyInputError("no events")
    order = np.argsort(t, kind="stable")
    src, dst, t = src[order], dst[order], t[order]
    if edge_feats is None:
        edge_feats = np.zeros((src.size, 0), dtype=np.float64)
    else:
        edge_feats = np.asarray(edge_feats, dtype=np.float64)[order]

    ids = np.unique(np.concatenate([src, dst]))
    if ids[0] < 0:
        raise DataError("negative node ids")
    id_map = None
    if ids[0] != 0 or ids[-1] != ids.size - 1:
        # gaps or offset: remap to dense 0..n-1 preserving numeric order
        src = np.searchsorted(ids, src)
        dst = np.searchsorted(ids, dst)
        id_map = {int(orig): i for i, orig in enumerate(ids)}
    num_nodes = int(ids.size)
    if node_feats is None:
        node_feats = np.zeros((num_nodes, 0), dtype=np.float64)
    else:
        node_feats = np.asarray(node_feats, dtype=np.float64)
        if node_feats.shape[0] != num_nodes:
            raise SchemaError("node_feats rows != num_nodes")
    return TemporalGraph(src, dst, t, edge_feats, node_feats,
                         num_nodes, id_map).check()


def chronological_split(g: TemporalGraph, train_frac: float = 0.70,
                        val_frac: float = 0.15) -> SplitSpec:
    """Index-based split of the sorted stream: floor(f*E) boundaries."""
    E = g.num_events
    train_end = int(np.floor(train_frac * E))
    val_end = int(np.floor((train_frac + val_frac) * E))
    if train_end < 1 or val_end <= train_end or val_end >= E:
        raise InsufficientDataError(
            f"cannot split {E} events into non-empty train/val/test")
    return SplitSpec(train_end=train_end, val_end=val_end, num_events=E)


def select_inductive_nodes(g: TemporalGraph, split: SplitSpec,
                           fraction: float = 0.10, seed: int = 0) -> frozenset[int]:
    """Pick floor(fraction * |eval nodes|) nodes seen in val/test, uniformly."""
    tail = slice(split.train_end, g.num_events)
    seen = np.unique(np.concatenate([g.src[tail], g.dst[tail]]))
    k = int(np.floor(fraction * seen.size))
    if k < 1:
        raise EmptyMaskError(
            f"fraction {fraction} of {seen.size} eval nodes selects none")
    rng = np.random.default_rng(seed)
    picked = rng.choice(seen, size=k, replace=False)
    return frozenset(int(n) for n in picked)


def with_inductive(split: SplitSpec, nodes: frozenset[int]) -> SplitSpec:
    return replace(split, mode="inductive", inductive_nodes=nodes)


def _touches(g: TemporalGraph, lo: int, hi: int, nodes: frozenset[int]) -> np.ndarray:
    mask_vals = np.zeros(g.num_nodes, dtype=bool)
    mask_vals[list(nodes)] = True
    return mask_vals[g.src[lo:hi]] | mask_vals[g.dst[lo:hi]]


def train_event_indices(g: TemporalGraph, split: SplitSpec) -> np.ndarray:
    """Trainable event indices; inductive mode drops events touching masked nodes."""
    idx = np.arange(split.train_end)
    if split.mode == "inductive" and split.inductive_nodes:
        idx = idx[~_touches(g, 0, split.train_end, split.inductive_nodes)]
    return idx


def scored_event_mask(g: TemporalGraph, split: SplitSpec, phase: str) -> np.ndarray:
    """Within-phase mask of events that contribute to evaluation metrics.

    Transductive mode scores every event.  Inductive mode scores only events
    with at least one masked endpoint; the rest still advance the state.
    """
    lo, hi = split.phase_range(phase)
    if split.mode == "inductive" and split.inductive_nodes:
        return _touches(g, lo, hi, split.inductive_nodes)
    return np.ones(hi - lo, dtype=bool)


def destination_pool(g: TemporalGraph, split: SplitSpec | None = None) -> np.ndarray:
    """Sorted unique destinations observed in the stream (train-only if split given)."""
    hi = split.train_end if split is not None else g.num_events
    pool = np.unique(g.dst[:hi])
    if pool.size == 0:
        raise EmptyInputError("no destinations to sample from")
    return pool


def sample_negative(count: int, dst_pool: np.ndarray,
                    rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the destination pool, one per requested slot.

    Draws may collide with the true destination of the paired positive; such
    collisions are kept, matching the random sampling convention.
    """
    return dst_pool[rng.integers(0, dst_pool.size, size=count)]
