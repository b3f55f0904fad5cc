"""Per-node interaction histories and causal sequence extraction.

Every node keeps an append-only log of (peer, t, edge_idx).  Queries return
fixed-length sequences: the anchor itself first (time delta 0), then past
partners most-recent-first, padded with the sentinel id.  Only interactions
strictly before the query time are visible, so sequences never leak the
event being predicted or anything simultaneous with it.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .errors import OrderingError

NO_EDGE = -1   # edge_idx placeholder for the self entry and padding


@dataclass
class NeighborSequence:
    """Fixed-length causal window for one anchor at one query time."""

    anchor: int
    t: float
    peers: np.ndarray   # (l_s,) int64; peers[0] == anchor; padding == sentinel
    dt: np.ndarray      # (l_s,) float64; t - interaction time, 0 at padding
    eidx: np.ndarray    # (l_s,) int64; NO_EDGE for self entry and padding
    valid: np.ndarray   # (l_s,) bool; True for self entry and real history

    def __len__(self) -> int:
        return self.peers.shape[0]


@dataclass
class NeighborSequenceBatch:
    """Row-stacked sequences; row(i) views the i-th anchor's window."""

    anchors: np.ndarray  # (B,) int64
    t: np.ndarray        # (B,) float64
    peers: np.ndarray    # (B, l_s) int64
    dt: np.ndarray       # (B, l_s) float64
    eidx: np.ndarray     # (B, l_s) int64
    valid: np.ndarray    # (B, l_s) bool

    def __len__(self) -> int:
        return self.anchors.shape[0]

    def row(self, i: int) -> NeighborSequence:
        return NeighborSequence(int(self.anchors[i]), float(self.t[i]),
                                self.peers[i], self.dt[i],
                                self.eidx[i], self.valid[i])


class HistoryStore:
    """Append-only per-node logs with monotone-timestamp enforcement."""

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.sentinel = num_nodes
        self._peers: list[list[int]] = [[] for _ in range(num_nodes)]
        self._times: list[list[float]] = [[] for _ in range(num_nodes)]
        self._eidx: list[list[int]] = [[] for _ in range(num_nodes)]

    def record(self, u: int, v: int, t: float, edge_idx: int) -> None:
        """Append the interaction to both endpoint logs."""
        for a in (u, v):
            times = self._times[a]
            if times and t < times[-1]:
                raise OrderingError(
                    f"event at t={t} precedes node {a}'s last t={times[-1]}")
        for a, b in ((u, v), (v, u)):
            self._peers[a].append(b)
            self._times[a].append(t)
            self._eidx[a].append(edge_idx)

    def record_batch(self, src, dst, t, edge_idx) -> None:
        for u, v, ts, ei in zip(src, dst, t, edge_idx):
            self.record(int(u), int(v), float(ts), int(ei))

    def recent_sequence(self, anchor: int, t: float, length: int) -> NeighborSequence:
        return self.recent_batch([anchor], [t], length).row(0)

    def recent_batch(self, anchors, ts, length: int) -> NeighborSequenceBatch:
        """Extract causal windows for several anchors at once.

        Position 0 of each window is the anchor itself with dt 0; the rest
        are its interactions strictly before the query time, newest first.
        """
        anchors = np.asarray(anchors, dtype=np.int64)
        ts = np.asarray(ts, dtype=np.float64)
        B = anchors.shape[0]
        peers = np.full((B, length), self.sentinel, dtype=np.int64)
        dt = np.zeros((B, length), dtype=np.float64)
        eidx = np.full((B, length), NO_EDGE, dtype=np.int64)
        valid = np.zeros((B, length), dtype=bool)
        peers[:, 0] = anchors
        valid[:, 0] = True
        for i in range(B):
            a, qt = int(anchors[i]), float(ts[i])
            times = self._times[a]
            end = bisect_left(times, qt)
            k = min(length - 1, end)
            if k:
                stop = end - 1 - k
                sel = slice(end - 1, stop if stop >= 0 else None, -1)  # newest first
                peers[i, 1:1 + k] = self._peers[a][sel]
                dt[i, 1:1 + k] = qt - np.asarray(times[sel])
                eidx[i, 1:1 + k] = self._eidx[a][sel]
                valid[i, 1:1 + k] = True
        return NeighborSequenceBatch(anchors, ts, peers, dt, eidx, valid)

    def degree(self, node: int) -> int:
        return len(self._peers[node])

    def snapshot(self) -> list[int]:
        """Log lengths suffice: logs are append-only."""
        return [len(p) for p in self._peers]

    def restore(self, lengths: list[int]) -> None:
        for node, n in enumerate(lengths):
            del self._peers[node][n:]
            del self._times[node][n:]
            del self._eidx[node][n:]

    def reset(self) -> None:
        self.restore([0] * self.num_nodes)
