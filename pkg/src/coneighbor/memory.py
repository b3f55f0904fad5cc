"""Hashed neighbor sketches, slot-wise co-neighbor counting, and updates.

Each node owns a fixed-width slot array standing in for its neighbor set.
A neighbor v lands in slot (q*v) mod M; inserting over an occupied slot
simply overwrites it, which is the forgetting mechanism that keeps the
sketch bounded.  Counting equal slot values between two rows approximates
the common-neighbor count of the two nodes in a single vectorized pass.

Two matching modes exist.  ``paper`` counts every position where the rows
agree, including empty==empty, so a node compared with itself always scores
the full width M.  ``strict`` counts only agreeing non-empty slots, which
equals the exact set intersection whenever the hash is injective on the
inserted ids; the oracle tests rely on this mode.

The temporal-diverse variant pairs a wide table (long horizon) with a
narrow one (short horizon) under independent hash multipliers: the narrow
table overwrites faster and therefore tracks only recent neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MATCH_PAPER, MATCH_STRICT
from .errors import ConfigError, ProtocolError, SnapshotError
from .history import NeighborSequence, NeighborSequenceBatch

MEMORY_IMAGE_VERSION = 1


def _check_mode(mode: str) -> None:
    if mode not in (MATCH_PAPER, MATCH_STRICT):
        raise ConfigError(f"unknown matching mode {mode!r}")


class HashTableMemory:
    """N slot-rows of width M plus one permanently empty row for padding.

    Row index ``sentinel`` (== num_nodes) backs padded sequence positions:
    gathers through it are valid and see an all-empty row, and inserts are
    never allowed to target it.
    """

    def __init__(self, num_nodes: int, width: int, multiplier: int):
        if width < 1:
            raise ConfigError("table width must be >= 1")
        if multiplier < 1 or multiplier % 2 == 0:
            raise ConfigError(
                "hash multiplier must be odd and positive; even multipliers "
                "alias slots when the width is a power of two")
        self.num_nodes = num_nodes
        self.width = width
        self.multiplier = multiplier
        self.sentinel = num_nodes
        self.table = np.full((num_nodes + 1, width), self.sentinel, dtype=np.int64)

    def slot_of(self, node_id):
        """(q * id) mod M, elementwise on arrays."""
        return (np.asarray(node_id, dtype=np.int64) * self.multiplier) % self.width

    def insert(self, owner: int, neighbor: int) -> None:
        self.table[owner, self.slot_of(neighbor)] = neighbor

    def insert_many(self, owner: int, neighbors: np.ndarray) -> None:
        """Insert in order; on slot collisions the later neighbor survives."""
        neighbors = np.asarray(neighbors, dtype=np.int64)
        # numpy fancy assignment writes in index order, so duplicates of a
        # slot keep the last value, exactly matching a sequential loop.
        self.table[owner, self.slot_of(neighbors)] = neighbors

    def scatter(self, owners: np.ndarray, value: int) -> None:
        """Insert the same neighbor into many rows (neighbor-update rule)."""
        self.table[np.asarray(owners, dtype=np.int64), self.slot_of(value)] = value

    def co_count(self, a: int, b: int, mode: str = MATCH_PAPER) -> int:
        _check_mode(mode)
        eq = self.table[a] == self.table[b]
        if mode == MATCH_STRICT:
            eq &= self.table[a] != self.sentinel
        return int(eq.sum())

    def co_count_rows(self, anchors: np.ndarray, peers: np.ndarray,
                      mode: str = MATCH_PAPER) -> np.ndarray:
        """Counts between anchor rows and per-position peer rows.

        anchors: (K,) ids; peers: (K, l) ids (sentinel allowed, reads the
        empty row).  Returns (K, l) int64 counts.
        """
        _check_mode(mode)
        rows_a = self.table[anchors][:, None, :]     # (K, 1, M)
        rows_p = self.table[peers]                   # (K, l, M)
        eq = rows_p == rows_a
        if mode == MATCH_STRICT:
            eq &= rows_a != self.sentinel
        return eq.sum(axis=2, dtype=np.int64)

    def reset(self) -> None:
        self.table.fill(self.sentinel)


@dataclass
class MemoryImage:
    """Serializable state of a TemporalDiverseMemory (versioned)."""

    version: int
    num_nodes: int
    long_width: int
    long_multiplier: int
    short_width: int
    short_multiplier: int
    long_table: np.ndarray
    short_table: np.ndarray

    def save(self, path) -> None:
        np.savez_compressed(
            path, version=self.version, num_nodes=self.num_nodes,
            long_width=self.long_width, long_multiplier=self.long_multiplier,
            short_width=self.short_width, short_multiplier=self.short_multiplier,
            long_table=self.long_table, short_table=self.short_table)

    @classmethod
    def load(cls, path) -> "MemoryImage":
        with np.load(path) as z:
            if int(z["version"]) != MEMORY_IMAGE_VERSION:
                raise SnapshotError(f"unsupported memory image version {z['version']}")
            return cls(int(z["version"]), int(z["num_nodes"]),
                       int(z["long_width"]), int(z["long_multiplier"]),
                       int(z["short_width"]), int(z["short_multiplier"]),
                       z["long_table"].copy(), z["short_table"].copy())


def _valid_nonself_peers(seq: NeighborSequence) -> np.ndarray:
    """Valid entries excluding position 0 (the self entry), in sequence order."""
    keep = seq.valid.copy()
    keep[0] = False
    return seq.peers[keep]


class TemporalDiverseMemory:
    """Long- and short-horizon neighbor sketches updated in lockstep."""

    def __init__(self, num_nodes: int, long_width: int = 64, short_width: int = 16,
                 long_multiplier: int = 1, short_multiplier: int = 3):
        if short_width >= long_width:
            raise ConfigError("short table must be narrower than the long table")
        if long_multiplier == short_multiplier:
            raise ConfigError("long and short tables need distinct multipliers")
        self.num_nodes = num_nodes
        self.sentinel = num_nodes
        self.long = HashTableMemory(num_nodes, long_width, long_multiplier)
        self.short = HashTableMemory(num_nodes, short_width, short_multiplier)

    @classmethod
    def from_seed(cls, num_nodes: int, long_width: int, short_width: int,
                  seed: int) -> "TemporalDiverseMemory":
        """Draw two distinct odd multipliers deterministically from the seed."""
        rng = np.random.default_rng([seed, 0x4A5])
        q_long = int(rng.integers(0, 1 << 20)) * 2 + 1
        q_short = q_long
        while q_short == q_long:
            q_short = int(rng.integers(0, 1 << 20)) * 2 + 1
        return cls(num_nodes, long_width, short_width, q_long, q_short)

    def tables(self) -> tuple[HashTableMemory, HashTableMemory]:
        return self.long, self.short

    # -- reads ---------------------------------------------------------

    def co_encode_batch(self, anchor_own: np.ndarray, anchor_other: np.ndarray,
                        peers: np.ndarray, valid: np.ndarray,
                        mode: str = MATCH_PAPER) -> tuple[np.ndarray, np.ndarray]:
        """Structure features for a stack of sequences.

        For row k with peers p_1..p_l, produces per position the pair
        (count to anchor_own[k], count to anchor_other[k]).  Padding
        positions (valid False) are overridden to the no-information value:
        full width under paper matching, zero under strict.

        Returns (long_counts, short_counts), each (K, l, 2) int64.
        """
        anchor_own = np.asarray(anchor_own, dtype=np.int64)
        anchor_other = np.asarray(anchor_other, dtype=np.int64)
        out = []
        for mem in (self.long, self.short):
            c = np.stack([mem.co_count_rows(anchor_own, peers, mode),
                          mem.co_count_rows(anchor_other, peers, mode)], axis=2)
            c[~valid] = mem.width if mode == MATCH_PAPER else 0
            out.append(c)
        return out[0], out[1]

    def co_encode(self, u: int, v: int, seq_u: NeighborSequence,
                  seq_v: NeighborSequence, mode: str = MATCH_PAPER):
        """Per-pair structure features, one CoNeighborFeature per side."""
        if seq_u.t != seq_v.t:
            raise ProtocolError(
                f"sequence timestamps differ: {seq_u.t} vs {seq_v.t}")
        feats = []
        for own, other, seq in ((u, v, seq_u), (v, u, seq_v)):
            lng, sht = self.co_encode_batch(
                np.array([own]), np.array([other]),
                seq.peers[None, :], seq.valid[None, :], mode)
            feats.append(CoNeighborFeature(lng[0], sht[0], seq.valid.copy()))
        return feats[0], feats[1]

    # -- writes --------------------------------------------------------

    def apply_link_update(self, u: int, v: int, seq_u: NeighborSequence,
                          seq_v: NeighborSequence, two_order: bool = True,
                          neighbor_update: bool = True,
                          update_short: bool = True) -> None:
        """Write one observed link into the sketches.

        Rule order is fixed: (1) each endpoint learns the other; (2) each
        endpoint learns the other's sampled past partners; (3) those past
        partners learn the new endpoint.  Later writes win slot conflicts.
        """
        peers_u = _valid_nonself_peers(seq_u)
        peers_v = _valid_nonself_peers(seq_v)
        targets = (self.long, self.short) if update_short else (self.long,)
        for mem in targets:
            mem.insert(u, v)
            mem.insert(v, u)
            if two_order:
                mem.insert_many(u, peers_v)
                mem.insert_many(v, peers_u)
            if neighbor_update:
                if peers_u.size:
                    mem.scatter(peers_u, v)
                if peers_v.size:
                    mem.scatter(peers_v, u)

    def reset(self) -> None:
        self.long.reset()
        self.short.reset()

    # -- state ---------------------------------------------------------

    def snapshot(self) -> MemoryImage:
        return MemoryImage(MEMORY_IMAGE_VERSION, self.num_nodes,
                           self.long.width, self.long.multiplier,
                           self.short.width, self.short.multiplier,
                           self.long.table.copy(), self.short.table.copy())

    def restore(self, image: MemoryImage) -> None:
        same = (image.num_nodes == self.num_nodes
                and image.long_width == self.long.width
                and image.long_multiplier == self.long.multiplier
                and image.short_width == self.short.width
                and image.short_multiplier == self.short.multiplier)
        if not same:
            raise SnapshotError("memory image does not match this memory's shape")
        np.copyto(self.long.table, image.long_table)
        np.copyto(self.short.table, image.short_table)


@dataclass
class CoNeighborFeature:
    """Per-position (count_to_anchor, count_to_other) pairs, both horizons."""

    long: np.ndarray    # (l_s, 2) int64
    short: np.ndarray   # (l_s, 2) int64
    valid: np.ndarray   # (l_s,) bool; False where counts are padding values


class ExactNeighborLog:
    """Unbounded-set twin of the sketch memory for oracle testing.

    Replays the identical update schema with real Python sets, so the
    intersection sizes are exact.  Width-limited sketches agree with this
    oracle in strict mode whenever their hash is injective on the ids that
    were inserted.
    """

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self._sets: list[set[int]] = [set() for _ in range(num_nodes)]

    def apply_link_update(self, u: int, v: int, seq_u: NeighborSequence,
                          seq_v: NeighborSequence, two_order: bool = True,
                          neighbor_update: bool = True) -> None:
        peers_u = _valid_nonself_peers(seq_u)
        peers_v = _valid_nonself_peers(seq_v)
        self._sets[u].add(v)
        self._sets[v].add(u)
        if two_order:
            self._sets[u].update(int(j) for j in peers_v)
            self._sets[v].update(int(i) for i in peers_u)
        if neighbor_update:
            for i in peers_u:
                self._sets[int(i)].add(v)
            for j in peers_v:
                self._sets[int(j)].add(u)

    def stored(self, node: int) -> set[int]:
        return self._sets[node]

    def common(self, a: int, b: int) -> int:
        return len(self._sets[a] & self._sets[b])

    def reset(self) -> None:
        for s in self._sets:
            s.clear()


def exact_common_neighbors(log: ExactNeighborLog, a: int, b: int) -> int:
    return log.common(a, b)


def slot_injective(mem: HashTableMemory, ids) -> bool:
    """True if slot_of maps the given ids to pairwise distinct slots."""
    ids = np.asarray(sorted(set(int(i) for i in ids)), dtype=np.int64)
    if ids.size == 0:
        return True
    return np.unique(mem.slot_of(ids)).size == ids.size


def check_slot_consistency(mem: HashTableMemory) -> None:
    """Audit: every stored id sits in its own hash slot; pad row untouched."""
    table = mem.table
    filled = table != mem.sentinel
    rows, slots = np.nonzero(filled)
    vals = table[rows, slots]
    if np.any(vals < 0) or np.any(vals >= mem.num_nodes):
        raise AssertionError("stored value outside the valid id range")
    if not np.array_equal(mem.slot_of(vals), slots):
        raise AssertionError("stored value found outside its hash slot")
    if np.any(filled[mem.num_nodes]):
        raise AssertionError("padding row was written")
