"""Training and evaluation loops for streaming link prediction.

The discipline is predict-then-update: within a batch every score is
computed against memory and history state from before the batch, then the
batch's positive events are written back in stream order.  Epochs reset
the state and replay the stream from the start.  Because the state only
depends on the event stream (never on model parameters), the post-train
state is identical in every epoch, which lets the driver advance through
validation into test once with the best parameters.

Evaluation keeps evolving the state through val and test events (stale
neighborhoods would otherwise degrade test scores) but snapshots and
restores around each phase so repeated evaluation is idempotent.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .data import (TEST, VAL, SplitSpec, TemporalGraph,
                   chronological_split, destination_pool, sample_negative,
                   scored_event_mask, select_inductive_nodes,
                   train_event_indices, with_inductive)
from .errors import ConfigError, UndefinedMetricError
from .history import HistoryStore, NeighborSequenceBatch
from .memory import TemporalDiverseMemory
from .metrics import auc_roc, average_precision
from .model import (LinkPredictor, ModelDims, SequenceFeatures, adam_init,
                    adam_step, bce_loss, copy_params, init_params,
                    save_params)


@dataclass
class Metrics:
    ap: float
    auc: float
    loss: float
    wall_time: float


@dataclass
class FeatureTables:
    """Gather tables with a trailing zero row for padding lookups."""

    node_ext: np.ndarray   # (N+1, d_N)
    edge_ext: np.ndarray   # (E+1, d_E)
    dtype: np.dtype


def feature_tables(g: TemporalGraph, cfg: RunConfig) -> FeatureTables:
    dtype = np.dtype(np.float32 if cfg.float32 else np.float64)
    node_ext = np.zeros((g.num_nodes + 1, g.node_dim), dtype=dtype)
    node_ext[:-1] = g.node_feats
    edge_ext = np.zeros((g.num_events + 1, g.edge_dim), dtype=dtype)
    edge_ext[:-1] = g.edge_feats
    return FeatureTables(node_ext, edge_ext, dtype)


def _tile(seq: NeighborSequenceBatch, k: int) -> NeighborSequenceBatch:
    if k == 1:
        return seq
    return NeighborSequenceBatch(
        np.tile(seq.anchors, k), np.tile(seq.t, k),
        np.tile(seq.peers, (k, 1)), np.tile(seq.dt, (k, 1)),
        np.tile(seq.eidx, (k, 1)), np.tile(seq.valid, (k, 1)))


def _take(seq: NeighborSequenceBatch, idx: np.ndarray) -> NeighborSequenceBatch:
    return NeighborSequenceBatch(seq.anchors[idx], seq.t[idx],
                                 seq.peers[idx], seq.dt[idx],
                                 seq.eidx[idx], seq.valid[idx])


def stack_pair_features(ft: FeatureTables, cfg: RunConfig,
                        tdm: TemporalDiverseMemory,
                        sides: list[tuple[NeighborSequenceBatch, np.ndarray]],
                        ) -> SequenceFeatures:
    """Build encoder inputs for a list of (sequence, other-anchor) sides.

    Structure counts are pair-specific: each side is counted against its
    own anchor and against the partner it is being scored with.  Counts
    are scaled by the table width so inputs live in [0, 1].  The ablation
    switches zero-fill the corresponding blocks and leave every other
    input byte-identical.
    """
    peers = np.concatenate([s.peers for s, _ in sides])
    valid = np.concatenate([s.valid for s, _ in sides])
    dt = np.concatenate([s.dt for s, _ in sides]).astype(ft.dtype)
    own = np.concatenate([s.anchors for s, _ in sides])
    other = np.concatenate([np.asarray(o, dtype=np.int64) for _, o in sides])

    K, l = peers.shape
    if cfg.no_cne:
        co_long = np.zeros((K, l, 2), dtype=ft.dtype)
        co_short = np.zeros((K, l, 2), dtype=ft.dtype)
    else:
        lng, sht = tdm.co_encode_batch(own, other, peers, valid, cfg.matching)
        co_long = (lng / tdm.long.width).astype(ft.dtype)
        if cfg.no_td:
            co_short = np.zeros((K, l, 2), dtype=ft.dtype)
        else:
            co_short = (sht / tdm.short.width).astype(ft.dtype)

    eidx = np.concatenate([s.eidx for s, _ in sides])
    edge_rows = np.where(eidx < 0, ft.edge_ext.shape[0] - 1, eidx)
    return SequenceFeatures(dt=dt, node=ft.node_ext[peers],
                            edge=ft.edge_ext[edge_rows],
                            co_long=co_long, co_short=co_short)


def _apply_batch_updates(g: TemporalGraph, cfg: RunConfig,
                         tdm: TemporalDiverseMemory, hist: HistoryStore,
                         ev: np.ndarray, squ: NeighborSequenceBatch,
                         sqv: NeighborSequenceBatch) -> None:
    src, dst, t = g.src[ev], g.dst[ev], g.t[ev]
    for j in range(ev.shape[0]):
        tdm.apply_link_update(int(src[j]), int(dst[j]),
                              squ.row(j), sqv.row(j),
                              two_order=not cfg.no_tup,
                              neighbor_update=not cfg.no_nup,
                              update_short=not cfg.no_td)
    hist.record_batch(src, dst, t, ev)


def train_epoch(g: TemporalGraph, split: SplitSpec,
                tdm: TemporalDiverseMemory, hist: HistoryStore,
                predictor: LinkPredictor, params, adam, cfg: RunConfig,
                epoch: int, ft: FeatureTables,
                train_pool: np.ndarray) -> Metrics:
    """One pass over the train stream.  Caller resets state beforehand."""
    t0 = time.perf_counter()
    rng_neg = np.random.default_rng([cfg.seed, 0x4E6, epoch])
    rng_drop = np.random.default_rng([cfg.seed, 0xD80, epoch])
    idx = train_event_indices(g, split)
    k = cfg.neg_ratio
    loss_sum, loss_events = 0.0, 0
    scores, labels = [], []

    for lo in range(0, idx.size, cfg.batch_size):
        ev = idx[lo:lo + cfg.batch_size]
        u, v, t = g.src[ev], g.dst[ev], g.t[ev]
        B = ev.shape[0]
        squ = hist.recent_batch(u, t, cfg.seq_len)
        sqv = hist.recent_batch(v, t, cfg.seq_len)
        neg = sample_negative(B * k, train_pool, rng_neg)
        sqn = hist.recent_batch(neg, np.tile(t, k), cfg.seq_len)

        sides = [(squ, v), (sqv, u), (_tile(squ, k), neg), (sqn, np.tile(u, k))]
        feats = stack_pair_features(ft, cfg, tdm, sides)
        r = np.arange(B)
        pos_pairs = (r, B + r)
        neg_pairs = (2 * B + np.arange(B * k), (2 + k) * B + np.arange(B * k))
        loss, grads, (pp, pn) = predictor.loss_and_grads(
            params, feats, pos_pairs, neg_pairs, training=True, rng=rng_drop)
        adam_step(params, grads, adam, lr=cfg.lr)

        loss_sum += loss * B
        loss_events += B
        scores.append(pp)
        scores.append(pn)
        labels.append(np.ones(pp.size, dtype=bool))
        labels.append(np.zeros(pn.size, dtype=bool))

        _apply_batch_updates(g, cfg, tdm, hist, ev, squ, sqv)

    s = np.concatenate(scores)
    y = np.concatenate(labels)
    return Metrics(ap=average_precision(s, y), auc=auc_roc(s, y),
                   loss=loss_sum / max(loss_events, 1),
                   wall_time=time.perf_counter() - t0)


def evaluate(g: TemporalGraph, split: SplitSpec,
             tdm: TemporalDiverseMemory, hist: HistoryStore,
             predictor: LinkPredictor, params, cfg: RunConfig, phase: str,
             ft: FeatureTables, eval_pool: np.ndarray,
             keep_state: bool = False) -> Metrics:
    """Score one phase without touching parameters.

    State advances through every phase event; with keep_state False (the
    default) a snapshot/restore bracket makes the call idempotent.  In
    inductive mode only events touching a masked node are scored, but all
    events advance the state.
    """
    t0 = time.perf_counter()
    if not keep_state:
        snap_m, snap_h = tdm.snapshot(), hist.snapshot()
    lo, hi = split.phase_range(phase)
    mask = scored_event_mask(g, split, phase)
    rng_neg = np.random.default_rng([cfg.seed, 0xEA7, lo])
    k = cfg.neg_ratio
    scores, labels = [], []
    loss_sum, loss_events = 0.0, 0

    for start in range(lo, hi, cfg.batch_size):
        ev = np.arange(start, min(start + cfg.batch_size, hi))
        u, v, t = g.src[ev], g.dst[ev], g.t[ev]
        squ = hist.recent_batch(u, t, cfg.seq_len)
        sqv = hist.recent_batch(v, t, cfg.seq_len)

        m = np.flatnonzero(mask[ev - lo])
        if m.size:
            B = m.size
            um, vm, tm = u[m], v[m], t[m]
            squ_m, sqv_m = _take(squ, m), _take(sqv, m)
            neg = sample_negative(B * k, eval_pool, rng_neg)
            sqn = hist.recent_batch(neg, np.tile(tm, k), cfg.seq_len)
            sides = [(squ_m, vm), (sqv_m, um),
                     (_tile(squ_m, k), neg), (sqn, np.tile(um, k))]
            feats = stack_pair_features(ft, cfg, tdm, sides)
            r = np.arange(B)
            pos_pairs = (r, B + r)
            neg_pairs = (2 * B + np.arange(B * k), (2 + k) * B + np.arange(B * k))
            H, _ = predictor.encode(params, feats, training=False)
            pp = predictor.score(params, H[pos_pairs[0]], H[pos_pairs[1]])
            pn = predictor.score(params, H[neg_pairs[0]], H[neg_pairs[1]])
            loss_sum += bce_loss(pp, pn) * B
            loss_events += B
            scores.append(pp)
            scores.append(pn)
            labels.append(np.ones(pp.size, dtype=bool))
            labels.append(np.zeros(pn.size, dtype=bool))

        _apply_batch_updates(g, cfg, tdm, hist, ev, squ, sqv)

    if not keep_state:
        tdm.restore(snap_m)
        hist.restore(snap_h)
    if not scores:
        raise UndefinedMetricError(f"no scored events in phase {phase!r}")
    s = np.concatenate(scores)
    y = np.concatenate(labels)
    return Metrics(ap=average_precision(s, y), auc=auc_roc(s, y),
                   loss=loss_sum / max(loss_events, 1),
                   wall_time=time.perf_counter() - t0)


def build_split(g: TemporalGraph, cfg: RunConfig) -> SplitSpec:
    split = chronological_split(g, cfg.train_frac, cfg.val_frac)
    if cfg.mode == "inductive":
        nodes = select_inductive_nodes(g, split, cfg.inductive_fraction, cfg.seed)
        split = with_inductive(split, nodes)
    return split


def run(g: TemporalGraph, cfg: RunConfig, dataset: str = "stream",
        checkpoint_path=None) -> dict:
    """Full train/validate/test cycle with early stopping on validation AP."""
    cfg.validate()
    t0 = time.perf_counter()
    split = build_split(g, cfg)
    dims = ModelDims(node_dim=g.node_dim, edge_dim=g.edge_dim,
                     time_dim=cfg.time_dim, hidden=cfg.hidden,
                     out_dim=cfg.out_dim, layers=cfg.layers)
    dtype = np.float32 if cfg.float32 else np.float64
    span = float(g.t[-1] - g.t[0])
    params = init_params(dims, cfg.seed, time_span=span, dtype=dtype)
    predictor = LinkPredictor(dims, cfg.dropout)
    adam = adam_init(params)
    tdm = TemporalDiverseMemory.from_seed(g.num_nodes, cfg.long_size,
                                          cfg.short_size, cfg.seed)
    hist = HistoryStore(g.num_nodes)
    ft = feature_tables(g, cfg)
    train_pool = destination_pool_for_training(g, split)
    eval_pool = destination_pool(g)

    epochs, train_loss, val_ap, val_auc = [], [], [], []
    best_ap, best_epoch, best_params, bad = -np.inf, -1, None, 0
    for epoch in range(cfg.epochs):
        tdm.reset()
        hist.reset()
        tr = train_epoch(g, split, tdm, hist, predictor, params, adam, cfg,
                         epoch, ft, train_pool)
        vm = evaluate(g, split, tdm, hist, predictor, params, cfg, VAL,
                      ft, eval_pool, keep_state=False)
        epochs.append(epoch)
        train_loss.append(tr.loss)
        val_ap.append(vm.ap)
        val_auc.append(vm.auc)
        if vm.ap > best_ap:
            best_ap, best_epoch, bad = vm.ap, epoch, 0
            best_params = copy_params(params)
        else:
            bad += 1
            if bad >= cfg.patience:
                break

    final = best_params if best_params is not None else params
    if checkpoint_path is not None:
        save_params(checkpoint_path, final, dims)
    # state is the post-train replay of the last epoch; replays are
    # parameter-independent, so it matches the best epoch's state exactly
    evaluate(g, split, tdm, hist, predictor, final, cfg, VAL,
             ft, eval_pool, keep_state=True)
    tm = evaluate(g, split, tdm, hist, predictor, final, cfg, TEST,
                  ft, eval_pool, keep_state=True)
    return {
        "dataset": dataset,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "epoch": epochs,
        "train_loss": train_loss,
        "val_ap": val_ap,
        "val_auc": val_auc,
        "best_epoch": best_epoch,
        "test_ap": tm.ap,
        "test_auc": tm.auc,
        "wall_time": time.perf_counter() - t0,
    }


def destination_pool_for_training(g: TemporalGraph, split: SplitSpec) -> np.ndarray:
    """Destinations observed in the (filtered) train stream."""
    idx = train_event_indices(g, split)
    pool = np.unique(g.dst[idx])
    return pool if pool.size else destination_pool(g)


def replay_train(g: TemporalGraph, split: SplitSpec,
                 tdm: TemporalDiverseMemory, hist: HistoryStore,
                 cfg: RunConfig) -> None:
    """Advance memory and history through the train stream, no model."""
    idx = train_event_indices(g, split)
    for lo in range(0, idx.size, cfg.batch_size):
        ev = idx[lo:lo + cfg.batch_size]
        u, v, t = g.src[ev], g.dst[ev], g.t[ev]
        squ = hist.recent_batch(u, t, cfg.seq_len)
        sqv = hist.recent_batch(v, t, cfg.seq_len)
        _apply_batch_updates(g, cfg, tdm, hist, ev, squ, sqv)


def evaluate_checkpoint(g: TemporalGraph, cfg: RunConfig, params,
                        dims: ModelDims, dataset: str = "stream") -> dict:
    """Replay the train stream for state, then score val and test."""
    cfg.validate()
    t0 = time.perf_counter()
    split = build_split(g, cfg)
    predictor = LinkPredictor(dims, cfg.dropout)
    tdm = TemporalDiverseMemory.from_seed(g.num_nodes, cfg.long_size,
                                          cfg.short_size, cfg.seed)
    hist = HistoryStore(g.num_nodes)
    ft = feature_tables(g, cfg)
    eval_pool = destination_pool(g)
    replay_train(g, split, tdm, hist, cfg)
    vm = evaluate(g, split, tdm, hist, predictor, params, cfg, VAL,
                  ft, eval_pool, keep_state=True)
    tm = evaluate(g, split, tdm, hist, predictor, params, cfg, TEST,
                  ft, eval_pool, keep_state=True)
    return {
        "dataset": dataset,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "val_ap": vm.ap,
        "val_auc": vm.auc,
        "test_ap": tm.ap,
        "test_auc": tm.auc,
        "wall_time": time.perf_counter() - t0,
    }


HASHTABLE_AXIS = "hashtable_size"
SEQUENCE_AXIS = "sequence_length"


def run_sweep(g: TemporalGraph, cfg: RunConfig, axis: str, values,
              dataset: str = "stream") -> list[dict]:
    """One full run per value; the short table tracks the long one at 1/4."""
    if not len(values):
        raise ConfigError("sweep needs at least one value")
    rows = []
    for v in values:
        v = int(v)
        if axis == HASHTABLE_AXIS:
            c = cfg.replace(long_size=v, short_size=max(1, v // 4))
        elif axis == SEQUENCE_AXIS:
            c = cfg.replace(seq_len=v)
        else:
            raise ConfigError(f"unknown sweep axis {axis!r}")
        res = run(g, c, dataset=dataset)
        rows.append({"axis": axis, "value": v, "test_ap": res["test_ap"],
                     "test_auc": res["test_auc"],
                     "best_epoch": res["best_epoch"],
                     "wall_time": res["wall_time"]})
    return rows


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
