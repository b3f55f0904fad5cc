"""Sequence encoder, link scorer, exact manual backprop, and Adam.

The encoder maps each padded neighbor sequence to a vector: Fourier-style
time encoding of the deltas, affine projections of node features, edge
features, time encoding, and the two structure-count blocks to a shared
width d, concatenation to width 5d, L affine+layernorm+dropout fusion
layers, mean-pooling over sequence positions, and an affine readout.  Two
encoded endpoints are scored with a sigmoid over an affine merge.

Everything is plain numpy.  Gradients are computed in closed form by
walking the recorded intermediates backwards; the test suite checks every
parameter tensor against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError, SnapshotError

PARAMS_VERSION = 1
CLAMP_EPS = 1e-7
LN_EPS = 1e-5


@dataclass(frozen=True)
class ModelDims:
    node_dim: int
    edge_dim: int
    time_dim: int = 50
    hidden: int = 50
    out_dim: int = 50
    layers: int = 2

    def validate(self) -> "ModelDims":
        if self.node_dim < 0 or self.edge_dim < 0:
            raise ConfigError("feature dims must be >= 0")
        if self.time_dim < 2 or self.time_dim % 2:
            raise ConfigError("time_dim must be an even integer >= 2")
        if min(self.hidden, self.out_dim, self.layers) < 1:
            raise ConfigError("hidden, out_dim, layers must be positive")
        return self

    @property
    def fused(self) -> int:
        # five concatenated d-wide blocks: node, edge, time, long counts,
        # short counts
        return 5 * self.hidden


@dataclass
class SequenceFeatures:
    """Raw per-sequence inputs, stacked over S sequences of length l."""

    dt: np.ndarray        # (S, l) float
    node: np.ndarray      # (S, l, d_N)
    edge: np.ndarray      # (S, l, d_E)
    co_long: np.ndarray   # (S, l, 2) already scaled to [0, 1]
    co_short: np.ndarray  # (S, l, 2)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int,
            dtype) -> np.ndarray:
    limit = np.sqrt(6.0 / max(fan_in + fan_out, 1))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)


def init_time_frequencies(time_dim: int, time_span: float,
                          dtype=np.float64) -> np.ndarray:
    """Geometric ladder 1/10^((i-1)*alpha/d_T), slowest period ~2x the span."""
    span = max(float(time_span), 1.0)
    alpha = max(0.0, time_dim / (time_dim - 1) * np.log10(2.0 * span / (2 * np.pi)))
    i = np.arange(time_dim, dtype=np.float64)
    return (10.0 ** (-i * alpha / time_dim)).astype(dtype)


def init_params(dims: ModelDims, seed: int, time_span: float = 1.0,
                dtype=np.float64) -> dict[str, np.ndarray]:
    """Glorot-uniform weights, zero biases, geometric time frequencies."""
    dims.validate()
    rng = np.random.default_rng([seed, 0x0DE])
    d, f = dims.hidden, dims.fused
    p: dict[str, np.ndarray] = {}
    p["time_freq"] = init_time_frequencies(dims.time_dim, time_span, dtype)
    for name, fan_in in (("node", dims.node_dim), ("edge", dims.edge_dim),
                         ("time", dims.time_dim), ("co_long", 2),
                         ("co_short", 2)):
        p[f"proj_{name}_w"] = _glorot(rng, fan_in, d, dtype)
        p[f"proj_{name}_b"] = np.zeros(d, dtype=dtype)
    for layer in range(dims.layers):
        p[f"fuse{layer}_w"] = _glorot(rng, f, f, dtype)
        p[f"fuse{layer}_b"] = np.zeros(f, dtype=dtype)
    p["out_w"] = _glorot(rng, f, dims.out_dim, dtype)
    p["out_b"] = np.zeros(dims.out_dim, dtype=dtype)
    p["merge_w"] = _glorot(rng, 2 * dims.out_dim, 1, dtype)
    p["merge_b"] = np.zeros(1, dtype=dtype)
    return p


def copy_params(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: v.copy() for k, v in params.items()}


def save_params(path, params: dict[str, np.ndarray], dims: ModelDims) -> None:
    np.savez(path, __version__=PARAMS_VERSION,
             __dims__=np.array([dims.node_dim, dims.edge_dim, dims.time_dim,
                                dims.hidden, dims.out_dim, dims.layers]),
             **params)


def load_params(path) -> tuple[dict[str, np.ndarray], ModelDims]:
    with np.load(path) as z:
        if int(z["__version__"]) != PARAMS_VERSION:
            raise SnapshotError(f"unsupported checkpoint version {z['__version__']}")
        dims = ModelDims(*(int(x) for x in z["__dims__"]))
        params = {k: z[k].copy() for k in z.files
                  if k not in ("__version__", "__dims__")}
    return params, dims


def time_encode(dt: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """sqrt(1/d_T) * [cos(dt*w_1), sin(dt*w_2), cos(dt*w_3), ...].

    Even output columns are cosines, odd are sines, each with its own
    frequency.  A zero delta therefore encodes to the fixed pattern
    sqrt(1/d_T)*[1, 0, 1, 0, ...].
    """
    args = dt[..., None] * freqs
    out = np.empty_like(args)
    out[..., 0::2] = np.cos(args[..., 0::2])
    out[..., 1::2] = np.sin(args[..., 1::2])
    out *= np.sqrt(1.0 / freqs.shape[0])
    return out


def layer_norm(x: np.ndarray, eps: float = LN_EPS):
    """Row-wise normalization over the last axis, no gain or bias.

    Returns (y, inv_std); inv_std is kept for the backward pass.
    """
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = np.mean(xc * xc, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    return xc * inv, inv


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def bce_loss(p_pos: np.ndarray, p_neg: np.ndarray,
             eps: float = CLAMP_EPS) -> float:
    """Mean over pairs of -log p(link) - log(1 - p(no-link)), probs clamped."""
    pp = np.clip(p_pos, eps, 1.0 - eps)
    pn = np.clip(p_neg, eps, 1.0 - eps)
    return float(-np.log(pp).mean() - np.log1p(-pn).mean())


@dataclass
class GradientTape:
    """Forward intermediates needed for the exact backward pass."""

    feats: SequenceFeatures
    args: np.ndarray                 # dt[...,None] * freqs
    te: np.ndarray                   # time encoding block input
    layers: list = field(default_factory=list)   # (z_in, y, inv_std, mask)
    pool: np.ndarray | None = None
    h: np.ndarray | None = None


class LinkPredictor:
    """Stateless compute graph; parameters travel in plain dicts."""

    def __init__(self, dims: ModelDims, dropout: float = 0.1):
        self.dims = dims.validate()
        if not 0.0 <= dropout < 1.0:
            raise ConfigError("dropout must lie in [0, 1)")
        self.dropout = dropout

    # -- forward -------------------------------------------------------

    def encode(self, params, feats: SequenceFeatures, training: bool = False,
               rng: np.random.Generator | None = None):
        """Sequences -> (S, d_o) node representations plus the tape."""
        if training and self.dropout > 0.0 and rng is None:
            raise ConfigError("training forward with dropout needs an rng")
        w = params["time_freq"]
        args = feats.dt[..., None] * w
        te = np.empty_like(args)
        te[..., 0::2] = np.cos(args[..., 0::2])
        te[..., 1::2] = np.sin(args[..., 1::2])
        te *= np.sqrt(1.0 / w.shape[0])

        z = np.concatenate([
            feats.node @ params["proj_node_w"] + params["proj_node_b"],
            feats.edge @ params["proj_edge_w"] + params["proj_edge_b"],
            te @ params["proj_time_w"] + params["proj_time_b"],
            feats.co_long @ params["proj_co_long_w"] + params["proj_co_long_b"],
            feats.co_short @ params["proj_co_short_w"] + params["proj_co_short_b"],
        ], axis=-1)

        tape = GradientTape(feats=feats, args=args, te=te)
        for layer in range(self.dims.layers):
            z_in = z
            a = z_in @ params[f"fuse{layer}_w"] + params[f"fuse{layer}_b"]
            y, inv = layer_norm(a)
            if training and self.dropout > 0.0:
                mask = rng.random(y.shape) >= self.dropout
                z = y * mask / (1.0 - self.dropout)
            else:
                mask = None
                z = y
            tape.layers.append((z_in, y, inv, mask))

        pool = z.mean(axis=1)            # padded rows included in the divisor
        h = pool @ params["out_w"] + params["out_b"]
        tape.pool, tape.h = pool, h
        return h, tape

    def score(self, params, h_a: np.ndarray, h_b: np.ndarray) -> np.ndarray:
        """Pairwise link probability; order of (a, b) matters."""
        cat = np.concatenate([h_a, h_b], axis=-1)
        logit = cat @ params["merge_w"][:, 0] + params["merge_b"][0]
        return _sigmoid(logit)

    # -- loss + gradients ---------------------------------------------

    def loss_and_grads(self, params, feats: SequenceFeatures,
                       pos_pairs, neg_pairs, training: bool = False,
                       rng: np.random.Generator | None = None):
        """Scalar loss, exact parameter gradients, and the pair probabilities.

        pos_pairs/neg_pairs are (a_idx, b_idx) index arrays into the stacked
        sequence axis; a is always the representation placed first in the
        merge concatenation.
        """
        H, tape = self.encode(params, feats, training=training, rng=rng)
        pa, pb = (np.asarray(i, dtype=np.int64) for i in pos_pairs)
        na, nb = (np.asarray(i, dtype=np.int64) for i in neg_pairs)
        pos_pairs, neg_pairs = (pa, pb), (na, nb)
        p_pos = self.score(params, H[pa], H[pb])
        p_neg = self.score(params, H[na], H[nb])
        loss = bce_loss(p_pos, p_neg)

        eps = CLAMP_EPS
        interior_p = (p_pos > eps) & (p_pos < 1.0 - eps)
        interior_n = (p_neg > eps) & (p_neg < 1.0 - eps)
        dlogit_p = np.where(interior_p, -(1.0 - p_pos) / pa.shape[0], 0.0)
        dlogit_n = np.where(interior_n, p_neg / na.shape[0], 0.0)

        grads = {k: np.zeros_like(v) for k, v in params.items()}
        d_o = self.dims.out_dim
        w_m = params["merge_w"][:, 0]
        dH = np.zeros_like(H)
        for (ia, ib), dlg, pp in ((pos_pairs, dlogit_p, p_pos),
                                  (neg_pairs, dlogit_n, p_neg)):
            cat = np.concatenate([H[ia], H[ib]], axis=-1)
            grads["merge_w"][:, 0] += cat.T @ dlg
            grads["merge_b"][0] += dlg.sum()
            dcat = dlg[:, None] * w_m
            np.add.at(dH, ia, dcat[:, :d_o])
            np.add.at(dH, ib, dcat[:, d_o:])

        self._backward_encode(params, grads, tape, dH)
        return loss, grads, (p_pos, p_neg)

    def _backward_encode(self, params, grads, tape: GradientTape,
                         dH: np.ndarray) -> None:
        feats = tape.feats
        S, l = feats.dt.shape
        f = self.dims.fused

        grads["out_w"] += tape.pool.T @ dH
        grads["out_b"] += dH.sum(axis=0)
        dz = (dH @ params["out_w"].T)[:, None, :] / l   # mean-pool backward

        for layer in reversed(range(self.dims.layers)):
            z_in, y, inv, mask = tape.layers[layer]
            if mask is not None:
                dy = dz * mask / (1.0 - self.dropout)
            else:
                dy = dz * np.ones_like(y)
            # layernorm (no affine): dx = inv*(dy - mean(dy) - y*mean(dy*y))
            da = inv * (dy - dy.mean(axis=-1, keepdims=True)
                        - y * (dy * y).mean(axis=-1, keepdims=True))
            grads[f"fuse{layer}_w"] += z_in.reshape(-1, f).T @ da.reshape(-1, f)
            grads[f"fuse{layer}_b"] += da.sum(axis=(0, 1))
            dz = da @ params[f"fuse{layer}_w"].T

        d = self.dims.hidden
        blocks = (("node", feats.node), ("edge", feats.edge), ("time", tape.te),
                  ("co_long", feats.co_long), ("co_short", feats.co_short))
        dte = None
        for i, (name, x) in enumerate(blocks):
            dblk = dz[..., i * d:(i + 1) * d]
            k = x.shape[-1]          # explicit shape: k may be zero
            grads[f"proj_{name}_w"] += x.reshape(S * l, k).T @ dblk.reshape(S * l, d)
            grads[f"proj_{name}_b"] += dblk.sum(axis=(0, 1))
            if name == "time":
                dte = dblk @ params["proj_time_w"].T

        # through the trig: even columns are cos, odd are sin
        sc = np.sqrt(1.0 / self.dims.time_dim)
        dargs = np.empty_like(tape.args)
        dargs[..., 0::2] = -np.sin(tape.args[..., 0::2]) * dte[..., 0::2]
        dargs[..., 1::2] = np.cos(tape.args[..., 1::2]) * dte[..., 1::2]
        grads["time_freq"] += sc * (dargs * feats.dt[..., None]).sum(axis=(0, 1))


# -- optimizer --------------------------------------------------------


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0


def adam_init(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(m={k: np.zeros_like(p) for k, p in params.items()},
                     v={k: np.zeros_like(p) for k, p in params.items()})


def adam_step(params, grads, state: AdamState, lr: float = 1e-4,
              beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> None:
    """One in-place Adam update with bias correction.

    Aborts with diagnostics if any gradient is non-finite; silently
    producing NaN parameters would poison every later batch.
    """
    for k, g in grads.items():
        if not np.all(np.isfinite(g)):
            bad = int(np.size(g) - np.isfinite(g).sum())
            raise NumericalError(
                f"non-finite gradient in {k!r} at step {state.step + 1} "
                f"({bad}/{g.size} entries)")
    state.step += 1
    t = state.step
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    for k, p in params.items():
        g = grads[k]
        m = state.m[k]
        v = state.v[k]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
