"""Train and evaluate the link predictor on the UCI message stream.

Expects ``data/uci.csv`` (see scripts/fetch_uci.py).  Writes config,
per-epoch metrics, and the best checkpoint under --out.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from coneighbor.config import RunConfig
from coneighbor.data import load_events
from coneighbor.harness import run, write_json

ROOT = Path(__file__).parent.parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=str(ROOT / "data" / "uci.csv"))
    ap.add_argument("--out", default=str(ROOT / "runs" / "uci"))
    ap.add_argument("--mode", choices=("transductive", "inductive"),
                    default="transductive")
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--float32", action="store_true")
    args = ap.parse_args(argv)

    g = load_events(args.data)
    cfg = RunConfig(mode=args.mode, epochs=args.epochs, seed=args.seed,
                    float32=args.float32).validate()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    res = run(g, cfg, dataset="uci", checkpoint_path=out / "checkpoint.npz")
    write_json(out / "config.json", cfg.to_dict())
    write_json(out / "metrics.json", res)
    print(f"test_ap={res['test_ap']:.4f} test_auc={res['test_auc']:.4f} "
          f"best_epoch={res['best_epoch']} wall_time={res['wall_time']:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
