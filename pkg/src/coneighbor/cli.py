"""Command-line entry point: train, eval, sweep, bench, oracle-check.

Every command writes its fully resolved configuration next to its results
so any run can be reproduced from the output directory alone.  Exit codes:
0 success, 1 usage or configuration error, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from . import harness, oracle
from .config import RunConfig
from .data import CsvLayout, load_events
from .errors import ConfigError, DataError, NumericalError
from .harness import write_json
from .model import ModelDims, load_params

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse would exit 2; we reserve 2 for data
        raise _UsageError(message)


def _tristate(value: str) -> bool | None:
    return {"auto": None, "yes": True, "no": False}[value]


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV event stream: src,dst,t[,label][,features...]")
    p.add_argument("--header", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--label-col", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--delimiter", default=",")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    c = RunConfig()
    p.add_argument("--long-size", type=int, default=c.long_size, help="long table width M_l")
    p.add_argument("--short-size", type=int, default=c.short_size, help="short table width M_s")
    p.add_argument("--seq-len", type=int, default=c.seq_len, help="neighbor window length l_s")
    p.add_argument("--hidden", type=int, default=c.hidden, help="projection width d")
    p.add_argument("--time-dim", type=int, default=c.time_dim)
    p.add_argument("--out-dim", type=int, default=c.out_dim)
    p.add_argument("--layers", type=int, default=c.layers, help="fusion layers L")
    p.add_argument("--dropout", type=float, default=c.dropout)
    p.add_argument("--lr", type=float, default=c.lr)
    p.add_argument("--batch-size", type=int, default=c.batch_size)
    p.add_argument("--epochs", type=int, default=c.epochs)
    p.add_argument("--patience", type=int, default=c.patience)
    p.add_argument("--neg-ratio", type=int, default=c.neg_ratio)
    p.add_argument("--mode", choices=("transductive", "inductive"), default=c.mode)
    p.add_argument("--inductive-fraction", type=float, default=c.inductive_fraction)
    p.add_argument("--train-frac", type=float, default=c.train_frac)
    p.add_argument("--val-frac", type=float, default=c.val_frac)
    p.add_argument("--matching", choices=("paper", "strict"), default=c.matching)
    p.add_argument("--no-cne", action="store_true", help="zero-fill co-neighbor features")
    p.add_argument("--no-td", action="store_true", help="disable the short-horizon table")
    p.add_argument("--no-nup", action="store_true", help="disable neighbor updates")
    p.add_argument("--no-tup", action="store_true", help="disable 2-order updates")
    p.add_argument("--seed", type=int, default=c.seed)
    p.add_argument("--float32", action="store_true", help="train in float32")


def _layout(args) -> CsvLayout:
    return CsvLayout(has_header=_tristate(args.header),
                     label_column=_tristate(args.label_col),
                     delimiter=args.delimiter)


def _config(args) -> RunConfig:
    return RunConfig(
        train_frac=args.train_frac, val_frac=args.val_frac, mode=args.mode,
        inductive_fraction=args.inductive_fraction,
        long_size=args.long_size, short_size=args.short_size,
        matching=args.matching, seq_len=args.seq_len, hidden=args.hidden,
        time_dim=args.time_dim, out_dim=args.out_dim, layers=args.layers,
        dropout=args.dropout, lr=args.lr, batch_size=args.batch_size,
        epochs=args.epochs, patience=args.patience, neg_ratio=args.neg_ratio,
        no_cne=args.no_cne, no_td=args.no_td, no_nup=args.no_nup,
        no_tup=args.no_tup, seed=args.seed, float32=args.float32,
    ).validate()


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    cfg = _config(args)
    g = load_events(args.data, _layout(args))
    out = _outdir(args)
    write_json(out / "config.json", cfg.to_dict())
    res = harness.run(g, cfg, dataset=Path(args.data).stem,
                      checkpoint_path=out / "checkpoint.npz")
    write_json(out / "metrics.json", res)
    print(f"test_ap={res['test_ap']:.4f} test_auc={res['test_auc']:.4f} "
          f"best_epoch={res['best_epoch']}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    g = load_events(args.data, _layout(args))
    params, dims = load_params(args.checkpoint)
    want = ModelDims(node_dim=g.node_dim, edge_dim=g.edge_dim,
                     time_dim=cfg.time_dim, hidden=cfg.hidden,
                     out_dim=cfg.out_dim, layers=cfg.layers)
    if dims != want:
        raise ConfigError(f"checkpoint dims {dims} do not match config/data {want}")
    out = _outdir(args)
    write_json(out / "config.json", cfg.to_dict())
    res = harness.evaluate_checkpoint(g, cfg, params, dims,
                                      dataset=Path(args.data).stem)
    write_json(out / "metrics.json", res)
    print(f"val_ap={res['val_ap']:.4f} test_ap={res['test_ap']:.4f} "
          f"test_auc={res['test_auc']:.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    g = load_events(args.data, _layout(args))
    values = [int(v) for v in args.values.split(",") if v]
    out = _outdir(args)
    write_json(out / "config.json", {"base": cfg.to_dict(),
                                     "axis": args.axis, "values": values})
    rows = harness.run_sweep(g, cfg, args.axis, values,
                             dataset=Path(args.data).stem)
    write_json(out / "sweep.json", rows)
    print(f"{'value':>8}  {'test_ap':>8}  {'test_auc':>8}")
    for r in rows:
        print(f"{r['value']:>8d}  {r['test_ap']:>8.4f}  {r['test_auc']:>8.4f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    report = bench_mod.run_bench(batch_size=args.batch_size,
                                 num_nodes=args.nodes,
                                 num_events=args.events,
                                 repeats=args.repeats, seed=args.seed)
    out = _outdir(args)
    write_json(out / "bench.json", report.to_dict())
    print(bench_mod.format_report(report))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    reports = oracle.run_suite(streams=args.streams, max_nodes=args.max_nodes,
                               max_events=args.max_events, seed=args.seed)
    summary = oracle.summarize(reports)
    out = _outdir(args)
    write_json(out / "oracle.json", summary)
    print(f"streams={summary['streams']} pairs={summary['pairs_checked']} "
          f"injective={summary['pairs_injective']} "
          f"collision_skipped={summary['pairs_collision_skipped']} "
          f"mismatches={summary['mismatches']}")
    if summary["mismatches"]:
        for m in summary["first_mismatches"]:
            print(f"MISMATCH stream_seed={m['stream_seed']} table={m['table']} "
                  f"pair=({m['a']},{m['b']}) got={m['got']} want={m['want']}")
        return EXIT_NUMERIC
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="coneighbor",
                     description="streaming temporal-graph link prediction")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("train", parents=[], help="train and evaluate")
    _add_data_args(p)
    _add_config_args(p)
    p.add_argument("--out", default="runs/train")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved checkpoint")
    _add_data_args(p)
    _add_config_args(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", default="runs/eval")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sensitivity sweep over one axis")
    _add_data_args(p)
    _add_config_args(p)
    p.add_argument("--axis", choices=(harness.HASHTABLE_AXIS,
                                      harness.SEQUENCE_AXIS), required=True)
    p.add_argument("--values", required=True, help="comma-separated integers")
    p.add_argument("--out", default="runs/sweep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="encoding-time scaling benchmark")
    p.add_argument("--batch-size", type=int, default=200)
    p.add_argument("--nodes", type=int, default=400)
    p.add_argument("--events", type=int, default=10_000)
    p.add_argument("--repeats", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs/bench")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check", help="sketch vs exact-set equivalence")
    p.add_argument("--streams", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=30)
    p.add_argument("--max-events", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs/oracle")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (_UsageError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
