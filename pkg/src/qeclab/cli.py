"""Command-line entry point: ``qeclab {sweep,montecarlo,tables,concat,tomography}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiment as ex
from .channels import channel_from_json
from .codes import build_code
from .effective import effective_channel, report_to_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> tuple:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _load_channels(path: str) -> list:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("channels", data)
    if not isinstance(data, list):
        raise ValueError("channel file must hold a list of channel specs")
    return [channel_from_json(d) for d in data]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qeclab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", parents=[common], help="effective fidelity over a grid of p")
    sw.add_argument("--code", choices=("five", "steane"), default="five")
    sw.add_argument("--model", choices=("dep", "mixed", "bitflip"), default="dep")
    sw.add_argument("--pmin", type=float, default=0.9)
    sw.add_argument("--pmax", type=float, default=1.0)
    sw.add_argument("--steps", type=int, default=11)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")

    mc = sub.add_parser("montecarlo", parents=[common], help="random-channel statistics per initial fidelity")
    mc.add_argument("--code", choices=("five", "steane"), default="five")
    mc.add_argument("--f0", type=_parse_floats, default=ex.DEFAULT_F0_GRID,
                    help="comma-separated initial fidelities")
    mc.add_argument("--samples", type=int, default=10_000)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--out")
    mc.add_argument("--samples-out", help="also write per-sample fidelities here")
    mc.add_argument("--format", choices=("csv", "json"), default="csv")

    tb = sub.add_parser("tables", parents=[common], help="render gap tables from a Monte-Carlo CSV")
    tb.add_argument("--from", dest="source", required=True)
    tb.add_argument("--out")
    tb.add_argument("--format", choices=("text", "csv", "json"), default="text")

    cc = sub.add_parser("concat", parents=[common], help="fidelity through repeated code levels")
    cc.add_argument("--code", choices=("five", "steane"), default="five")
    cc.add_argument("--model", choices=("dep", "mixed", "bitflip"), default="dep")
    cc.add_argument("--p", type=float, required=True)
    cc.add_argument("--levels", type=int, default=3)
    cc.add_argument("--out")
    cc.add_argument("--format", choices=("csv", "json"), default="csv")

    tm = sub.add_parser("tomography", parents=[common], help="tomogram, Choi matrix and fidelity of one noise model")
    tm.add_argument("--code", choices=("five", "steane"), default="five")
    src = tm.add_mutually_exclusive_group(required=True)
    src.add_argument("--channels", help="JSON file with one channel spec per qubit")
    src.add_argument("--model", choices=("dep", "mixed", "bitflip"))
    tm.add_argument("--p", type=float)
    tm.add_argument("--out")
    tm.add_argument("--format", choices=("csv", "json"), default="json")
    return parser


def _emit_rows(rows, columns, fmt, out):
    if fmt == "json":
        _write(json.dumps(rows, indent=2) + "\n", out)
    else:
        _write(ex.rows_to_csv(rows, columns), out)


def _cmd_sweep(args):
    cfg = ex.ExperimentConfig(code=args.code, mode="sweep", model=args.model,
                              p_grid=(args.pmin, args.pmax, args.steps))
    _emit_rows(ex.run_sweep(cfg), ex.SWEEP_COLUMNS, args.format, args.out)


def _cmd_montecarlo(args):
    cfg = ex.ExperimentConfig(code=args.code, mode="montecarlo", f0_list=args.f0,
                              samples=args.samples, master_seed=args.seed,
                              workers=args.workers)
    stats, samples = ex.run_montecarlo(cfg, keep_samples=True)
    if args.format == "json":
        rows = [{k: getattr(s, k) for k in ex.MC_COLUMNS} for s in stats]
        _write(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _write(ex.stats_to_csv(stats), args.out)
    if args.samples_out:
        rows = [{"f0": f0, "index": i, "F_eff": float(v)}
                for f0, vals in samples.items() for i, v in enumerate(vals)]
        Path(args.samples_out).write_text(ex.rows_to_csv(rows, ("f0", "index", "F_eff")))


def _cmd_tables(args):
    path = Path(args.source)
    if not path.exists():
        raise FileNotFoundError(f"no Monte-Carlo data at {path}")
    stats = ex.stats_from_csv(path.read_text())
    if args.format == "text":
        _write(ex.emit_tables(stats), args.out)
    else:
        rows = ex.table_rows(stats)
        cols = ("f0", "dF_min", "dF_avg", "dF_steane", "dR_min", "dR_avg", "dR_steane")
        if args.format == "json":
            _write(json.dumps(rows, indent=2) + "\n", args.out)
        else:
            rows = [{k: ("None" if v is None else v) for k, v in r.items()} for r in rows]
            _write(ex.rows_to_csv(rows, cols), args.out)


def _cmd_concat(args):
    cfg = ex.ExperimentConfig(code=args.code, mode="concat", model=args.model, levels=args.levels)
    _emit_rows(ex.run_concat(cfg, args.p), ("level", "fidelity"), args.format, args.out)


def _cmd_tomography(args):
    code = build_code(args.code)
    if args.channels:
        chans = _load_channels(args.channels)
    else:
        if args.p is None:
            raise UsageError("--model needs --p")
        chans = ex.noise_for(args.code, args.model, args.p)
    rep = effective_channel(code, chans)
    if args.format == "json":
        _write(json.dumps(report_to_json(rep), indent=2) + "\n", args.out)
        return
    rows = []
    lam = rep.tomogram.lam
    for idx in ((a, b, c, d) for a in range(2) for b in range(2) for c in range(2) for d in range(2)):
        z = lam[idx]
        rows.append({"a": idx[0], "b": idx[1], "c": idx[2], "d": idx[3],
                     "lambda_re": float(z.real), "lambda_im": float(z.imag)})
    text = ex.rows_to_csv(rows, ("a", "b", "c", "d", "lambda_re", "lambda_im"))
    text += f"# fidelity,{ex.fmt_real(rep.fidelity)}\n"
    _write(text, args.out)


COMMANDS = {
    "sweep": _cmd_sweep,
    "montecarlo": _cmd_montecarlo,
    "tables": _cmd_tables,
    "concat": _cmd_concat,
    "tomography": _cmd_tomography,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"qeclab: error: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as e:
        print(f"qeclab: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - report, do not trace back
        print(f"qeclab: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
