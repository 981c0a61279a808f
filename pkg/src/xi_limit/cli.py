"""Command-line entry point: ``xi-limit grow|verify|xi-grid|stats``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .ensemble import ExperimentManifest, load_run, run_grow, run_stats, run_verify, run_xi_grid
from .errors import XiLimitError


def _ints(text):
    return [int(t) for t in text.split(",") if t]


def _floats(text):
    return [float(t) for t in text.split(",") if t]


def build_parser():
    p = argparse.ArgumentParser(prog="xi-limit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grow", help="grow seeded virtual-isometry replicas and store spectra")
    g.add_argument("--manifest", help="JSON manifest; other flags override its fields")
    g.add_argument("--seed", type=int)
    g.add_argument("--replicas", type=int)
    g.add_argument("--dims", type=_ints)
    g.add_argument("--out")
    g.add_argument("--keep-dense", action="store_true", default=None)
    g.add_argument("--workers", type=int)

    v = sub.add_parser("verify", help="run a verification suite on a stored run")
    v.add_argument("--run", required=True)
    v.add_argument("--suite", choices=["identities", "statistics", "all"], default="all")

    x = sub.add_parser("xi-grid", help="evaluate xi_n on a grid for stored snapshots")
    x.add_argument("--run", required=True)
    x.add_argument("--box", type=_floats, help="re0,re1,im0,im1")
    x.add_argument("--steps", type=int)
    x.add_argument("--dims", type=_ints)

    s = sub.add_parser("stats", help="compute a statistic on a stored run")
    s.add_argument("--run", required=True)
    s.add_argument("kind", choices=["variance", "paircorr", "deviation", "coupling", "mgf", "powersum"])
    s.add_argument("--n", type=int)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--K", type=int)
    s.add_argument("--eps", type=float, default=0.0)
    return p


def _manifest_from_args(args):
    d = json.loads(open(args.manifest).read()) if args.manifest else {}
    for key in ("seed", "replicas", "dims", "out", "keep_dense"):
        val = getattr(args, key)
        if val is not None:
            d[key] = val
    missing = [k for k in ("seed", "replicas", "dims") if k not in d]
    if missing:
        raise XiLimitError(f"missing required settings: {', '.join(missing)}")
    return ExperimentManifest.from_dict(d)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        if args.command == "grow":
            run = run_grow(_manifest_from_args(args), workers=args.workers)
            print(f"grew {len(run.replica_ids)} replicas through dims {run.dims} into {run.root}")
            return 0
        if args.command == "verify":
            report = run_verify(load_run(args.run), args.suite)
            for c in report["checks"]:
                extra = f" [{c['error']}]" if c["error"] else ""
                print(f"{c['status'].upper():5s} {c['name']}: residual={c['residual']} tol={c['tolerance']}{extra}")
            return report["exit_status"]
        if args.command == "xi-grid":
            files = run_xi_grid(args.run, box=args.box, steps=args.steps, dims=args.dims)
            print(f"wrote {len(files)} files")
            return 0
        if args.command == "stats":
            path = run_stats(args.run, args.kind, n=args.n, lam=args.lam, K=args.K, eps=args.eps)
            print(path)
            return 0
    except XiLimitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
