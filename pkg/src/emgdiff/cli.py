"""Batch command-line interface.

Thin layer over the same engine the HTTP service uses, so headless runs
and service responses carry identical numbers.  Result files are
canonical JSON (sorted keys) and charts are self-contained SVG, both
byte-stable across runs.

The data directory comes from --data-dir or the EMGDIFF_DATA_DIR
environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .ingest import NotFoundError, load_data_dir, validate_manifest
from .model import AFFECTED, UNAFFECTED, DomainError
from .render import comparison_svg, presentation_svg, session_svg
from .significance import (
    CompareConfig,
    apply_threshold,
    compare_bundles,
    visibility_report,
)
from .signals import proportion_summary
from .store import (
    DocumentStore,
    check_presentation_refs,
    load_presentation,
    load_session,
)

DATA_DIR_ENV = "EMGDIFF_DATA_DIR"


def _data_dir(args) -> Path:
    path = args.data_dir or os.environ.get(DATA_DIR_ENV)
    if not path:
        raise SystemExit(f"no data directory: pass --data-dir or set {DATA_DIR_ENV}")
    return Path(path)


def cmd_validate(args) -> int:
    findings = validate_manifest(args.manifest)
    ok = all(f.ok for f in findings)
    for f in findings:
        print(f"{'PASS' if f.ok else 'FAIL'}  {f.path}: {f.message}")
    print(f"validate: {'ok' if ok else 'failed'} ({len(findings)} findings)")
    return 0 if ok else 1


def _score_entry(key, s):
    name, side = key
    return {
        "muscle": name,
        "side": side,
        "divergence": s.divergence,
        "skewness": s.skewness,
        "skew_weight": s.skew_weight,
        "score": s.score,
        "normalized_score": s.normalized_score,
    }


def _visibility_entry(comparison):
    report = visibility_report(comparison)
    return {
        "tau": report.tau,
        "h_max": report.h_max,
        "charts": [
            {"muscle": name, "side": side, "visible": vis}
            for (name, side), vis in sorted(report.chart_visible.items())
        ],
        "collapsed": list(report.collapsed),
        "surviving": list(report.surviving),
    }


def _proportions(comparison):
    out = {}
    for side in (AFFECTED, UNAFFECTED):
        envelopes = comparison.base_envelopes(side)
        t_lo = min(float(e.times[0]) for e in envelopes.values() if len(e))
        t_hi = max(float(e.times[-1]) for e in envelopes.values() if len(e))
        try:
            summary = proportion_summary(
                envelopes, (t_lo, t_hi), muted=comparison.muted, side=side
            )
            out[side] = {m: share for m, share in sorted(summary.shares.items())}
        except DomainError:
            out[side] = None
    return out


def cmd_compare(args) -> int:
    catalog = load_data_dir(_data_dir(args))
    try:
        affected, unaffected = catalog.pair(args.patient, args.motion)
    except NotFoundError as e:
        print(f"compare: {e}", file=sys.stderr)
        return 1
    config = CompareConfig(
        window_s=args.window_s,
        hop_s=args.hop_s,
        k_min=args.k_min,
        k_max=args.k_max,
        tau=args.tau,
        motion_metric=args.motion_metric,
        muted=frozenset(args.mute or ()),
    )
    comparison = compare_bundles(affected, unaffected, config)
    result = {
        "patient_id": comparison.patient_id,
        "motion_type": comparison.motion_type,
        "config": {
            "window_s": config.window_s,
            "hop_s": config.hop_s,
            "k_min": config.k_min,
            "k_max": config.k_max,
            "tau": config.tau,
            "motion_metric": config.motion_metric,
            "muted": sorted(config.muted),
        },
        "scores": [_score_entry(k, s) for k, s in sorted(comparison.scores.items())],
        "visibility": _visibility_entry(comparison),
        "proportions": _proportions(comparison),
        "unpaired": list(comparison.unpaired),
    }
    if args.sweep:
        steps = []
        for tau in np.linspace(0.0, 1.0, 101):
            at = apply_threshold(comparison, float(tau))
            report = visibility_report(at)
            steps.append(
                {
                    "tau": round(float(tau), 2),
                    "surviving": list(report.surviving),
                    "visible_charts": sum(report.chart_visible.values()),
                }
            )
        result["sweep"] = steps
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(result, sort_keys=True, indent=1) + "\n")
    print(f"compare: wrote {out}")
    if args.chart:
        chart = Path(args.chart)
        chart.parent.mkdir(parents=True, exist_ok=True)
        chart.write_text(comparison_svg(comparison))
        print(f"compare: wrote {chart}")
    return 0


def cmd_report(args) -> int:
    store = DocumentStore(_data_dir(args) / "store")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        doc = load_presentation(store, args.id)
    except NotFoundError:
        doc = None
    if doc is not None:
        problems = check_presentation_refs(store, doc)
        if problems:
            for p in problems:
                print(f"report: dangling reference: {p}", file=sys.stderr)
            return 1
        out.write_text(presentation_svg(doc))
        print(f"report: wrote {out}")
        return 0
    try:
        session = load_session(store, args.id)
    except NotFoundError:
        print(f"report: no presentation or session '{args.id}'", file=sys.stderr)
        return 1
    out.write_text(session_svg(session))
    print(f"report: wrote {out}")
    return 0


def cmd_demo(args) -> int:
    from .fixtures import write_demo_dataset

    manifests = write_demo_dataset(args.out, seed=args.seed)
    for m in manifests:
        print(f"demo: wrote {m}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .api.schemas import ConfigModel

    defaults = ConfigModel(
        window_s=args.window_s,
        hop_s=args.hop_s,
        k_min=args.k_min,
        k_max=args.k_max,
    )
    app = create_app(_data_dir(args), defaults=defaults)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emgdiff",
        description="Cross-limb EMG comparison: validation, scoring, reports, service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a manifest and its data files")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="headless comparison run")
    p.add_argument("--data-dir", default=None)
    p.add_argument("--patient", required=True)
    p.add_argument("--motion", required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--window-s", type=float, default=0.100)
    p.add_argument("--hop-s", type=float, default=0.010)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--motion-metric", default="displacement",
                   choices=["displacement", "speed", "acceleration"])
    p.add_argument("--mute", action="append", default=None, metavar="MUSCLE")
    p.add_argument("--sweep", action="store_true",
                   help="include a 101-step threshold sweep table")
    p.add_argument("--out", required=True, help="result JSON path")
    p.add_argument("--chart", default=None, help="optional SVG chart page path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="render a saved session or presentation")
    p.add_argument("id")
    p.add_argument("--data-dir", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("demo", help="write a synthetic demo dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=20240601)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data-dir", default=None)
    p.add_argument("--host", default=os.environ.get("EMGDIFF_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("EMGDIFF_PORT", "8000")))
    p.add_argument("--window-s", type=float,
                   default=float(os.environ.get("EMGDIFF_WINDOW_S", "0.100")))
    p.add_argument("--hop-s", type=float,
                   default=float(os.environ.get("EMGDIFF_HOP_S", "0.010")))
    p.add_argument("--k-min", type=int, default=int(os.environ.get("EMGDIFF_K_MIN", "2")))
    p.add_argument("--k-max", type=int, default=int(os.environ.get("EMGDIFF_K_MAX", "8")))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
