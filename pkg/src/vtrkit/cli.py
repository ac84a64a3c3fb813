"""Command-line entry point.

Exit codes: 0 success, 1 data error (bad input files, unparsable
transcripts, I/O), 2 usage error (bad or missing flags).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
from pathlib import Path

import numpy as np

SEED_ENV = "VTRKIT_SEED"


class DataError(Exception):
    pass


def _emit(obj, fmt: str, text: str) -> None:
    if fmt == "map":
        print(json.dumps(obj, ensure_ascii=False, sort_keys=True))
    else:
        print(text)


def _reward_config(args, parser):
    from vtrkit.scoring import RewardConfig

    try:
        return RewardConfig.with_overrides(args.omega, args.we, args.wq)
    except ValueError as e:
        parser.error(str(e))


def _seed(args, parser) -> int | None:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            parser.error(f"{SEED_ENV} must be an integer, got {env!r}")
    return args.seed


# -- score -----------------------------------------------------------------------

def cmd_score(args, parser) -> int:
    from vtrkit.marked import MarkedTextError, parse_marked
    from vtrkit.scoring import ocr_baseline_reward, score_transcript

    cfg = _reward_config(args, parser)
    try:
        pred = parse_marked(args.pred, args.lang)
        report = score_transcript(args.target, pred, cfg)
    except MarkedTextError as e:
        raise DataError(f"prediction: {e}") from None
    except ValueError as e:
        raise DataError(str(e)) from None
    out = report.to_dict()
    lines = [f"semantic {report.semantic:.4f}", f"quality  {report.quality:.4f}", f"reward   {report.reward:.4f}"]
    if args.baseline:
        plain = " ".join(t.text for t in pred.tokens if t.kind == "word")
        if not args.target:
            raise DataError("the baseline reward needs a non-empty target")
        out["baseline"] = ocr_baseline_reward(args.target, plain)
        lines.append(f"baseline {out['baseline']:.4f}")
    _emit(out, args.format, "\n".join(lines))
    return 0


# -- eval -------------------------------------------------------------------------

def cmd_eval(args, parser) -> int:
    from vtrkit.metrics import LEVELS, DatasetError, evaluate, load_dataset, load_label_pair

    if args.dataset and (args.gt or args.pred):
        parser.error("use either --dataset or --gt/--pred")
    if not args.dataset and not (args.gt and args.pred):
        parser.error("need --dataset, or both --gt and --pred")
    if not 0.0 < args.delta <= 1.0:
        parser.error("--delta must lie in (0, 1]")
    try:
        records = load_dataset(args.dataset) if args.dataset else load_label_pair(args.gt, args.pred)
        if args.level == "all":
            levels = [lv for lv in LEVELS if any(r.level == lv for r in records)]
        else:
            levels = [args.level]
        reports = [evaluate(records, args.delta, lv) for lv in levels]
    except DatasetError as e:
        where = f" (line {e.line})" if getattr(e, "line", None) else ""
        raise DataError(f"{e}{where}") from None
    except OSError as e:
        raise DataError(str(e)) from None
    _emit([r.to_dict() for r in reports], args.format, "\n\n".join(r.to_table() for r in reports))
    return 0


# -- synth ------------------------------------------------------------------------

def cmd_synth(args, parser) -> int:
    from dataclasses import replace

    from vtrkit.render.config import EngineConfig
    from vtrkit.render.synth import load_corpus, synthesize_dataset
    from vtrkit.strokes import StrokeDataError, load_stroke_db

    if args.n < 0:
        parser.error("--n must be non-negative")
    try:
        cfg = EngineConfig.from_file(args.config) if args.config else EngineConfig()
    except (ValueError, TypeError) as e:
        raise DataError(f"config: {e}") from None
    except OSError as e:
        raise DataError(str(e)) from None
    seed = _seed(args, parser)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    try:
        db = load_stroke_db(args.strokes)
        words = load_corpus(args.corpus)
    except (StrokeDataError, ValueError, OSError) as e:
        raise DataError(str(e)) from None
    try:
        manifest = synthesize_dataset(cfg, args.n, args.out, db=db, words=words, db_path=args.strokes,
                                      workers=args.workers)
    except OSError as e:
        raise DataError(f"cannot write to {args.out}: {e}") from None
    except ValueError as e:
        raise DataError(str(e)) from None
    summary = {k: manifest[k] for k in ("n_samples", "images", "boxes", "chars", "seed",
                                        "labels_sha256", "images_sha256", "missing_characters")}
    text = (f"wrote {manifest['n_samples']} samples to {args.out}\n"
            f"images: {manifest['images']['anomalous']} anomalous, {manifest['images']['normal']} normal\n"
            f"boxes:  {manifest['boxes']['anomalous']} anomalous, {manifest['boxes']['normal']} normal\n"
            f"labels sha256 {manifest['labels_sha256']}")
    _emit(summary, args.format, text)
    return 0


# -- serve ------------------------------------------------------------------------

def _check_bind(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET6 if ":" in host else socket.AF_INET, socket.SOCK_STREAM) as s:
        s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        s.bind((host, port))


def cmd_serve(args, parser) -> int:
    import uvicorn

    from vtrkit.service import ServiceConfig, create_app

    cfg = _reward_config(args, parser)
    if args.batch_limit < 1:
        parser.error("--batch-limit must be at least 1")
    try:
        _check_bind(args.host, args.port)
    except OSError as e:
        raise DataError(f"cannot bind {args.host}:{args.port}: {e}") from None
    app = create_app(ServiceConfig(cfg, args.batch_limit))
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


# -- inspect ------------------------------------------------------------------------

def cmd_inspect(args, parser) -> int:
    from PIL import Image

    from vtrkit.render.raster import rasterize_glyph, to_uint8
    from vtrkit.strokes import (
        StrokeDataError,
        compose_anomaly,
        delete_count,
        load_stroke_db,
        op_delete,
        op_insert,
        op_swap,
    )

    if len(args.glyph) != 1:
        parser.error("--glyph takes a single character")
    try:
        db = load_stroke_db(args.strokes)
    except (StrokeDataError, OSError) as e:
        raise DataError(str(e)) from None
    if args.glyph not in db:
        raise DataError(f"character {args.glyph!r} is not in the stroke database")
    g = db[args.glyph]
    seed = _seed(args, parser)
    rng = np.random.default_rng(0 if seed is None else seed)
    try:
        if args.op == "delete":
            k = delete_count(rng, len(g))
            edited, log = op_delete(g, rng, k)
        elif args.op == "insert":
            edited, log = op_insert(g, db, rng)
        elif args.op == "swap":
            edited, log = op_swap(g, rng)
        else:
            edited, log, _ = compose_anomaly(g, db, rng)
    except ValueError as e:
        raise DataError(f"{args.op} on {args.glyph!r}: {e}") from None
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        width = max(1.0, 0.08 * args.size)
        for name, glyph in (("before", g), ("after", edited)):
            cov, _ = rasterize_glyph(glyph, args.size, width)
            Image.fromarray(to_uint8(255.0 * (1.0 - cov)), "L").save(out / f"{name}.png")
    except OSError as e:
        raise DataError(str(e)) from None
    record = {"character": g.character, "op": args.op, "strokes_before": len(g), "strokes_after": len(edited),
              **log.to_dict(), "images": [str(out / "before.png"), str(out / "after.png")]}
    lines = [f"{g.character}: {len(g)} -> {len(edited)} strokes"]
    lines += [f"  {op.kind} {list(op.strokes)}" + (f" from {op.donor}" if op.donor else "") for op in log.operations]
    lines += [f"  skipped {s}" for s in log.skipped]
    _emit(record, args.format, "\n".join(lines))
    return 0


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from vtrkit import __version__
    from vtrkit.metrics import DEFAULT_DELTA

    p = argparse.ArgumentParser(prog="vtrkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "map"), default="text",
                        help="'map' prints one JSON object")

    def weights(sp):
        sp.add_argument("--omega", type=float, help="anomaly penalty weight (default 5; 1 for evaluation-style)")
        sp.add_argument("--we", type=float, help="semantic weight (default 0.5)")
        sp.add_argument("--wq", type=float, help="structural quality weight (default 0.5)")

    s = sub.add_parser("score", help="score one prediction against a target")
    s.add_argument("--target", required=True)
    s.add_argument("--pred", required=True, help="inline marked prediction, e.g. 'c[[a]]t'")
    s.add_argument("--lang", choices=("en", "zh"), default="en")
    weights(s)
    s.add_argument("--baseline", action="store_true", help="also print the edit-distance baseline reward")
    fmt(s)
    s.set_defaults(func=cmd_score)

    e = sub.add_parser("eval", help="TSAP and CTR metrics over a dataset")
    e.add_argument("--dataset", help="JSONL with id, level, language, gt, pred")
    e.add_argument("--gt", help="renderer label file used as ground truth")
    e.add_argument("--pred", help="label file with predictions, joined on id")
    e.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    e.add_argument("--level", choices=("image", "box", "all"), default="all")
    fmt(e)
    e.set_defaults(func=cmd_eval)

    y = sub.add_parser("synth", help="render a labeled synthetic dataset")
    y.add_argument("--config", help="JSON or YAML map of engine settings")
    y.add_argument("--n", type=int, required=True)
    y.add_argument("--out", required=True)
    y.add_argument("--seed", type=int, help=f"overrides the config seed; {SEED_ENV} overrides this")
    y.add_argument("--strokes", help="stroke database JSONL (bundled sample set by default)")
    y.add_argument("--corpus", help="whitespace-separated text corpus (bundled sample by default)")
    y.add_argument("--workers", type=int, default=1)
    fmt(y)
    y.set_defaults(func=cmd_synth)

    v = sub.add_parser("serve", help="run the HTTP reward service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    weights(v)
    v.add_argument("--batch-limit", type=int, default=256)
    v.add_argument("--log-level", default="info")
    v.set_defaults(func=cmd_serve)

    i = sub.add_parser("inspect", help="apply one stroke operator to a glyph and render before/after")
    i.add_argument("--glyph", required=True)
    i.add_argument("--strokes")
    i.add_argument("--op", choices=("delete", "insert", "swap", "compose"), default="compose")
    i.add_argument("--seed", type=int)
    i.add_argument("--out", default="inspect_out")
    i.add_argument("--size", type=int, default=256)
    fmt(i)
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
