"""Command-line interface.

Subcommands: analyze (single turn), batch-eval, gen-corpus, verify,
anchor-status, metrics-serve. Exit codes: 0 ok, 1 configuration error,
2 verification failure, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from .audit import SimulatedLedger, read_event_line, verify_anchorage
from .audit.ledger import VERDICT_VERIFIED, AnchorError
from .config import ConfigError, load_config
from .corpus import generate_synthetic_corpus
from .evaluate import VARIANTS, run_batch_eval
from .metrics import export_metrics, serve_metrics
from .pipeline import Pipeline, TurnInput

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affectfuse")
    parser.add_argument("--config", help="YAML configuration file", default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="run one turn end to end")
    analyze.add_argument("--audio", required=True, help="WAV file for the turn")
    analyze.add_argument("--transcript", required=True)
    analyze.add_argument("--asr-confidence", type=float, required=True)
    analyze.add_argument("--session", default="cli")
    analyze.add_argument("--metrics-dump", default=None, help="write exposition text here")

    batch = commands.add_parser("batch-eval", help="evaluate variants over a manifest")
    batch.add_argument("--manifest", required=True)
    batch.add_argument("--out", required=True, help="report output directory")
    batch.add_argument("--variants", default=",".join(VARIANTS))
    batch.add_argument("--ablations", default="")
    batch.add_argument("--metrics-dump", default=None)

    gen = commands.add_parser("gen-corpus", help="generate a synthetic corpus")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--size", type=int, required=True)
    gen.add_argument("--noise-levels", default=None, help="comma-separated dB levels")

    verify = commands.add_parser("verify", help="verify a stored event against the ledger")
    verify.add_argument("--event", required=True, help="event file (canonical bytes) or JSONL log")
    verify.add_argument("--line", type=int, default=None, help="line number when --event is a JSONL log")
    verify.add_argument("--txid", required=True)

    status = commands.add_parser("anchor-status", help="anchoring status of a txid")
    status.add_argument("--txid", required=True)

    serve = commands.add_parser("metrics-serve", help="serve /metrics while processing a manifest")
    serve.add_argument("--manifest", required=True)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--hold", type=float, default=None, help="seconds to keep serving (default: forever)")

    return parser


def _open_ledger(config, readonly_ok: bool = True) -> Optional[SimulatedLedger]:
    try:
        return SimulatedLedger(
            ledger_path=config.anchoring.ledger_path,
            pending_path=config.anchoring.pending_path,
            sender=config.anchoring.sender,
            block_interval=config.anchoring.block_interval,
            max_block_entries=config.anchoring.max_block_entries,
        )
    except AnchorError:
        if readonly_ok:
            return None
        raise


def _cmd_analyze(args, config) -> int:
    with Pipeline(config) as pipeline:
        result = pipeline.run_turn(
            TurnInput(
                audio_path=args.audio,
                transcript=args.transcript,
                asr_confidence=args.asr_confidence,
                session_id=args.session,
            )
        )
        if args.metrics_dump:
            export_metrics(pipeline.metrics, args.metrics_dump)
    summary = {
        "response": result.response,
        "txid": result.txid,
        "line_number": result.line_number,
        "dominant": result.event["final"]["dominant"],
        "mode": result.event["mode"],
        "w_text": result.event["weights"]["w_text"],
        "anchor": result.anchor.as_dict(),
    }
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


def _cmd_batch_eval(args, config) -> int:
    variants = [v for v in args.variants.split(",") if v]
    ablations = [a for a in args.ablations.split(",") if a]
    from .metrics import MetricsRegistry

    registry = MetricsRegistry(config.model_size, config.run_id)
    report = run_batch_eval(
        args.manifest,
        config,
        variants=variants,
        ablations=ablations,
        out_dir=args.out,
        metrics=registry,
    )
    if args.metrics_dump:
        export_metrics(registry, args.metrics_dump)
    summary = {
        "rows": report["rows"],
        "skipped": report["skipped"],
        "weighted_f1": {
            name: report["variants"][name]["weighted"]["f1"] for name in variants
        },
    }
    if "disagreements" in report:
        summary["fuzzy_corrects_linear"] = report["disagreements"].get("fuzzy_corrects_linear")
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


def _cmd_gen_corpus(args) -> int:
    levels = None
    if args.noise_levels:
        levels = [float(v) for v in args.noise_levels.split(",")]
    manifest = generate_synthetic_corpus(args.out, seed=args.seed, size=args.size, noise_levels_db=levels)
    print(json.dumps({"manifest": str(manifest), "rows": args.size}))
    return EXIT_OK


def _cmd_verify(args, config) -> int:
    if args.line is not None:
        event_bytes = read_event_line(args.event, args.line)
    else:
        event_bytes = Path(args.event).read_bytes()
        if event_bytes.endswith(b"\n"):
            event_bytes = event_bytes[:-1]
    ledger = _open_ledger(config)
    verdict = verify_anchorage(event_bytes, args.txid, ledger)
    if ledger is not None:
        ledger.close()
    print(json.dumps(verdict.as_dict(), indent=2))
    return EXIT_OK if verdict.kind == VERDICT_VERIFIED else EXIT_VERIFY


def _cmd_anchor_status(args, config) -> int:
    ledger = _open_ledger(config, readonly_ok=False)
    try:
        record = ledger.status(args.txid)
    finally:
        ledger.close()
    print(json.dumps(record.as_dict(), indent=2))
    return EXIT_OK


def _cmd_metrics_serve(args, config) -> int:
    from .metrics import MetricsRegistry

    registry = MetricsRegistry(config.model_size, config.run_id)
    port = args.port if args.port is not None else config.metrics.port
    server = serve_metrics(registry, port)
    print(json.dumps({"port": server.port, "endpoint": f"http://127.0.0.1:{server.port}/metrics"}))
    sys.stdout.flush()
    try:
        run_batch_eval(args.manifest, config, variants=("fuzzy",), metrics=registry)
        if args.hold is None:
            while True:
                time.sleep(1.0)
        else:
            time.sleep(args.hold)
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "analyze":
            return _cmd_analyze(args, config)
        if args.command == "batch-eval":
            return _cmd_batch_eval(args, config)
        if args.command == "gen-corpus":
            return _cmd_gen_corpus(args)
        if args.command == "verify":
            return _cmd_verify(args, config)
        if args.command == "anchor-status":
            return _cmd_anchor_status(args, config)
        if args.command == "metrics-serve":
            return _cmd_metrics_serve(args, config)
        parser.error(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # surfaced with a stable exit code for scripting
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
