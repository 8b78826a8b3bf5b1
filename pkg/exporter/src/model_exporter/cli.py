"""Command line interface: ``export`` (batch files) and ``serve`` (HTTP)."""

from __future__ import annotations

import argparse
import json
import sys

from .backends import BackendUnavailableError, ENCODER_BACKENDS, SLM_BACKENDS, TrainingDivergedError
from .corpus_io import CorpusFormatError
from .export import ExportJob, ExporterError, export
from .server import serve


def _add_job_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pool", required=True, help="pool corpus JSONL")
    parser.add_argument("--test", required=True, help="test corpus JSONL")
    parser.add_argument("--label-map", dest="label_map", required=True, help="label map JSON")
    parser.add_argument("--slm", choices=SLM_BACKENDS, default="tfidf_logistic")
    parser.add_argument("--encoder", choices=ENCODER_BACKENDS, default="hashing")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=200)
    parser.add_argument("--learning-rate", dest="learning_rate", type=float, default=1.0)
    parser.add_argument("--encoder-dim", dest="encoder_dim", type=int, default=256)


def _job(args: argparse.Namespace, output_dir: str) -> ExportJob:
    return ExportJob(
        pool_corpus=args.pool,
        test_corpus=args.test,
        label_map=args.label_map,
        output_dir=output_dir,
        slm_backend=args.slm,
        encoder_backend=args.encoder,
        seed=args.seed,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        encoder_dim=args.encoder_dim,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="model-exporter",
        description="Export engine-format embedding and label-distribution files, or serve them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_export = sub.add_parser("export", help="write the four engine files plus metrics")
    _add_job_flags(p_export)
    p_export.add_argument("--out", required=True, help="output directory")

    p_serve = sub.add_parser("serve", help="serve /classify and /embed")
    _add_job_flags(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "export":
            paths = export(_job(args, args.out))
            print(json.dumps(paths, sort_keys=True))
            return 0
        server = serve(_job(args, output_dir="."), host=args.host, port=args.port)
        print(json.dumps({"endpoint": server.endpoint}), flush=True)
        try:
            server._thread.join()
        except KeyboardInterrupt:
            server.stop()
        return 0
    except (ExporterError, CorpusFormatError, BackendUnavailableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TrainingDivergedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
