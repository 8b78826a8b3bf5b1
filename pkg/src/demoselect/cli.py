"""Command line interface.

Subcommands: ``select``, ``run``, ``sweep``, ``ablate``, ``ttest``,
``gen-synthetic``.  Run-shaped subcommands read a JSON configuration file
(see README for the schema) whose relative paths resolve against the config
file's directory; individual flags override file values.

Exit codes: 0 success, 1 configuration or input error, 2 provider or
runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .errors import (
    ConfigError,
    DemoselectError,
    FormatError,
    RunAbortedError,
    ValidationError,
)
from .harness import (
    METHODS,
    PERTURBATIONS,
    SWEEP_DIMENSIONS,
    ProviderSet,
    RunConfig,
    ablate,
    paired_t_test,
    persist_report,
    rank_candidates,
    run_fingerprint,
    run_pipeline,
    sweep,
)
from .providers import ProviderConfig
from .reranker import ORDER_POLICIES, SelectionConfig
from .synthetic import SyntheticSpec, generate_synthetic, write_synthetic


def _provider_from_dict(data: dict, base_dir: str, name: str) -> ProviderConfig:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(f"provider {name!r} must be an object with a 'kind'")
    path = data.get("path")
    if path is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return ProviderConfig(
        kind=data["kind"],
        path=path,
        endpoint=data.get("endpoint"),
        timeout_ms=data.get("timeout_ms", 10_000),
        max_retries=data.get("max_retries", 3),
        mode=data.get("mode", "faithful"),
    )


def _resolve_path(value: str | None, base_dir: str) -> str | None:
    if value is None or os.path.isabs(value):
        return value
    return os.path.join(base_dir, value)


def run_config_from_dict(data: dict, base_dir: str = ".") -> RunConfig:
    """Build a RunConfig from the documented JSON configuration schema."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        providers_data = data["providers"]
        selection_data = data.get("selection", {})
        selection = SelectionConfig(
            alpha=selection_data.get("alpha", 0.5),
            k_candidates=selection_data.get("k_candidates", 30),
            n_shot=selection_data.get("n_shot", 8),
            order_policy=selection_data.get("order_policy", "score_ascending_best_last"),
        )
        providers = ProviderSet(
            pool_embeddings=_provider_from_dict(
                providers_data["pool_embeddings"], base_dir, "pool_embeddings"
            ),
            test_embeddings=_provider_from_dict(
                providers_data["test_embeddings"], base_dir, "test_embeddings"
            ),
            pool_distributions=_provider_from_dict(
                providers_data.get("pool_distributions", {"kind": "one_hot_oracle"}),
                base_dir,
                "pool_distributions",
            ),
            test_distributions=_provider_from_dict(
                providers_data.get("test_distributions", {"kind": "one_hot_oracle"}),
                base_dir,
                "test_distributions",
            ),
        )
        template = data.get("template", "generic")
        if isinstance(template, str) and (template.endswith(".json") or os.sep in template):
            template = _resolve_path(template, base_dir)
        return RunConfig(
            pool_corpus=_resolve_path(data["pool_corpus"], base_dir),
            test_corpus=_resolve_path(data["test_corpus"], base_dir),
            label_map=_resolve_path(data.get("label_map"), base_dir),
            providers=providers,
            selection=selection,
            method=data.get("method", "topk_l2d"),
            template=template,
            completion=data.get("completion", "mock_majority"),
            completion_endpoint=data.get("completion_endpoint"),
            max_tokens=data.get("max_tokens", 16),
            seed=data.get("seed", 0),
            parallelism=data.get("parallelism", 8),
            perturb_pool=data.get("perturb_pool"),
        )
    except KeyError as exc:
        raise ConfigError(f"configuration is missing required key {exc}") from None


def load_run_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot open config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc.msg}") from None
    return run_config_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    selection_overrides = {
        attr: getattr(args, attr)
        for attr in ("alpha", "k_candidates", "n_shot", "order_policy")
        if getattr(args, attr, None) is not None
    }
    overrides: dict[str, object] = {}
    if selection_overrides:
        overrides["selection"] = replace(config.selection, **selection_overrides)
    for attr in (
        "method",
        "completion",
        "completion_endpoint",
        "seed",
        "parallelism",
        "template",
        "max_tokens",
        "pool_corpus",
        "test_corpus",
        "label_map",
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[attr] = value
    if getattr(args, "perturb_pool", None) is not None:
        perturb = args.perturb_pool
        overrides["perturb_pool"] = None if perturb == "none" else perturb
    # one replace call: interdependent fields (completion + endpoint) must
    # not be validated against a half-updated config
    return replace(config, **overrides) if overrides else config


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--method", choices=METHODS)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--k-candidates", dest="k_candidates", type=int)
    parser.add_argument("--n-shot", dest="n_shot", type=int)
    parser.add_argument("--order-policy", dest="order_policy", choices=ORDER_POLICIES)
    parser.add_argument("--completion", choices=("remote", "mock_majority", "mock_echo"))
    parser.add_argument("--completion-endpoint", dest="completion_endpoint")
    parser.add_argument("--template")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--parallelism", type=int)
    parser.add_argument("--max-tokens", dest="max_tokens", type=int)
    parser.add_argument("--pool-corpus", dest="pool_corpus", help="override the pool corpus path")
    parser.add_argument("--test-corpus", dest="test_corpus", help="override the test corpus path")
    parser.add_argument("--label-map", dest="label_map", help="override the label map path")
    parser.add_argument(
        "--perturb-pool",
        dest="perturb_pool",
        choices=PERTURBATIONS + ("none",),
        help="corrupt rendered pool labels: reversed or arbitrary symbols",
    )


def _parse_values(raw: str, dimension: str) -> list:
    cast = float if dimension == "alpha" else int
    try:
        return [cast(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values {raw!r}: {exc}") from None


def _parse_series(raw: str) -> list[float]:
    if raw.startswith("@"):
        path = raw[1:]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                content = fh.read().strip()
        except OSError as exc:
            raise ConfigError(f"cannot open series file: {exc}") from None
        if content.startswith("["):
            return [float(v) for v in json.loads(content)]
        return [float(line) for line in content.splitlines() if line.strip()]
    try:
        return [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse series {raw!r}: {exc}") from None


def _cmd_run(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_run_config(args.config), args)
    try:
        report = run_pipeline(config)
    except RunAbortedError as exc:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(
                    {
                        "aborted": True,
                        "error": str(exc),
                        "partial_trace": [t.to_dict() for t in exc.partial_trace],
                    },
                    fh,
                    sort_keys=True,
                    indent=2,
                )
                fh.write("\n")
        raise
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    if args.out_dir:
        persist_report(report, args.out_dir, run_fingerprint(config))
    print(
        json.dumps(
            {
                "method": config.method,
                "accuracy": report.accuracy,
                "n_correct": report.n_correct,
                "n_total": report.n_total,
                "n_abstain": report.n_abstain,
                "wall_time_ms": report.wall_time_ms,
            },
            sort_keys=True,
        )
    )
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_run_config(args.config), args)
    ranked = rank_candidates(config, args.test_ids)
    for test_id in args.test_ids:
        print(
            json.dumps(
                {
                    "test_id": test_id,
                    "candidates": [d.to_dict() for d in ranked[test_id]],
                },
                sort_keys=True,
            )
        )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_run_config(args.config), args)
    values = _parse_values(args.values, args.dimension)
    points = sweep(config, args.dimension, values, out_dir=args.out_dir)
    for point in points:
        row: dict[str, object] = {args.dimension: point.value}
        if point.error is not None:
            row["error"] = point.error
        else:
            row["accuracy"] = point.report.accuracy
            if point.reused:
                row["reused"] = True
        print(json.dumps(row, sort_keys=True))
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_run_config(args.config), args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    reports = ablate(config, methods, out_dir=args.out_dir)
    for method, report in reports.items():
        print(json.dumps({"method": method, "accuracy": report.accuracy}, sort_keys=True))
    return 0


def _cmd_ttest(args: argparse.Namespace) -> int:
    result = paired_t_test(_parse_series(args.a), _parse_series(args.b))
    print(
        json.dumps(
            {"t_statistic": result.t_statistic, "p_value": result.p_value, "df": result.df},
            sort_keys=True,
        )
    )
    return 0


def _cmd_gen_synthetic(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        n_pool=args.pool_size,
        n_test=args.test_size,
        num_classes=args.classes,
        noise_rate=args.noise,
        dim=args.dim,
        cluster_spread=args.spread,
        seed=args.seed,
    )
    bundle = generate_synthetic(spec)
    paths = write_synthetic(bundle, args.out)
    config = {
        "method": "topk_l2d",
        "selection": {"alpha": 0.5, "k_candidates": 30, "n_shot": 8},
        "pool_corpus": os.path.basename(paths["pool_corpus"]),
        "test_corpus": os.path.basename(paths["test_corpus"]),
        "label_map": os.path.basename(paths["label_map"]),
        "template": "generic",
        "completion": "mock_majority",
        "seed": args.seed,
        "providers": {
            "pool_embeddings": {"kind": "file", "path": os.path.basename(paths["pool_embeddings"])},
            "test_embeddings": {"kind": "file", "path": os.path.basename(paths["test_embeddings"])},
            "pool_distributions": {"kind": "one_hot_oracle", "mode": "faithful"},
            "test_distributions": {"kind": "one_hot_oracle", "mode": "faithful"},
        },
    }
    config_path = os.path.join(args.out, "config.json")
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")
    print(json.dumps({"out": args.out, "config": config_path}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demoselect",
        description="Two-stage demonstration selection and evaluation for in-context learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full pipeline once")
    _add_run_flags(p_run)
    p_run.add_argument("--out", help="write the full report JSON here")
    p_run.add_argument("--out-dir", dest="out_dir", help="persist report + index entry here")
    p_run.set_defaults(func=_cmd_run)

    p_select = sub.add_parser("select", help="print ranked demonstrations for test ids")
    _add_run_flags(p_select)
    p_select.add_argument("--test-id", dest="test_ids", action="append", required=True)
    p_select.set_defaults(func=_cmd_select)

    p_sweep = sub.add_parser("sweep", help="run one dimension over several values")
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--dimension", choices=SWEEP_DIMENSIONS, required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out-dir", dest="out_dir")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_ablate = sub.add_parser("ablate", help="compare methods under one configuration")
    _add_run_flags(p_ablate)
    p_ablate.add_argument("--methods", default="topk_l2d,wo_sem,wo_l2d,topk,random")
    p_ablate.add_argument("--out-dir", dest="out_dir")
    p_ablate.set_defaults(func=_cmd_ablate)

    p_ttest = sub.add_parser("ttest", help="paired t-test over two accuracy series")
    p_ttest.add_argument("--a", required=True, help="comma-separated floats or @file")
    p_ttest.add_argument("--b", required=True, help="comma-separated floats or @file")
    p_ttest.set_defaults(func=_cmd_ttest)

    p_gen = sub.add_parser("gen-synthetic", help="generate a synthetic evaluation bundle")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--pool-size", dest="pool_size", type=int, default=500)
    p_gen.add_argument("--test-size", dest="test_size", type=int, default=200)
    p_gen.add_argument("--classes", type=int, default=2)
    p_gen.add_argument("--noise", type=float, default=0.3)
    p_gen.add_argument("--dim", type=int, default=8)
    p_gen.add_argument("--spread", type=float, default=0.35)
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.set_defaults(func=_cmd_gen_synthetic)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ConfigError, ValidationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DemoselectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
