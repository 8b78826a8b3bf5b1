"""End-to-end evaluation runs: select, render, complete, parse, score.

A run binds a pool corpus, a test corpus, providers for embeddings and label
distributions, a prompt template, and a completion backend, then processes
every test example independently and aggregates accuracy.  Mock completion
backends (`mock_echo`, `mock_majority`) make whole runs deterministic, which
is what every structural test in this package relies on; the remote backend
speaks the documented ``/complete`` protocol for full-fidelity runs.

Label perturbations are prompt-time corruptions: they change what the
completion backend sees (rendered verbalizers, demonstration labels) but not
the label distributions supplied by providers, mirroring a distribution
estimator that was trained before the corruption.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from scipy import stats as _scipy_stats

from .corpus import Corpus, LabelMap, load_corpus, load_label_map, make_ood_pair, perturb_labels
from .divergence import LabelDistribution
from .embeddings import CandidatePool, EmbeddingStore, retrieve_topk
from .errors import ConfigError, DemoselectError, ProtocolError, RunAbortedError, ValidationError
from .prompts import ABSTAIN, PromptTemplate, builtin_template, load_template, parse_prediction, render_prompt
from .providers import (
    LabelDistributionStore,
    ProviderConfig,
    _post_with_retries,
    load_embeddings,
    load_label_distributions,
    one_hot_oracle,
    remote_classify,
    remote_embed,
    uniform_distributions,
)
from .reranker import SelectionConfig, rerank
from .validation import check_choice, check_finite_floats, check_positive_int

METHODS = ("random", "topk", "topk_l2d", "wo_sem", "wo_l2d")
COMPLETIONS = ("remote", "mock_majority", "mock_echo")
SWEEP_DIMENSIONS = ("alpha", "n_shot", "k_candidates")
PERTURBATIONS = ("reversed", "arbitrary")


@dataclass(frozen=True)
class ProviderSet:
    """Providers for the four per-example data roles of a run."""

    pool_embeddings: ProviderConfig
    test_embeddings: ProviderConfig
    pool_distributions: ProviderConfig = ProviderConfig(kind="one_hot_oracle")
    test_distributions: ProviderConfig = ProviderConfig(kind="one_hot_oracle")


@dataclass(frozen=True)
class RunConfig:
    """Everything one evaluation run depends on.

    Corpora and the template may be given as loaded objects or as paths;
    paths require ``label_map``.  ``wo_sem`` and ``wo_l2d`` force the
    effective alpha to 0 and 1 respectively, whatever ``selection.alpha``
    says.
    """

    pool_corpus: Corpus | str
    test_corpus: Corpus | str
    providers: ProviderSet
    selection: SelectionConfig = SelectionConfig()
    method: str = "topk_l2d"
    label_map: LabelMap | str | None = None
    template: PromptTemplate | str = "generic"
    completion: str = "mock_majority"
    completion_endpoint: str | None = None
    max_tokens: int = 16
    seed: int = 0
    parallelism: int = 8
    perturb_pool: str | None = None

    def __post_init__(self):
        check_choice(self.method, METHODS, "method")
        check_choice(self.completion, COMPLETIONS, "completion")
        check_positive_int(self.parallelism, "parallelism")
        check_positive_int(self.max_tokens, "max_tokens")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")
        if self.completion == "remote" and not self.completion_endpoint:
            raise ConfigError("completion 'remote' requires completion_endpoint")
        if self.perturb_pool is not None:
            check_choice(self.perturb_pool, PERTURBATIONS, "perturb_pool")


@dataclass(frozen=True)
class SelectedDemo:
    """One selected demonstration with whatever scores the method computed."""

    train_id: str
    s_text: float | None = None
    s_label: float | None = None
    s_hybrid: float | None = None

    def to_dict(self) -> dict:
        return {
            "train_id": self.train_id,
            "s_text": self.s_text,
            "s_label": self.s_label,
            "s_hybrid": self.s_hybrid,
        }


@dataclass(frozen=True)
class ExampleTrace:
    test_id: str
    selected: tuple[SelectedDemo, ...]
    predicted: int
    gold: int

    def to_dict(self) -> dict:
        return {
            "test_id": self.test_id,
            "selected": [d.to_dict() for d in self.selected],
            "predicted": self.predicted,
            "gold": self.gold,
        }


@dataclass(frozen=True)
class RunReport:
    """Aggregate accuracy plus a per-example trace of one run.

    ``accuracy`` is exactly ``n_correct / n_total``; abstentions count as
    incorrect.  ``canonical_dict`` drops the volatile wall time so that
    deterministic runs serialize byte-identically.
    """

    accuracy: float
    n_correct: int
    n_total: int
    n_abstain: int
    per_example: tuple[ExampleTrace, ...]
    config_echo: dict
    wall_time_ms: int

    def canonical_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n_correct": self.n_correct,
            "n_total": self.n_total,
            "n_abstain": self.n_abstain,
            "per_example": [t.to_dict() for t in self.per_example],
            "config_echo": self.config_echo,
        }

    def to_dict(self) -> dict:
        out = self.canonical_dict()
        out["wall_time_ms"] = self.wall_time_ms
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), sort_keys=True, indent=2) + "\n"

    def selected_ids(self) -> list[list[str]]:
        return [[d.train_id for d in t.selected] for t in self.per_example]

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        traces = tuple(
            ExampleTrace(
                test_id=t["test_id"],
                selected=tuple(SelectedDemo(**d) for d in t["selected"]),
                predicted=t["predicted"],
                gold=t["gold"],
            )
            for t in data["per_example"]
        )
        return cls(
            accuracy=data["accuracy"],
            n_correct=data["n_correct"],
            n_total=data["n_total"],
            n_abstain=data["n_abstain"],
            per_example=traces,
            config_echo=data["config_echo"],
            wall_time_ms=data.get("wall_time_ms", 0),
        )


def _resolve_corpus(ref: Corpus | str, label_map: LabelMap | None, role: str) -> Corpus:
    if isinstance(ref, Corpus):
        return ref
    if label_map is None:
        raise ConfigError(f"corpus path {ref!r} requires a label_map")
    return load_corpus(ref, label_map, role=role)


def _resolve_template(ref: PromptTemplate | str) -> PromptTemplate:
    if isinstance(ref, PromptTemplate):
        return ref
    if os.path.exists(ref):
        return load_template(ref)
    return builtin_template(ref)


class _PipelineContext:
    """Resolved state for one run; per-example work is read-only on it."""

    def __init__(self, config: RunConfig):
        self.config = config
        label_map = config.label_map
        if isinstance(label_map, str):
            label_map = load_label_map(label_map)
        self.pool = _resolve_corpus(config.pool_corpus, label_map, "pool")
        self.test = _resolve_corpus(config.test_corpus, label_map, "test")
        self.template = _resolve_template(config.template)
        if self.pool.num_classes != self.test.num_classes:
            raise ConfigError(
                f"pool has {self.pool.num_classes} classes but test has {self.test.num_classes}"
            )
        self.pool_class_permutation = None
        if self.pool.label_map != self.test.label_map:
            # cross-dataset run: align classes by name and canonicalize the
            # pool into the test corpus's label space, so ranking, voting,
            # and scoring all happen in one index space and demonstrations
            # render with the test task's verbalizers
            pair = make_ood_pair(self.pool, self.test)
            mapping = dict(pair.alignment)
            if any(pool_idx != test_idx for pool_idx, test_idx in pair.alignment):
                self.pool_class_permutation = mapping
            self.pool = replace(
                self.pool,
                label_map=self.test.label_map,
                examples=tuple(
                    replace(ex, label=mapping[ex.label]) for ex in self.pool.examples
                ),
            )

        eff_alpha = config.selection.alpha
        if config.method == "wo_sem":
            eff_alpha = 0.0
        elif config.method == "wo_l2d":
            eff_alpha = 1.0
        self.selection = replace(config.selection, alpha=eff_alpha)

        self.render_pool = (
            perturb_labels(self.pool, config.perturb_pool)
            if config.perturb_pool
            else self.pool
        )
        self.active_map = self.render_pool.label_map
        self.pool_by_id = {ex.id: ex for ex in self.render_pool.examples}
        self.exclude_self = self.pool.name == self.test.name

        self.needs_retrieval = config.method != "random"
        self.needs_dists = config.method in ("topk_l2d", "wo_sem", "wo_l2d")

        if self.needs_retrieval:
            self.pool_emb = self._embeddings(
                config.providers.pool_embeddings, self.pool, require_exact=True
            )
            self.test_emb = self._embeddings(
                config.providers.test_embeddings, self.test, require_exact=False
            )
            if self.pool_emb.dim != self.test_emb.dim:
                raise ConfigError(
                    f"pool embeddings have dim {self.pool_emb.dim}, test {self.test_emb.dim}"
                )
        if self.needs_dists:
            self.pool_dists = self._distributions(config.providers.pool_distributions, self.pool)
            if config.providers.pool_distributions.kind in ("file", "remote"):
                # external predictions arrive in the pool dataset's own class
                # order; oracle/uniform providers already use the remapped corpus
                self.pool_dists = self._permute_pool_store(self.pool_dists)
            self.test_dists = self._distributions(config.providers.test_distributions, self.test)

    def _embeddings(
        self, provider: ProviderConfig, corpus: Corpus, require_exact: bool
    ) -> EmbeddingStore:
        if provider.kind == "file":
            store = load_embeddings(provider.path)
        elif provider.kind == "remote":
            vectors = remote_embed(
                provider.endpoint,
                list(corpus.texts),
                timeout_ms=provider.timeout_ms,
                max_retries=provider.max_retries,
                max_inflight=self.config.parallelism,
            )
            store = EmbeddingStore(dict(zip(corpus.ids, vectors)))
        else:
            raise ConfigError(f"provider kind {provider.kind!r} cannot supply embeddings")
        store_ids = set(store.ids)
        corpus_ids = set(corpus.ids)
        missing = sorted(corpus_ids - store_ids)[:3]
        if missing:
            raise ConfigError(
                f"embedding store lacks ids of corpus {corpus.name!r} (first: {missing})"
            )
        # The pool store is searched whole, so ids not in the pool corpus
        # would leak into retrieval; query-side stores are lookup-only and
        # may hold a superset (e.g. when evaluating a corpus slice).
        if require_exact and store_ids != corpus_ids:
            extra = sorted(store_ids - corpus_ids)[:3]
            raise ConfigError(
                f"embedding store holds ids outside corpus {corpus.name!r} (first: {extra})"
            )
        return store

    def _permute_pool_store(self, store: LabelDistributionStore) -> LabelDistributionStore:
        """Reorder externally produced pool probabilities into test class space."""
        if self.pool_class_permutation is None:
            return store
        mapping = self.pool_class_permutation
        permuted = {}
        for eid in store.ids:
            probs = store.get(eid).probs
            row = [0.0] * len(probs)
            for pool_idx, test_idx in mapping.items():
                row[test_idx] = probs[pool_idx]
            permuted[eid] = LabelDistribution(tuple(row))
        return LabelDistributionStore(permuted)

    def _distributions(self, provider: ProviderConfig, corpus: Corpus) -> LabelDistributionStore:
        if provider.kind == "file":
            store = load_label_distributions(provider.path, corpus.num_classes)
        elif provider.kind == "one_hot_oracle":
            store = one_hot_oracle(corpus, provider.mode)
        elif provider.kind == "uniform":
            store = uniform_distributions(corpus.ids, corpus.num_classes)
        else:
            dists = remote_classify(
                provider.endpoint,
                list(corpus.texts),
                corpus.num_classes,
                timeout_ms=provider.timeout_ms,
                max_retries=provider.max_retries,
                max_inflight=self.config.parallelism,
            )
            store = LabelDistributionStore(dict(zip(corpus.ids, dists)))
        if store.num_classes != corpus.num_classes:
            raise ConfigError(
                f"distributions carry {store.num_classes} classes, corpus {corpus.name!r} "
                f"has {corpus.num_classes}"
            )
        missing = [eid for eid in corpus.ids if eid not in store]
        if missing:
            raise ConfigError(
                f"distribution store lacks {len(missing)} ids of corpus {corpus.name!r} "
                f"(first: {missing[:3]})"
            )
        return store

    def _candidate_pool(self, ex) -> CandidatePool:
        query = self.test_emb.vector(ex.id)
        k = self.selection.k_candidates + (1 if self.exclude_self else 0)
        pool = retrieve_topk(ex.id, query, self.pool_emb, k)
        entries = pool.entries
        if self.exclude_self:
            entries = tuple(e for e in entries if e[0] != ex.id)[: self.selection.k_candidates]
        return CandidatePool(test_id=ex.id, entries=entries)

    def rank_for(self, ex) -> list[SelectedDemo]:
        """Full ranked candidate list for one test example (no truncation)."""
        pool = self._candidate_pool(ex)
        if self.config.method == "topk":
            return [SelectedDemo(train_id=tid, s_text=s) for tid, s in pool.entries]
        ranked = rerank(
            pool,
            self.test_dists.get(ex.id),
            self.pool_dists.subset(pool.ids),
            self.selection,
        )
        return [
            SelectedDemo(c.train_id, s_text=c.s_text, s_label=c.s_label, s_hybrid=c.s_hybrid)
            for c in ranked
        ]

    def _select(self, ex) -> list[SelectedDemo]:
        if self.config.method == "random":
            rng = random.Random(f"{self.config.seed}:{ex.id}")
            ids = [
                eid
                for eid in self.pool.ids
                if not (self.exclude_self and eid == ex.id)
            ]
            if self.selection.n_shot > len(ids):
                raise ConfigError(
                    f"n_shot {self.selection.n_shot} exceeds pool size {len(ids)}"
                )
            return [SelectedDemo(train_id=tid) for tid in rng.sample(ids, self.selection.n_shot)]
        ranked = self.rank_for(ex)
        if len(ranked) < self.selection.n_shot:
            raise ConfigError(
                f"only {len(ranked)} candidates available for test id {ex.id!r}, "
                f"n_shot is {self.selection.n_shot}"
            )
        prefix = ranked[: self.selection.n_shot]
        if self.selection.order_policy == "score_ascending_best_last":
            prefix = list(reversed(prefix))
        return prefix

    def _complete(self, prompt: str, ex, demo_ids: Sequence[str]) -> str:
        completion = self.config.completion
        if completion == "mock_echo":
            return self.active_map.verbalizer(ex.label)
        if completion == "mock_majority":
            counts: dict[int, int] = {}
            for tid in demo_ids:
                label = self.pool_by_id[tid].label
                counts[label] = counts.get(label, 0) + 1
            top = max(counts.values())
            majority = min(label for label, c in counts.items() if c == top)
            return self.active_map.verbalizer(majority)
        data = _post_with_retries(
            self.config.completion_endpoint.rstrip("/") + "/complete",
            {"prompt": prompt, "max_tokens": self.config.max_tokens},
            timeout_ms=60_000,
            max_retries=3,
        )
        text = data.get("text")
        if not isinstance(text, str):
            raise ProtocolError("completion response lacks a 'text' string")
        return text

    def process(self, ex) -> ExampleTrace:
        selected = self._select(ex)
        demo_ids = [d.train_id for d in selected]
        demos = []
        for tid in demo_ids:
            demo_ex = self.pool_by_id[tid]
            demos.append((demo_ex, self.active_map.verbalizer(demo_ex.label)))
        prompt = render_prompt(self.template, demos, ex)
        output = self._complete(prompt, ex, demo_ids)
        predicted = parse_prediction(output, self.active_map)
        return ExampleTrace(
            test_id=ex.id,
            selected=tuple(selected),
            predicted=predicted,
            gold=ex.label,
        )


def _config_echo(config: RunConfig, ctx: _PipelineContext) -> dict:
    def provider_dict(p: ProviderConfig) -> dict:
        return {
            "kind": p.kind,
            "path": p.path,
            "endpoint": p.endpoint,
            "timeout_ms": p.timeout_ms,
            "max_retries": p.max_retries,
            "mode": p.mode,
        }

    return {
        "method": config.method,
        "selection": {
            "alpha": config.selection.alpha,
            "k_candidates": config.selection.k_candidates,
            "n_shot": config.selection.n_shot,
            "order_policy": config.selection.order_policy,
        },
        "effective_alpha": ctx.selection.alpha,
        "pool_corpus": {"name": ctx.pool.name, "size": len(ctx.pool), "role": ctx.pool.role},
        "test_corpus": {"name": ctx.test.name, "size": len(ctx.test), "role": ctx.test.role},
        "num_classes": ctx.pool.num_classes,
        "providers": {
            "pool_embeddings": provider_dict(config.providers.pool_embeddings),
            "test_embeddings": provider_dict(config.providers.test_embeddings),
            "pool_distributions": provider_dict(config.providers.pool_distributions),
            "test_distributions": provider_dict(config.providers.test_distributions),
        },
        "template": ctx.template.task_name,
        "completion": config.completion,
        "completion_endpoint": config.completion_endpoint,
        "max_tokens": config.max_tokens,
        "seed": config.seed,
        "parallelism": config.parallelism,
        "perturb_pool": config.perturb_pool,
    }


def run_pipeline(config: RunConfig) -> RunReport:
    """Run the full pipeline over every test example and aggregate accuracy.

    Examples are processed independently (bounded by ``config.parallelism``)
    and the per-example trace always follows test corpus order.
    """
    start = time.perf_counter()
    ctx = _PipelineContext(config)
    if len(ctx.test) == 0:
        raise ConfigError(f"test corpus {ctx.test.name!r} is empty")
    workers = min(config.parallelism, len(ctx.test))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(ctx.process, ex) for ex in ctx.test.examples]
        collected = []
        for i, future in enumerate(futures):
            try:
                collected.append(future.result())
            except DemoselectError as exc:
                for pending in futures[i + 1 :]:
                    pending.cancel()
                raise RunAbortedError(
                    f"run aborted at test example {ctx.test.examples[i].id!r}: {exc}",
                    partial_trace=tuple(collected),
                    cause=exc,
                ) from exc
        traces = tuple(collected)
    n_total = len(traces)
    n_correct = sum(1 for t in traces if t.predicted == t.gold)
    n_abstain = sum(1 for t in traces if t.predicted == ABSTAIN)
    elapsed_ms = int(round((time.perf_counter() - start) * 1000))
    return RunReport(
        accuracy=n_correct / n_total,
        n_correct=n_correct,
        n_total=n_total,
        n_abstain=n_abstain,
        per_example=traces,
        config_echo=_config_echo(config, ctx),
        wall_time_ms=elapsed_ms,
    )


def rank_candidates(config: RunConfig, test_ids: Sequence[str]) -> dict[str, list[SelectedDemo]]:
    """Ranked candidate lists for chosen test ids, without running completions."""
    ctx = _PipelineContext(config)
    if config.method == "random":
        raise ConfigError("rank_candidates is undefined for method 'random'")
    out = {}
    for test_id in test_ids:
        out[test_id] = ctx.rank_for(ctx.test.example(test_id))
    return out


# ---------------------------------------------------------------------------
# Run persistence: one report file per run plus an append-only index, so
# sweeps can resume without recomputing finished points.
# ---------------------------------------------------------------------------


def run_fingerprint(config: RunConfig) -> str:
    ctx_free = {
        "method": config.method,
        "selection": [
            config.selection.alpha,
            config.selection.k_candidates,
            config.selection.n_shot,
            config.selection.order_policy,
        ],
        "pool": config.pool_corpus if isinstance(config.pool_corpus, str) else config.pool_corpus.name,
        "test": config.test_corpus if isinstance(config.test_corpus, str) else config.test_corpus.name,
        "seed": config.seed,
        "completion": config.completion,
        "perturb_pool": config.perturb_pool,
        "providers": [
            (p.kind, p.path, p.endpoint, p.mode)
            for p in (
                config.providers.pool_embeddings,
                config.providers.test_embeddings,
                config.providers.pool_distributions,
                config.providers.test_distributions,
            )
        ],
    }
    blob = json.dumps(ctx_free, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def persist_report(report: RunReport, out_dir: str, run_id: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"report-{run_id}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    index_entry = {
        "run_id": run_id,
        "path": os.path.basename(path),
        "accuracy": report.accuracy,
        "method": report.config_echo["method"],
        "effective_alpha": report.config_echo["effective_alpha"],
    }
    with open(os.path.join(out_dir, "index.jsonl"), "a", encoding="utf-8") as fh:
        fh.write(json.dumps(index_entry, sort_keys=True))
        fh.write("\n")
    return path


def _load_indexed_report(out_dir: str, run_id: str) -> RunReport | None:
    index_path = os.path.join(out_dir, "index.jsonl")
    if not os.path.exists(index_path):
        return None
    with open(index_path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            entry = json.loads(line)
            if entry.get("run_id") == run_id:
                report_path = os.path.join(out_dir, entry["path"])
                if os.path.exists(report_path):
                    with open(report_path, "r", encoding="utf-8") as rfh:
                        return RunReport.from_dict(json.load(rfh))
    return None


@dataclass(frozen=True)
class SweepPoint:
    value: object
    report: RunReport | None = None
    error: str | None = None
    reused: bool = field(default=False, compare=False)


def sweep(
    config: RunConfig,
    dimension: str,
    values: Sequence,
    out_dir: str | None = None,
) -> list[SweepPoint]:
    """One run per value of a selection dimension, everything else fixed.

    Invalid points (say n_shot above k_candidates) become error entries and
    the sweep continues.  With ``out_dir`` set, reports are persisted and
    already-indexed points are reloaded instead of recomputed.
    """
    check_choice(dimension, SWEEP_DIMENSIONS, "dimension")
    if not values:
        raise ValidationError("sweep values must not be empty")
    points = []
    for value in values:
        try:
            selection = replace(config.selection, **{dimension: value})
            point_config = replace(config, selection=selection)
        except (ValidationError, TypeError) as exc:
            points.append(SweepPoint(value=value, error=str(exc)))
            continue
        run_id = None
        if out_dir is not None:
            run_id = run_fingerprint(point_config)
            cached = _load_indexed_report(out_dir, run_id)
            if cached is not None:
                points.append(SweepPoint(value=value, report=cached, reused=True))
                continue
        try:
            report = run_pipeline(point_config)
        except DemoselectError as exc:
            points.append(SweepPoint(value=value, error=str(exc)))
            continue
        if out_dir is not None:
            persist_report(report, out_dir, run_id)
        points.append(SweepPoint(value=value, report=report))
    return points


def ablate(
    config: RunConfig,
    methods: Sequence[str] = ("topk_l2d", "wo_sem", "wo_l2d", "topk", "random"),
    out_dir: str | None = None,
) -> dict[str, RunReport]:
    """Run several methods under one otherwise-fixed configuration."""
    if not methods:
        raise ValidationError("methods must not be empty")
    reports = {}
    for method in methods:
        check_choice(method, METHODS, "method")
        report = run_pipeline(replace(config, method=method))
        if out_dir is not None:
            persist_report(report, out_dir, run_fingerprint(replace(config, method=method)))
        reports[method] = report
    return reports


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    df: int


def paired_t_test(accuracies_a: Sequence[float], accuracies_b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test over per-seed accuracy differences.

    Degenerate inputs (mismatched lengths, fewer than two pairs, zero
    variance of the differences) are rejected rather than producing an
    infinite or undefined statistic.
    """
    a = check_finite_floats(accuracies_a, "accuracies_a")
    b = check_finite_floats(accuracies_b, "accuracies_b")
    if len(a) != len(b):
        raise ValidationError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValidationError("paired t-test needs at least 2 pairs")
    diffs = [x - y for x, y in zip(a, b)]
    if all(d == diffs[0] for d in diffs):
        raise ValidationError("zero variance of differences: degenerate data for a paired t-test")
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    t = mean / math.sqrt(var / n)
    df = n - 1
    p = float(2.0 * _scipy_stats.t.sf(abs(t), df))
    return TTestResult(t_statistic=t, p_value=p, df=df)
