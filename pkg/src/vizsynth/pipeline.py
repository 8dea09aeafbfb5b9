"""End-to-end synthesis: elements -> layer sketches -> per-layer program
search -> candidate compilation, dedup and ranking.

Layers are searched in parallel (each search owns its budgeted workers);
their (program, mapping) results are cross-combined into candidates, with
facet fields required to agree across layers of one candidate.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from itertools import product

from .compiler import dedup, make_candidate, rank_and_group
from .decompiler import decompile
from .errors import SchemaError
from .grammar import FACET_CHANNELS
from .synthesizer import SearchConfig, synthesize_layer
from .table import Table
from .transforms import complexity, serialize

# bounds on how many search results feed candidate assembly; results are
# complexity-sorted so the cut only ever drops the most convoluted programs
SINGLE_LAYER_POOL = 512
COMBO_POOL = 4096


@dataclass(frozen=True)
class SynthesisOutcome:
    candidates: tuple  # ranked Candidate list
    layer_results: tuple  # per-layer LayerResult
    stats: dict
    truncated: bool
    reason: "str | None"  # "NoCandidate" when the search came up empty


def _facet_fields(layer_spec):
    return {ch: fld for ch, fld in layer_spec.encodings if ch in FACET_CHANNELS}


class _CandidateStream:
    """Incremental single-layer candidate delivery in final rank order.

    Candidates sort by (complexity, ...) and program complexity equals
    sketch depth, so once every worker has exhausted all sketches up to
    depth d the ranking of complexity-<=d candidates can never change.
    Flushing exactly at those certification points makes the streamed
    sequence a prefix of the final ranked list: fast-worker results go out
    immediately and later discoveries only ever append.
    """

    def __init__(self, input_table, sketches, cfg, on_candidate):
        self.active = on_candidate is not None and len(sketches) == 1
        if not self.active:
            return
        self.input_table = input_table
        self.sketch = sketches[0]
        self.cfg = cfg
        self.on_candidate = on_candidate
        self.lock = threading.Lock()
        self.pairs = []
        # least certified depth across workers gates the flush
        self.certified = {i: -1 for i in range(len(cfg.worker_budgets))}
        self.flushed_depth = -1
        self.emitted_ids = set()

    def on_result(self, prog, mapping):
        if not self.active:
            return
        with self.lock:
            self.pairs.append((prog, mapping))

    def on_progress(self, worker, depth):
        if not self.active:
            return
        to_emit = []
        with self.lock:
            self.certified[worker] = max(self.certified[worker], depth)
            depth_ok = min(self.certified.values())
            if depth_ok <= self.flushed_depth:
                return
            self.flushed_depth = depth_ok
            if len(self.emitted_ids) >= self.cfg.max_candidates:
                return
            eligible = [pm for pm in self.pairs if len(pm[0].ops) <= depth_ok]
            eligible.sort(key=lambda pm: (complexity(pm[0]), serialize(pm[0]), pm[1]))
            eligible = eligible[:SINGLE_LAYER_POOL]
            cands = [
                make_candidate([self.sketch], [prog], [mapping], self.input_table)
                for prog, mapping in eligible
            ]
            for cand in rank_and_group(dedup(cands), self.cfg.max_candidates):
                if cand.id in self.emitted_ids:
                    continue
                if len(self.emitted_ids) >= self.cfg.max_candidates:
                    break
                self.emitted_ids.add(cand.id)
                to_emit.append(cand)
        for cand in to_emit:
            self.on_candidate(cand)


def synthesize(
    input_table: Table,
    elements,
    cfg: SearchConfig = SearchConfig(),
    on_candidate=None,
) -> SynthesisOutcome:
    """Run the whole pipeline.

    ``on_candidate(candidate)`` streams single-layer candidates as the
    search uncovers them (deduplicated so far, capped at max_candidates);
    the returned ranked list is always the authoritative order.
    """
    started = time.monotonic()
    sketches = decompile(elements)
    stream = _CandidateStream(input_table, sketches, cfg, on_candidate)

    results = [None] * len(sketches)
    errors = [None] * len(sketches)

    def run_layer(i):
        try:
            results[i] = synthesize_layer(
                input_table,
                sketches[i],
                cfg,
                on_result=stream.on_result,
                on_progress=stream.on_progress,
            )
        except Exception as exc:  # pragma: no cover - defensive
            errors[i] = exc

    threads = [
        threading.Thread(target=run_layer, args=(i,), daemon=True)
        for i in range(len(sketches))
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for exc in errors:
        if exc is not None:
            raise exc

    candidates = _assemble(sketches, results, input_table)
    deduped = dedup(candidates)
    ranked = rank_and_group(deduped, cfg.max_candidates)

    truncated = any(r.truncated for r in results)
    stats = {
        "layers": [r.stats for r in results],
        "sketches_explored": sum(r.stats["sketches_explored"] for r in results),
        "pruned_count": sum(r.stats["pruned_count"] for r in results),
        "candidates_before_dedup": len(candidates),
        "candidates": len(ranked),
        "truncated": truncated,
        "elapsed_ms": int((time.monotonic() - started) * 1000),
    }
    return SynthesisOutcome(
        candidates=tuple(ranked),
        layer_results=tuple(results),
        stats=stats,
        truncated=truncated,
        reason=None if ranked else "NoCandidate",
    )


def _assemble(sketches, results, input_table):
    """Cross-combine per-layer (program, mapping) pairs into candidates."""
    n_layers = len(sketches)
    if n_layers == 1:
        pool = results[0].results[:SINGLE_LAYER_POOL]
        return [
            make_candidate(sketches, [prog], [mapping], input_table)
            for prog, mapping in pool
        ]

    per_layer = max(2, int(COMBO_POOL ** (1.0 / n_layers)))
    pools = [r.results[:per_layer] for r in results]
    candidates = []
    for combo in product(*pools):
        programs = [prog for prog, _ in combo]
        mappings = [mapping for _, mapping in combo]
        try:
            cand = make_candidate(sketches, programs, mappings, input_table)
        except SchemaError:
            continue
        # facet channels must point at the same column in every layer
        facets = [_facet_fields(layer) for layer in cand.spec.layers]
        if any(f != facets[0] for f in facets[1:]):
            continue
        candidates.append(cand)
        if len(candidates) >= COMBO_POOL:
            break
    return candidates
