"""Sketch-based enumerative search for transform programs.

A sketch is an operator-name sequence with argument holes. The search walks
sketches in a fixed order, fills holes left to right with arguments drawn
from the current table schema (and harvested constants), prunes hole-filling
branches with a sound abstract feasibility check, and reports every program
whose output contains the example table under some injective column mapping.

Two budgeted workers split the sketch stream round-robin so cheap programs
surface quickly while a longer-budget worker keeps digging; with budgets of
None the search runs to exhaustion and is fully deterministic.
"""

from __future__ import annotations

import math
import queue
import re
import threading
import time
from dataclasses import dataclass, field
from itertools import combinations, product

from .decompiler import LayerSketch
from .errors import EvalError
from .table import ColumnType, Table, cell_sort_key, format_cell
from .transforms import (
    AGG_FUNCS,
    ARITH_OPS,
    COMPARE_OPS,
    OP_NAMES,
    SEPARATOR_CHARS,
    CumSum,
    Filter,
    GroupSummarise,
    Mutate,
    PivotLonger,
    PivotWider,
    Select,
    Separate,
    TransformProgram,
    Unite,
    complexity,
    contains,
    eval_op,
    eval_program,
    serialize,
)

LITERAL_CAP = 64  # distinct constants kept per type / per column


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 3
    max_candidates: int = 20
    worker_budgets: tuple = (5.0, 20.0)  # seconds; None = unbounded
    rel_tol: float = 1e-6
    memoize: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")
        if not self.worker_budgets:
            raise ValueError("need at least one worker budget")
        finite = [b for b in self.worker_budgets if b is not None]
        if any(b <= 0 for b in finite):
            raise ValueError("budgets must be positive")
        if finite != sorted(finite):
            raise ValueError("budgets must be ascending")


@dataclass(frozen=True)
class ConstantPool:
    """Literals visible to argument instantiation: every example cell plus
    distinct input cells, capped per type; plus the input column names."""

    numbers: tuple
    texts: tuple
    dates: tuple
    column_names: tuple


def _harvest(example_cells, input_cells):
    out = list(dict.fromkeys(example_cells))
    for cell in sorted(set(input_cells) - set(out), key=cell_sort_key):
        if len(out) >= LITERAL_CAP:
            break
        out.append(cell)
    return tuple(out)


def build_pool(input_table: Table, example: Table) -> ConstantPool:
    def split(table):
        nums, texts, dates = [], [], []
        for j, (_, ctype) in enumerate(table.columns):
            for cell in table.column_cells(table.columns[j][0]):
                if cell is None:
                    continue
                if ctype is ColumnType.QUANTITATIVE:
                    nums.append(cell)
                elif ctype is ColumnType.TEMPORAL:
                    dates.append(cell)
                else:
                    texts.append(cell)
        return nums, texts, dates

    ex_n, ex_t, ex_d = split(example)
    in_n, in_t, in_d = split(input_table)
    return ConstantPool(
        numbers=_harvest(ex_n, in_n),
        texts=_harvest(ex_t, in_t),
        dates=_harvest(ex_d, in_d),
        column_names=input_table.column_names,
    )


# ---------------------------------------------------------------------------
# sketch enumeration


def enumerate_sketches(max_depth: int):
    """All operator-name sequences of length 0..max_depth, shortest first,
    ties broken by the fixed operator order."""
    yield ()
    for depth in range(1, max_depth + 1):
        yield from product(OP_NAMES, repeat=depth)


# ---------------------------------------------------------------------------
# argument instantiation (the language's hole-filling domain)

_MUTATE_NAME = {"+": "Sum", "-": "Diff", "*": "Product", "/": "Ratio"}


def _typed_positions(table: Table, ctype: ColumnType):
    return [j for j, (_, t) in enumerate(table.columns) if t is ctype]


def _subsets(positions, min_size=1):
    out = []
    for k in range(min_size, len(positions) + 1):
        out.extend(combinations(positions, k))
    return out


def instantiations(name: str, table: Table, pool: ConstantPool):
    """All argument fillings for one operator hole against a schema, in a
    deterministic order (positions left to right, literals sorted)."""
    cols = table.column_names
    if name == "pivot_longer":
        subsets = []
        for ctype in ColumnType:
            positions = _typed_positions(table, ctype)
            subsets.extend(_subsets(positions, min_size=2))
        subsets.sort(key=lambda s: (len(s), s))
        return [
            PivotLonger(tuple(cols[j] for j in s), "key", "value") for s in subsets
        ]
    if name == "pivot_wider":
        return [
            PivotWider(cols[i], cols[j])
            for i in range(len(cols))
            for j in range(len(cols))
            if i != j
        ]
    if name == "select":
        return [
            Select(tuple(cols[j] for j in s))
            for s in sorted(_subsets(range(len(cols))), key=lambda s: (len(s), s))
        ]
    if name == "filter":
        out = []
        for j, (col, ctype) in enumerate(table.columns):
            ops = ("==", "!=") if ctype is ColumnType.NOMINAL else COMPARE_OPS
            values = sorted(
                {c for c in table.column_cells(col) if c is not None},
                key=cell_sort_key,
            )[:LITERAL_CAP]
            out.extend(Filter(col, op, v) for op in ops for v in values)
        return out
    if name == "group_summarise":
        q_positions = set(_typed_positions(table, ColumnType.QUANTITATIVE))
        out = []
        for s in sorted(_subsets(range(len(cols))), key=lambda s: (len(s), s)):
            if len(s) == len(cols):
                continue
            for k in range(len(cols)):
                if k in s:
                    continue
                for agg in AGG_FUNCS:
                    if agg != "count" and k not in q_positions:
                        continue
                    out.append(
                        GroupSummarise(
                            tuple(cols[j] for j in s), agg, cols[k],
                            f"{cols[k]}_{agg}",
                        )
                    )
        return out
    if name == "cumsum":
        q_positions = _typed_positions(table, ColumnType.QUANTITATIVE)
        groups = [()] + sorted(
            _subsets(range(len(cols))), key=lambda s: (len(s), s)
        )
        return [
            CumSum(tuple(cols[j] for j in s), cols[k])
            for s in groups
            for k in q_positions
            if k not in s
        ]
    if name == "mutate":
        qs = _typed_positions(table, ColumnType.QUANTITATIVE)
        out = []
        for arith in ARITH_OPS:
            if arith in ("+", "*"):
                pairs = [(i, j) for i in qs for j in qs if i < j]
            else:
                pairs = [(i, j) for i in qs for j in qs if i != j]
            out.extend(
                Mutate(_MUTATE_NAME[arith], cols[i], arith, cols[j])
                for i, j in pairs
            )
        return out
    if name == "separate":
        out = []
        for j in _typed_positions(table, ColumnType.NOMINAL):
            col = cols[j]
            cells = [c for c in table.column_cells(col) if c is not None]
            for delim in SEPARATOR_CHARS:
                if any(delim in c for c in cells):
                    out.append(Separate(col, delim, f"{col}_1", f"{col}_2"))
        return out
    if name == "unite":
        return [
            Unite(cols[i], cols[j], "_", f"{cols[i]}_{cols[j]}")
            for i in range(len(cols))
            for j in range(len(cols))
            if i != j
        ]
    raise ValueError(f"unknown operator name {name!r}")


# ---------------------------------------------------------------------------
# abstract feasibility

_MIN_COLS = {
    "pivot_longer": 2,
    "pivot_wider": 2,
    "group_summarise": 2,
    "unite": 2,
}
_NUMERIC_CREATORS = frozenset({"mutate", "group_summarise", "cumsum", "separate"})
_STRING_CREATORS = frozenset({"separate", "unite"})
_MUTATE_NAMES = frozenset(_MUTATE_NAME.values())
_AGG_NAME_RE = re.compile(r".+_(sum|mean|count|min|max)$")
_TRAILING_INDEX_RE = re.compile(r"(.+)_\d+$")
_CAP = 10**6


def _column_interval_ok(n_cols, n_rows, remaining, need_cols):
    """Compose per-operator column-count intervals left to right; reject when
    no achievable count can host the example's columns."""
    lo = hi = n_cols
    rows = max(1, n_rows)
    for name in remaining:
        lo = max(lo, _MIN_COLS.get(name, 1))
        if lo > hi:
            return False
        if name == "pivot_longer":
            lo, hi, rows = 2, hi, min(rows * hi, _CAP)
        elif name == "pivot_wider":
            lo, hi = lo - 1, min(hi - 2 + rows, _CAP)
        elif name == "select":
            lo = 1
        elif name == "group_summarise":
            lo = 2
        elif name in ("mutate", "separate"):
            lo, hi = lo + 1, min(hi + 1, _CAP)
        elif name == "unite":
            lo, hi = lo - 1, hi - 1
        # filter and cumsum keep the column count
    return hi >= need_cols


def _values_ok(table, remaining, example, rel_tol):
    """Check every example cell is reachable: present already, or producible
    by some remaining operator (over-approximated, never under)."""
    string_pending = any(n in _STRING_CREATORS for n in remaining)
    numeric_pending = any(n in _NUMERIC_CREATORS for n in remaining)
    has_longer = "pivot_longer" in remaining
    longer_twice = remaining.count("pivot_longer") >= 2
    has_mutate = "mutate" in remaining
    has_summarise = "group_summarise" in remaining

    texts = None
    names = None
    numbers = None
    for i, (_, ctype) in enumerate(example.columns):
        for row in example.rows:
            cell = row[i]
            if ctype is ColumnType.QUANTITATIVE:
                if numeric_pending:
                    continue
                if numbers is None:
                    numbers = [
                        c
                        for j, (_, t) in enumerate(table.columns)
                        if t is ColumnType.QUANTITATIVE
                        for c in (r[j] for r in table.rows)
                        if c is not None
                    ]
                if not any(
                    abs(x - cell) <= rel_tol * max(1.0, abs(x), abs(cell))
                    for x in numbers
                ):
                    return False
                continue
            if string_pending:
                continue
            if texts is None:
                texts = {
                    format_cell(c).strip()
                    for r in table.rows
                    for c in r
                    if c is not None
                }
                names = {n.strip() for n in table.column_names}
            text = format_cell(cell).strip()
            forms = {text}
            m = _TRAILING_INDEX_RE.match(text)
            if m:
                forms.add(m.group(1))
            if forms & texts:
                continue
            if has_longer:
                if forms & names:
                    continue
                if has_mutate and forms & _MUTATE_NAMES:
                    continue
                if has_summarise and any(_AGG_NAME_RE.match(f) for f in forms):
                    continue
                if longer_twice and forms & {"key", "value"}:
                    continue
            return False
    return True


def feasible(table: Table, remaining, example: Table, rel_tol: float = 1e-6) -> bool:
    """Sound over-approximation: False means no completion of ``remaining``
    applied to ``table`` can contain ``example``."""
    remaining = tuple(remaining)
    if not _column_interval_ok(table.n_cols, table.n_rows, remaining, example.n_cols):
        return False
    return _values_ok(table, remaining, example, rel_tol)


# ---------------------------------------------------------------------------
# search proper


class _BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class LayerResult:
    """Search output for one layer: (program, mapping) pairs sorted by
    complexity then canonical text then mapping."""

    results: tuple  # ((TransformProgram, mapping tuple), ...)
    truncated: bool
    stats: dict = field(compare=False)


_EVAL_FAILED = object()


def _run_worker(worker_id, sketches, input_table, example, cfg, deadline, out_q):
    started = time.monotonic()
    # depth of the sketch currently being searched; everything shallower in
    # this worker's slice is fully explored ("certified")
    current_depth = 0
    memoize = cfg.memoize
    rel_tol = cfg.rel_tol
    pool = build_pool(input_table, example)
    eval_memo = {}
    node_memo = {}
    contains_memo = {}
    stats = {
        "worker": worker_id,
        "sketches": len(sketches),
        "sketches_pruned": 0,
        "evals": 0,
        "eval_errors": 0,
        "contains_checks": 0,
        "programs_found": 0,
    }
    truncated = False

    def checked_eval(table, op):
        key = (table, op)
        if memoize:
            hit = eval_memo.get(key)
            if hit is not None:
                return hit
        stats["evals"] += 1
        try:
            result = eval_op(op, table)
        except EvalError:
            stats["eval_errors"] += 1
            result = _EVAL_FAILED
        if memoize:
            eval_memo[key] = result
        return result

    def checked_contains(table):
        if memoize:
            hit = contains_memo.get(table)
            if hit is not None:
                return hit
        stats["contains_checks"] += 1
        result = tuple(contains(table, example, rel_tol))
        if memoize:
            contains_memo[table] = result
        return result

    def search_node(table, remaining):
        """All (suffix ops, mappings) completing ``remaining`` on ``table``."""
        if time.monotonic() > deadline:
            raise _BudgetExceeded
        key = (table, remaining)
        if memoize:
            hit = node_memo.get(key)
            if hit is not None:
                return hit
        if not remaining:
            # cheap necessary-condition screen before the full matching
            if feasible(table, remaining, example, rel_tol):
                mappings = checked_contains(table)
            else:
                mappings = ()
            found = (((), mappings),) if mappings else ()
        elif not feasible(table, remaining, example, rel_tol):
            found = ()
        else:
            head, rest = remaining[0], remaining[1:]
            is_filter = head == "filter"
            out = []
            for op in instantiations(head, table, pool):
                result = checked_eval(table, op)
                if result is _EVAL_FAILED:
                    continue
                # filters that drop nothing or everything lead nowhere new
                if is_filter and result.n_rows in (0, table.n_rows):
                    continue
                for suffix, mappings in search_node(result, rest):
                    out.append(((op,) + suffix, mappings))
            found = tuple(out)
        if memoize:
            node_memo[key] = found
        return found

    try:
        for sketch in sketches:
            if len(sketch) > current_depth:
                # all shallower sketches in the slice are done; results for
                # them are already queued ahead of this marker
                out_q.put(("progress", worker_id, len(sketch) - 1))
                current_depth = len(sketch)
            if sketch and not feasible(input_table, sketch, example, rel_tol):
                stats["sketches_pruned"] += 1
                continue
            for ops, mappings in search_node(input_table, sketch):
                prog = TransformProgram(ops)
                stats["programs_found"] += len(mappings)
                out_q.put(("result", worker_id, prog, mappings))
        out_q.put(("progress", worker_id, cfg.max_depth))
    except _BudgetExceeded:
        truncated = True
        out_q.put(("progress", worker_id, current_depth - 1))
    except Exception as exc:  # pragma: no cover - defensive
        out_q.put(("error", worker_id, exc))
        return
    stats["truncated"] = truncated
    stats["elapsed_ms"] = int((time.monotonic() - started) * 1000)
    out_q.put(("done", worker_id, truncated, stats))


def synthesize_layer(
    input_table: Table,
    layer: LayerSketch,
    cfg: SearchConfig = SearchConfig(),
    on_result=None,
    on_progress=None,
) -> LayerResult:
    """Search for all programs mapping ``input_table`` onto the layer's
    example, within the configured depth and worker budgets.

    ``on_result(program, mapping)`` is invoked as pairs arrive (order is
    worker-dependent under finite budgets); the returned list is always
    deterministically sorted. ``on_progress(worker, depth)`` reports that a
    worker has fully explored every sketch of ``depth`` or less in its
    slice; all of that worker's results at those depths are guaranteed to
    have been delivered to ``on_result`` first.
    """
    example = layer.example
    started = time.monotonic()
    sketches = list(enumerate_sketches(cfg.max_depth))
    n_workers = len(cfg.worker_budgets)
    out_q = queue.Queue()
    threads = []
    for i, budget in enumerate(cfg.worker_budgets):
        deadline = math.inf if budget is None else started + budget
        threads.append(
            threading.Thread(
                target=_run_worker,
                args=(i, sketches[i::n_workers], input_table, example, cfg,
                      deadline, out_q),
                daemon=True,
            )
        )
    for t in threads:
        t.start()

    pairs = []
    truncated = False
    worker_stats = [None] * n_workers
    pending = len(threads)
    error = None
    while pending:
        msg = out_q.get()
        if msg[0] == "result":
            _, _, prog, mappings = msg
            for mapping in mappings:
                pairs.append((prog, mapping))
                if on_result is not None:
                    on_result(prog, mapping)
        elif msg[0] == "progress":
            _, worker_id, depth = msg
            if on_progress is not None:
                on_progress(worker_id, depth)
        elif msg[0] == "done":
            _, worker_id, worker_truncated, stats = msg
            truncated = truncated or worker_truncated
            worker_stats[worker_id] = stats
            pending -= 1
        else:
            _, _, error = msg
            pending -= 1
    for t in threads:
        t.join()
    if error is not None:
        raise error

    # re-verify every result with a fresh evaluation before reporting
    verified = []
    fresh = {}
    for prog, mapping in pairs:
        if prog not in fresh:
            output = eval_program(prog, input_table)
            fresh[prog] = set(contains(output, example, cfg.rel_tol))
        if mapping in fresh[prog]:
            verified.append((prog, mapping))
    verified.sort(key=lambda pm: (complexity(pm[0]), serialize(pm[0]), pm[1]))

    stats = {
        "workers": [s for s in worker_stats if s is not None],
        "sketches_explored": sum(s["sketches"] for s in worker_stats if s),
        "pruned_count": sum(s["sketches_pruned"] for s in worker_stats if s),
        "elapsed_ms": int((time.monotonic() - started) * 1000),
        "results": len(verified),
        "truncated": truncated,
    }
    return LayerResult(tuple(verified), truncated, stats)
