"""Shared test utilities: table builders, an independent brute-force search
oracle, random instance generators, and a structural Vega-Lite subset schema.

The oracle enumerates the full hole-filling domain with no pruning, no
search-order shortcuts, and its own argument enumeration code, so the
synthesizer's pruning and memoization can be checked against ground truth.
"""

from __future__ import annotations

import itertools
import json
from datetime import date, timedelta

from vizsynth.compiler import canonical_table_form
from vizsynth.decompiler import LayerSketch
from vizsynth.errors import EvalError
from vizsynth.grammar import Channel, LayerSpec, Mark
from vizsynth.table import ColumnType, Table, cell_sort_key, coerce_value, parse_cell
from vizsynth.transforms import (
    AGG_FUNCS,
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
    contains,
    eval_op,
    eval_program,
)

# ---------------------------------------------------------------------------
# table builders

TYPE_CODES = {
    "q": ColumnType.QUANTITATIVE,
    "n": ColumnType.NOMINAL,
    "t": ColumnType.TEMPORAL,
}


def table(col_specs, rows):
    """Build a table from ``"Name:q"`` column specs and Python-value rows.

    Strings are parsed according to the declared column type, so temporal
    columns accept ISO strings and quantitative columns accept numerals.
    """
    columns = []
    for item in col_specs:
        name, _, code = item.partition(":")
        columns.append((name, TYPE_CODES[code or "n"]))
    built = []
    for row in rows:
        cells = []
        for (name, ctype), value in zip(columns, row):
            if value is None:
                cells.append(None)
            elif isinstance(value, str):
                cells.append(parse_cell(value, ctype))
            else:
                cells.append(coerce_value(value))
        built.append(tuple(cells))
    return Table(tuple(columns), tuple(built))


def example(type_code, rows):
    """``example("qn", [[1, "a"]])`` gives a table with columns C1..Ck."""
    specs = [f"C{i + 1}:{code}" for i, code in enumerate(type_code)]
    return table(specs, rows)


_SKETCH_CHANNELS = (
    Channel.X,
    Channel.Y,
    Channel.COLOR,
    Channel.SIZE,
    Channel.COLUMN,
    Channel.ROW,
)


def make_sketch(example_table: Table, mark: Mark = Mark.POINT) -> LayerSketch:
    """Wrap a bare example table as a single-layer synthesis goal."""
    channels = _SKETCH_CHANNELS[: example_table.n_cols]
    spec = LayerSpec(mark, tuple(zip(channels, example_table.column_names)))
    return LayerSketch(mark=mark, channels=channels, spec=spec, example=example_table)


# ---------------------------------------------------------------------------
# brute-force oracle


def _positions_by_type(t: Table):
    by = {}
    for j, (_, ctype) in enumerate(t.columns):
        by.setdefault(ctype, []).append(j)
    return by


def _combos(positions, min_size=1):
    for size in range(min_size, len(positions) + 1):
        yield from itertools.combinations(positions, size)


def oracle_instantiations(name: str, t: Table):
    """Every argument filling for one operator, enumerated from the language
    definition without reusing the synthesizer's enumerator."""
    names = t.column_names
    if name == "pivot_longer":
        out = []
        for positions in _positions_by_type(t).values():
            out.extend(
                PivotLonger(tuple(names[j] for j in combo), "key", "value")
                for combo in _combos(positions, min_size=2)
            )
        return out
    if name == "pivot_wider":
        return [PivotWider(a, b) for a in names for b in names if a != b]
    if name == "select":
        return [
            Select(tuple(names[j] for j in combo))
            for combo in _combos(range(t.n_cols))
        ]
    if name == "filter":
        out = []
        for col, ctype in t.columns:
            ops = ("==", "!=") if ctype is ColumnType.NOMINAL else COMPARE_OPS
            values = sorted(
                {c for c in t.column_cells(col) if c is not None},
                key=cell_sort_key,
            )[:64]
            out.extend(Filter(col, op, value) for op in ops for value in values)
        return out
    if name == "group_summarise":
        quant = set(_positions_by_type(t).get(ColumnType.QUANTITATIVE, ()))
        out = []
        for combo in _combos(range(t.n_cols)):
            if len(combo) == t.n_cols:
                continue
            for k in range(t.n_cols):
                if k in combo:
                    continue
                for agg in AGG_FUNCS:
                    if agg == "count" or k in quant:
                        out.append(
                            GroupSummarise(
                                tuple(names[j] for j in combo),
                                agg,
                                names[k],
                                f"{names[k]}_{agg}",
                            )
                        )
        return out
    if name == "cumsum":
        quant = _positions_by_type(t).get(ColumnType.QUANTITATIVE, ())
        out = []
        for combo in itertools.chain([()], _combos(range(t.n_cols))):
            out.extend(
                CumSum(tuple(names[j] for j in combo), names[k])
                for k in quant
                if k not in combo
            )
        return out
    if name == "mutate":
        quant = _positions_by_type(t).get(ColumnType.QUANTITATIVE, ())
        out = []
        for arith, label in (("+", "Sum"), ("-", "Diff"), ("*", "Product"), ("/", "Ratio")):
            for i in quant:
                for j in quant:
                    if i == j or (arith in "+*" and i > j):
                        continue
                    out.append(Mutate(label, names[i], arith, names[j]))
        return out
    if name == "separate":
        out = []
        for j in _positions_by_type(t).get(ColumnType.NOMINAL, ()):
            col = names[j]
            cells = [c for c in t.column_cells(col) if c is not None]
            out.extend(
                Separate(col, delim, f"{col}_1", f"{col}_2")
                for delim in SEPARATOR_CHARS
                if any(delim in c for c in cells)
            )
        return out
    if name == "unite":
        return [Unite(a, b, "_", f"{a}_{b}") for a in names for b in names if a != b]
    raise ValueError(f"unknown operator {name!r}")


def oracle_explore(input_table: Table, ex: Table, max_depth: int,
                   rel_tol: float = 1e-6, on_node=None):
    """Exhaustively run every operator sequence up to ``max_depth``.

    Returns ``{op-name sequence: [(ops tuple, mapping), ...]}`` covering all
    fully-instantiated programs whose output contains ``ex``.  ``on_node``
    is called once per distinct ``(table, depth_left)`` subproblem with the
    same kind of dictionary, which lets callers audit interior search states.
    """
    memo = {}

    def walk(t, depth_left):
        key = (t, depth_left)
        hit = memo.get(key)
        if hit is not None:
            return hit
        found = {(): [((), m) for m in contains(t, ex, rel_tol)]}
        if depth_left:
            for name in OP_NAMES:
                for op in oracle_instantiations(name, t):
                    try:
                        out = eval_op(op, t)
                    except EvalError:
                        continue
                    for seq, pairs in walk(out, depth_left - 1).items():
                        found.setdefault((name,) + seq, []).extend(
                            ((op,) + ops, mapping) for ops, mapping in pairs
                        )
        memo[key] = found
        if on_node is not None:
            on_node(t, depth_left, found)
        return found

    return walk(input_table, max_depth)


def oracle_pairs(found):
    """Flatten an ``oracle_explore`` result into (program, mapping) pairs."""
    return [
        (TransformProgram(ops), mapping)
        for pairs in found.values()
        for ops, mapping in pairs
    ]


def satisfying_classes(pairs, input_table: Table, rel_tol: float = 1e-6):
    """Collapse (program, mapping) pairs into their dedup identity: the
    canonicalized output table plus the column mapping."""
    classes = set()
    for prog, mapping in pairs:
        rendered = eval_program(prog, input_table)
        form = json.dumps(canonical_table_form(rendered), sort_keys=True)
        classes.add((form, tuple(mapping)))
    return classes


# ---------------------------------------------------------------------------
# random instances

_NUM_POOL = (1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 0.5, -2.0)
_TEXT_POOL = ("red", "blue", "green", "a-b", "c_d", "x/y")
_DATE_POOL = (
    date(2020, 1, 5),
    date(2020, 2, 10),
    date(2021, 3, 15),
    date(2021, 7, 1),
)
_COL_NAMES = ("A", "B", "C", "D", "E", "F", "G", "H")


def random_table(rng, max_cols=4, max_rows=6, min_cols=2, min_rows=2,
                 missing_rate=0.08) -> Table:
    """A small table whose columns repeat values, so reshaping and grouping
    operators have something to work with."""
    n_cols = rng.randint(min_cols, max_cols)
    n_rows = rng.randint(min_rows, max_rows)
    used = rng.sample(_COL_NAMES, n_cols)
    columns = []
    per_column = []
    for j in range(n_cols):
        code = rng.choice("qqnt")
        if code == "q":
            ctype = ColumnType.QUANTITATIVE
            domain = rng.sample(_NUM_POOL, rng.randint(2, 4))
        elif code == "n":
            ctype = ColumnType.NOMINAL
            domain = rng.sample(_TEXT_POOL, rng.randint(2, 3))
        else:
            ctype = ColumnType.TEMPORAL
            domain = rng.sample(_DATE_POOL, rng.randint(2, 3))
        columns.append((used[j], ctype))
        per_column.append(
            [None if rng.random() < missing_rate else rng.choice(domain)
             for _ in range(n_rows)]
        )
    rows = tuple(
        tuple(per_column[j][i] for j in range(n_cols)) for i in range(n_rows)
    )
    return Table(tuple(columns), rows)


def _fallback(ctype):
    if ctype is ColumnType.QUANTITATIVE:
        return 99.0
    if ctype is ColumnType.TEMPORAL:
        return date(1999, 1, 1)
    return "zz"


def _corrupt(rng, cell, ctype):
    if ctype is ColumnType.QUANTITATIVE:
        return (cell or 0.0) + rng.choice((0.25, 111.0))
    if ctype is ColumnType.TEMPORAL:
        return (cell or date(2000, 1, 1)) + timedelta(days=1234)
    return f"{cell}!"


def derived_example(rng, input_table: Table, max_depth=2, max_cols=4,
                    max_rows=2, perturb=0.35) -> Table:
    """An example table biased toward being reachable: lightly transform the
    input, sample a sub-table, then sometimes corrupt one cell so both the
    satisfiable and unsatisfiable regimes get exercised."""
    t = input_table
    for _ in range(rng.randint(0, max_depth)):
        name = rng.choice(OP_NAMES)
        options = oracle_instantiations(name, t)
        if not options:
            continue
        try:
            candidate = eval_op(rng.choice(options), t)
        except EvalError:
            continue
        if candidate.n_rows and candidate.n_cols:
            t = candidate
    n_cols = rng.randint(1, min(max_cols, t.n_cols))
    col_idx = sorted(rng.sample(range(t.n_cols), n_cols))
    n_rows = rng.randint(1, min(max_rows, t.n_rows))
    row_idx = rng.sample(range(t.n_rows), n_rows)
    columns = tuple(
        (f"C{i + 1}", t.columns[j][1]) for i, j in enumerate(col_idx)
    )
    rows = [[t.rows[r][j] for j in col_idx] for r in row_idx]
    for row in rows:
        for i, cell in enumerate(row):
            if cell is None:
                row[i] = _fallback(columns[i][1])
    if rng.random() < perturb:
        r = rng.randrange(len(rows))
        i = rng.randrange(n_cols)
        rows[r][i] = _corrupt(rng, rows[r][i], columns[i][1])
    return Table(columns, tuple(tuple(row) for row in rows))


# ---------------------------------------------------------------------------
# structural Vega-Lite subset schema

_SCHEMA_URL = "https://vega.github.io/schema/vega-lite/v5.json"

_FIELD_TYPE_DEF = {
    "type": "object",
    "required": ["field", "type"],
    "additionalProperties": False,
    "properties": {
        "field": {"type": "string"},
        "type": {"enum": ["quantitative", "nominal", "temporal"]},
    },
}

_FIELD_ONLY_DEF = {
    "type": "object",
    "required": ["field"],
    "additionalProperties": False,
    "properties": {"field": {"type": "string"}},
}

_ENCODING_DEF = {
    "type": "object",
    "required": ["x", "y"],
    "additionalProperties": False,
    "properties": {
        "x": _FIELD_TYPE_DEF,
        "y": _FIELD_TYPE_DEF,
        "x2": _FIELD_ONLY_DEF,
        "y2": _FIELD_ONLY_DEF,
        "color": _FIELD_TYPE_DEF,
        "size": _FIELD_TYPE_DEF,
        "shape": _FIELD_TYPE_DEF,
        "column": _FIELD_TYPE_DEF,
        "row": _FIELD_TYPE_DEF,
    },
}

_DATA_DEF = {
    "type": "object",
    "required": ["values"],
    "additionalProperties": False,
    "properties": {
        "values": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": {"type": ["number", "string", "null"]},
            },
        }
    },
}

_MARK_DEF = {"enum": ["bar", "line", "point", "rect", "area"]}

_UNIT_VIEW_DEF = {
    "type": "object",
    "required": ["data", "encoding", "mark"],
    "additionalProperties": False,
    "properties": {
        "data": _DATA_DEF,
        "encoding": _ENCODING_DEF,
        "mark": _MARK_DEF,
    },
}

VEGA_LITE_SUBSET_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "oneOf": [
        {
            "type": "object",
            "required": ["$schema", "data", "encoding", "mark"],
            "additionalProperties": False,
            "properties": {
                "$schema": {"const": _SCHEMA_URL},
                "data": _DATA_DEF,
                "encoding": _ENCODING_DEF,
                "mark": _MARK_DEF,
            },
        },
        {
            "type": "object",
            "required": ["$schema", "layer"],
            "additionalProperties": False,
            "properties": {
                "$schema": {"const": _SCHEMA_URL},
                "layer": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 3,
                    "items": _UNIT_VIEW_DEF,
                },
            },
        },
    ],
}


def validate_vegalite_subset(doc: dict):
    import jsonschema

    jsonschema.validate(doc, VEGA_LITE_SUBSET_SCHEMA)
