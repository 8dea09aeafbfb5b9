"""The table transformation language: AST, evaluation, serialization,
complexity, and the containment check between tables.

Programs are sequences of operators applied left to right. The operator set
mirrors the common tidy-data verbs: the two pivots, select, filter, a fused
group+summarise, cumulative sum, rowwise arithmetic (mutate), and string
split/concat (separate/unite).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date

from .errors import (
    DivisionByZero,
    EmptyGroupAggregate,
    EvalError,
    PivotCollision,
    ProgramParseError,
    SchemaError,
    TypeMismatch,
)
from .table import (
    ColumnType,
    Table,
    cell_equal,
    format_cell,
    infer_column_type,
    parse_cell,
    parse_date,
    parse_number,
    resolve_name,
)

COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/")
AGG_FUNCS = ("sum", "mean", "count", "min", "max")
SEPARATOR_CHARS = ("-", "_", "/", " ", ":")


@dataclass(frozen=True)
class PivotLonger:
    cols: tuple  # >= 2 column names sharing one type
    names_to: str
    values_to: str


@dataclass(frozen=True)
class PivotWider:
    names_from: str
    values_from: str


@dataclass(frozen=True)
class Select:
    cols: tuple  # nonempty; output takes this order


@dataclass(frozen=True)
class Filter:
    col: str
    op: str  # one of COMPARE_OPS
    lit: "float | str | date"


@dataclass(frozen=True)
class GroupSummarise:
    group_cols: tuple  # nonempty
    agg: str  # one of AGG_FUNCS
    target: str
    out_name: str


@dataclass(frozen=True)
class CumSum:
    group_cols: tuple  # possibly empty
    target: str


@dataclass(frozen=True)
class Mutate:
    out_name: str
    lhs: str
    op: str  # one of ARITH_OPS
    rhs: "str | float"  # column name or numeric literal
    rhs_is_col: bool = True


@dataclass(frozen=True)
class Separate:
    col: str
    delim: str
    out1: str
    out2: str


@dataclass(frozen=True)
class Unite:
    col1: str
    col2: str
    delim: str
    out_name: str


TransformOp = (
    PivotLonger,
    PivotWider,
    Select,
    Filter,
    GroupSummarise,
    CumSum,
    Mutate,
    Separate,
    Unite,
)

# fixed lexicographic operator order used by sketch enumeration
OP_NAMES = (
    "pivot_longer",
    "pivot_wider",
    "select",
    "filter",
    "group_summarise",
    "cumsum",
    "mutate",
    "separate",
    "unite",
)

_OP_CLASS = {
    "pivot_longer": PivotLonger,
    "pivot_wider": PivotWider,
    "select": Select,
    "filter": Filter,
    "group_summarise": GroupSummarise,
    "cumsum": CumSum,
    "mutate": Mutate,
    "separate": Separate,
    "unite": Unite,
}
_OP_NAME = {cls: name for name, cls in _OP_CLASS.items()}


def op_name(op) -> str:
    return _OP_NAME[type(op)]


@dataclass(frozen=True)
class TransformProgram:
    """An ordered operator list; the empty program is the identity."""

    ops: tuple = ()

    def __len__(self):
        return len(self.ops)


def complexity(prog: TransformProgram) -> int:
    """Number of operator expressions in the program."""
    return len(prog.ops)


# ---------------------------------------------------------------------------
# evaluation


def eval_program(prog: TransformProgram, table: Table) -> Table:
    """Apply every operator left to right. Raises EvalError subclasses with
    ``op_index`` set to the failing operator's position."""
    current = table
    for i, op in enumerate(prog.ops):
        try:
            current = eval_op(op, current)
        except EvalError as exc:
            if exc.op_index is None:
                exc.op_index = i
            raise
    return current


def _require_columns(table: Table, names, op_label: str):
    for name in names:
        if name not in table.column_names:
            raise SchemaError(f"{op_label}: no column {name!r} in {table.column_names}")


def _require_quantitative(table: Table, name: str, op_label: str):
    if table.column_type(name) is not ColumnType.QUANTITATIVE:
        raise TypeMismatch(f"{op_label}: column {name!r} is not quantitative")


def eval_op(op, table: Table) -> Table:
    if isinstance(op, PivotLonger):
        return _eval_pivot_longer(op, table)
    if isinstance(op, PivotWider):
        return _eval_pivot_wider(op, table)
    if isinstance(op, Select):
        return _eval_select(op, table)
    if isinstance(op, Filter):
        return _eval_filter(op, table)
    if isinstance(op, GroupSummarise):
        return _eval_group_summarise(op, table)
    if isinstance(op, CumSum):
        return _eval_cumsum(op, table)
    if isinstance(op, Mutate):
        return _eval_mutate(op, table)
    if isinstance(op, Separate):
        return _eval_separate(op, table)
    if isinstance(op, Unite):
        return _eval_unite(op, table)
    raise TypeError(f"not a transform op: {op!r}")


def _eval_pivot_longer(op: PivotLonger, table: Table) -> Table:
    _require_columns(table, op.cols, "pivot_longer")
    if len(op.cols) < 2:
        raise SchemaError("pivot_longer needs at least two columns to collect")
    if len(set(op.cols)) != len(op.cols):
        raise SchemaError("pivot_longer columns must be distinct")
    value_types = {table.column_type(c) for c in op.cols}
    if len(value_types) != 1:
        raise TypeMismatch("pivot_longer columns must share one type")
    value_type = value_types.pop()
    id_cols = [(n, t) for n, t in table.columns if n not in op.cols]
    id_idx = [table.column_index(n) for n, _ in id_cols]
    col_idx = [table.column_index(c) for c in op.cols]
    taken = {n for n, _ in id_cols}
    names_to = resolve_name(op.names_to, taken)
    taken.add(names_to)
    values_to = resolve_name(op.values_to, taken)
    columns = tuple(id_cols) + (
        (names_to, ColumnType.NOMINAL),
        (values_to, value_type),
    )
    rows = []
    for row in table.rows:
        id_cells = tuple(row[i] for i in id_idx)
        for name, idx in zip(op.cols, col_idx):
            rows.append(id_cells + (name, row[idx]))
    return Table(columns, tuple(rows))


def _eval_pivot_wider(op: PivotWider, table: Table) -> Table:
    _require_columns(table, [op.names_from, op.values_from], "pivot_wider")
    if op.names_from == op.values_from:
        raise SchemaError("pivot_wider names_from and values_from must differ")
    name_idx = table.column_index(op.names_from)
    value_idx = table.column_index(op.values_from)
    value_type = table.columns[value_idx][1]
    key_cols = [
        (n, t) for n, t in table.columns if n not in (op.names_from, op.values_from)
    ]
    key_idx = [table.column_index(n) for n, _ in key_cols]

    new_names = []  # first-appearance order of names_from values
    seen_names = {}
    for row in table.rows:
        cell = row[name_idx]
        if cell is None:
            raise TypeMismatch("pivot_wider cannot use a missing value as a name")
        text = format_cell(cell)
        if text not in seen_names:
            seen_names[text] = True
            new_names.append(text)

    taken = {n for n, _ in key_cols}
    resolved = []
    for text in new_names:
        name = resolve_name(text, taken)
        taken.add(name)
        resolved.append(name)

    groups = {}  # key tuple -> {name text -> cell}
    order = []
    for row in table.rows:
        key = tuple(row[i] for i in key_idx)
        text = format_cell(row[name_idx])
        if key not in groups:
            groups[key] = {}
            order.append(key)
        if text in groups[key]:
            raise PivotCollision(
                f"pivot_wider: duplicate entry for key {key!r}, name {text!r}"
            )
        groups[key][text] = row[value_idx]

    columns = tuple(key_cols) + tuple((n, value_type) for n in resolved)
    rows = tuple(
        key + tuple(groups[key].get(text) for text in new_names) for key in order
    )
    return Table(columns, rows)


def _eval_select(op: Select, table: Table) -> Table:
    if not op.cols:
        raise SchemaError("select needs at least one column")
    if len(set(op.cols)) != len(op.cols):
        raise SchemaError("select columns must be distinct")
    _require_columns(table, op.cols, "select")
    idx = [table.column_index(c) for c in op.cols]
    columns = tuple(table.columns[i] for i in idx)
    rows = tuple(tuple(row[i] for i in idx) for row in table.rows)
    return Table(columns, rows)


def _filter_predicate(op: Filter, ctype: ColumnType):
    lit = op.lit
    if ctype is ColumnType.QUANTITATIVE:
        if isinstance(lit, str):
            lit = parse_number(lit)
        if not isinstance(lit, float):
            raise TypeMismatch(f"filter: literal {op.lit!r} is not a number")
    elif ctype is ColumnType.TEMPORAL:
        if isinstance(lit, str):
            lit = parse_date(lit)
        if not isinstance(lit, date):
            raise TypeMismatch(f"filter: literal {op.lit!r} is not a date")
    else:
        if op.op not in ("==", "!="):
            raise TypeMismatch("filter: nominal columns support only == and !=")
        lit = format_cell(lit).strip()

    def pred(cell):
        if cell is None:
            return False  # missing never satisfies any predicate
        value = format_cell(cell).strip() if ctype is ColumnType.NOMINAL else cell
        if op.op == "==":
            return value == lit
        if op.op == "!=":
            return value != lit
        if op.op == "<":
            return value < lit
        if op.op == "<=":
            return value <= lit
        if op.op == ">":
            return value > lit
        return value >= lit

    return pred


def _eval_filter(op: Filter, table: Table) -> Table:
    _require_columns(table, [op.col], "filter")
    if op.op not in COMPARE_OPS:
        raise SchemaError(f"filter: unknown comparison {op.op!r}")
    idx = table.column_index(op.col)
    pred = _filter_predicate(op, table.columns[idx][1])
    rows = tuple(row for row in table.rows if pred(row[idx]))
    return Table(table.columns, rows)


def _aggregate(agg: str, cells):
    present = [c for c in cells if c is not None]
    if agg == "count":
        return float(len(present))
    if not present:
        raise EmptyGroupAggregate(f"{agg}: group target cells are all missing")
    if agg == "sum":
        return float(sum(present))
    if agg == "mean":
        return float(sum(present)) / len(present)
    if agg == "min":
        return float(min(present))
    return float(max(present))


def _eval_group_summarise(op: GroupSummarise, table: Table) -> Table:
    if not op.group_cols:
        raise SchemaError("group_summarise needs at least one group column")
    if len(set(op.group_cols)) != len(op.group_cols):
        raise SchemaError("group_summarise group columns must be distinct")
    _require_columns(table, op.group_cols, "group_summarise")
    _require_columns(table, [op.target], "group_summarise")
    if op.target in op.group_cols:
        raise SchemaError("group_summarise target cannot be a group column")
    if op.agg not in AGG_FUNCS:
        raise SchemaError(f"group_summarise: unknown aggregator {op.agg!r}")
    if op.agg != "count":
        _require_quantitative(table, op.target, "group_summarise")
    group_idx = [table.column_index(c) for c in op.group_cols]
    target_idx = table.column_index(op.target)
    groups = {}
    order = []
    for row in table.rows:
        key = tuple(row[i] for i in group_idx)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row[target_idx])
    out_name = resolve_name(op.out_name, set(op.group_cols))
    columns = tuple(
        (c, table.column_type(c)) for c in op.group_cols
    ) + ((out_name, ColumnType.QUANTITATIVE),)
    rows = tuple(key + (_aggregate(op.agg, groups[key]),) for key in order)
    return Table(columns, rows)


def _eval_cumsum(op: CumSum, table: Table) -> Table:
    if len(set(op.group_cols)) != len(op.group_cols):
        raise SchemaError("cumsum group columns must be distinct")
    _require_columns(table, op.group_cols, "cumsum")
    _require_columns(table, [op.target], "cumsum")
    if op.target in op.group_cols:
        raise SchemaError("cumsum target cannot be a group column")
    _require_quantitative(table, op.target, "cumsum")
    group_idx = [table.column_index(c) for c in op.group_cols]
    target_idx = table.column_index(op.target)
    running = {}
    rows = []
    for row in table.rows:
        key = tuple(row[i] for i in group_idx)
        cell = row[target_idx]
        if cell is None:
            new_cell = None  # missing does not advance the running sum
        else:
            running[key] = running.get(key, 0.0) + cell
            new_cell = running[key]
        rows.append(row[:target_idx] + (new_cell,) + row[target_idx + 1 :])
    return Table(table.columns, tuple(rows))


def _eval_mutate(op: Mutate, table: Table) -> Table:
    _require_columns(table, [op.lhs], "mutate")
    _require_quantitative(table, op.lhs, "mutate")
    lhs_idx = table.column_index(op.lhs)
    if op.rhs_is_col:
        _require_columns(table, [op.rhs], "mutate")
        _require_quantitative(table, op.rhs, "mutate")
        rhs_idx = table.column_index(op.rhs)
        rhs_of = lambda row: row[rhs_idx]
    else:
        lit = float(op.rhs)
        rhs_of = lambda row: lit
    if op.op not in ARITH_OPS:
        raise SchemaError(f"mutate: unknown operator {op.op!r}")
    out_name = resolve_name(op.out_name, set(table.column_names))
    new_cells = []
    for row in table.rows:
        a, b = row[lhs_idx], rhs_of(row)
        if op.op == "/" and b == 0.0:
            raise DivisionByZero(f"mutate: division by zero in column {op.out_name!r}")
        if a is None or b is None:
            new_cells.append(None)
            continue
        if op.op == "+":
            value = a + b
        elif op.op == "-":
            value = a - b
        elif op.op == "*":
            value = a * b
        else:
            value = a / b
        if value != value or value in (float("inf"), float("-inf")):
            raise TypeMismatch("mutate: arithmetic produced a non-finite number")
        new_cells.append(value)
    columns = table.columns + ((out_name, ColumnType.QUANTITATIVE),)
    rows = tuple(row + (cell,) for row, cell in zip(table.rows, new_cells))
    return Table(columns, rows)


def _eval_separate(op: Separate, table: Table) -> Table:
    _require_columns(table, [op.col], "separate")
    idx = table.column_index(op.col)
    if table.columns[idx][1] is not ColumnType.NOMINAL:
        raise TypeMismatch("separate: column must be nominal text")
    pieces = []
    for row in table.rows:
        cell = row[idx]
        if cell is None:
            pieces.append(("", ""))
            continue
        text = format_cell(cell)
        head, sep, tail = text.partition(op.delim)
        pieces.append((head, tail if sep else ""))
    remaining = [n for n, _ in table.columns if n != op.col]
    out1 = resolve_name(op.out1, set(remaining))
    out2 = resolve_name(op.out2, set(remaining) | {out1})
    type1 = infer_column_type([p[0] for p in pieces])
    type2 = infer_column_type([p[1] for p in pieces])
    columns = (
        table.columns[:idx]
        + ((out1, type1), (out2, type2))
        + table.columns[idx + 1 :]
    )
    rows = tuple(
        row[:idx]
        + (parse_cell(p[0], type1), parse_cell(p[1], type2))
        + row[idx + 1 :]
        for row, p in zip(table.rows, pieces)
    )
    return Table(columns, rows)


def _eval_unite(op: Unite, table: Table) -> Table:
    _require_columns(table, [op.col1, op.col2], "unite")
    if op.col1 == op.col2:
        raise SchemaError("unite columns must differ")
    i1 = table.column_index(op.col1)
    i2 = table.column_index(op.col2)
    remaining = [n for n, _ in table.columns if n not in (op.col1, op.col2)]
    out_name = resolve_name(op.out_name, set(remaining))
    cells = []
    for row in table.rows:
        a, b = row[i1], row[i2]
        if a is None and b is None:
            cells.append(None)
        else:
            cells.append(format_cell(a) + op.delim + format_cell(b))
    # the united column takes col1's position; col2 is dropped
    columns = []
    for pos, col in enumerate(table.columns):
        if pos == i1:
            columns.append((out_name, ColumnType.NOMINAL))
        elif pos != i2:
            columns.append(col)
    rows = []
    for row, cell in zip(table.rows, cells):
        out_row = []
        for pos, value in enumerate(row):
            if pos == i1:
                out_row.append(cell)
            elif pos != i2:
                out_row.append(value)
        rows.append(tuple(out_row))
    return Table(tuple(columns), tuple(rows))


# ---------------------------------------------------------------------------
# containment


_TYPE_COMPAT = {
    ColumnType.QUANTITATIVE: (ColumnType.QUANTITATIVE,),
    ColumnType.TEMPORAL: (ColumnType.TEMPORAL, ColumnType.NOMINAL),
    ColumnType.NOMINAL: (ColumnType.NOMINAL, ColumnType.TEMPORAL),
}


def contains(big: Table, example: Table, rel_tol: float = 1e-6):
    """All injective column mappings embedding ``example`` into ``big``.

    A mapping assigns each example column a distinct big-table column such
    that every example row matches some big row cell-for-cell under
    cell_equal. Returns a deterministically ordered list of column-name
    tuples (position i holds the big column mapped to example column i);
    empty list means not contained.
    """
    if example.n_rows == 0:
        raise ValueError("example table must be nonempty")
    for row in example.rows:
        if any(cell is None for cell in row):
            raise ValueError("example table may not contain missing cells")

    # candidate big columns per example column, with per-cell row matches
    candidates = []  # per example col: list of (big col index, {ex row -> row set})
    for i in range(example.n_cols):
        ex_type = example.columns[i][1]
        ex_cells = [row[i] for row in example.rows]
        col_options = []
        for j, (name, big_type) in enumerate(big.columns):
            if big_type not in _TYPE_COMPAT[ex_type]:
                continue
            big_cells = [row[j] for row in big.rows]
            matches = []
            ok = True
            for cell in ex_cells:
                rows = frozenset(
                    r for r, c in enumerate(big_cells) if cell_equal(c, cell, rel_tol)
                )
                if not rows:
                    ok = False
                    break
                matches.append(rows)
            if ok:
                col_options.append((j, matches))
        if not col_options:
            return []
        candidates.append(col_options)

    results = []

    def assign(pos, used, row_sets):
        if pos == example.n_cols:
            results.append(tuple())
            return
        for j, matches in candidates[pos]:
            if j in used:
                continue
            narrowed = []
            feasible_here = True
            for prev, rows in zip(row_sets, matches):
                inter = prev & rows
                if not inter:
                    feasible_here = False
                    break
                narrowed.append(inter)
            if not feasible_here:
                continue
            before = len(results)
            assign(pos + 1, used | {j}, narrowed)
            for k in range(before, len(results)):
                results[k] = (j,) + results[k]

    all_rows = frozenset(range(big.n_rows))
    assign(0, frozenset(), [all_rows] * example.n_rows)
    mappings = sorted(set(results))
    return [tuple(big.columns[j][0] for j in m) for m in mappings]


# ---------------------------------------------------------------------------
# canonical text form

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _name(text: str) -> str:
    if _IDENT_RE.match(text):
        return text
    escaped = text.replace("\\", "\\\\").replace("`", "\\`")
    return "`" + escaped + "`"


def _string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _literal(value) -> str:
    if isinstance(value, float):
        return format_cell(value)
    if isinstance(value, date):
        return _string(value.isoformat())
    return _string(value)


def serialize_op(op) -> str:
    if isinstance(op, PivotLonger):
        cols = ", ".join(_name(c) for c in op.cols)
        return (
            f"pivot_longer(cols = ({cols}), names_to = {_string(op.names_to)}, "
            f"values_to = {_string(op.values_to)})"
        )
    if isinstance(op, PivotWider):
        return (
            f"pivot_wider(names_from = {_name(op.names_from)}, "
            f"values_from = {_name(op.values_from)})"
        )
    if isinstance(op, Select):
        return "select(" + ", ".join(_name(c) for c in op.cols) + ")"
    if isinstance(op, Filter):
        return f"filter({_name(op.col)} {op.op} {_literal(op.lit)})"
    if isinstance(op, GroupSummarise):
        by = ", ".join(_name(c) for c in op.group_cols)
        return (
            f"group_summarise(by = ({by}), "
            f"{_name(op.out_name)} = {op.agg}({_name(op.target)}))"
        )
    if isinstance(op, CumSum):
        by = ", ".join(_name(c) for c in op.group_cols)
        return f"cumsum(by = ({by}), target = {_name(op.target)})"
    if isinstance(op, Mutate):
        rhs = _name(op.rhs) if op.rhs_is_col else format_cell(float(op.rhs))
        return f"mutate({_name(op.out_name)} = {_name(op.lhs)} {op.op} {rhs})"
    if isinstance(op, Separate):
        return (
            f"separate(col = {_name(op.col)}, sep = {_string(op.delim)}, "
            f"into = ({_string(op.out1)}, {_string(op.out2)}))"
        )
    if isinstance(op, Unite):
        return (
            f"unite(cols = ({_name(op.col1)}, {_name(op.col2)}), "
            f"sep = {_string(op.delim)}, into = {_string(op.out_name)})"
        )
    raise TypeError(f"not a transform op: {op!r}")


def serialize(prog: TransformProgram) -> str:
    """Canonical round-trippable text; the empty program is "identity()"."""
    if not prog.ops:
        return "identity()"
    return " %>% ".join(serialize_op(op) for op in prog.ops)


# --- parser ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    \s*(
        %>%
      | ==|!=|<=|>=|<|>
      | [(),=+\-*/]
      | `(?:[^`\\]|\\.)*`
      | "(?:[^"\\]|\\.)*"
      | -?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?
      | [A-Za-z_][A-Za-z0-9_]*
    )""",
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ProgramParseError(f"bad token at offset {pos}: {text[pos:pos+20]!r}")
        token = match.group(1)
        if token.strip():
            tokens.append(token)
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        token = self.peek()
        if token is None:
            raise ProgramParseError("unexpected end of program")
        self.pos += 1
        return token

    def expect(self, token):
        got = self.next()
        if got != token:
            raise ProgramParseError(f"expected {token!r}, got {got!r}")

    def name(self) -> str:
        token = self.next()
        if token.startswith("`"):
            return re.sub(r"\\(.)", r"\1", token[1:-1])
        if _IDENT_RE.match(token):
            return token
        raise ProgramParseError(f"expected a column name, got {token!r}")

    def string(self) -> str:
        token = self.next()
        if not token.startswith('"'):
            raise ProgramParseError(f"expected a string, got {token!r}")
        return re.sub(r"\\(.)", r"\1", token[1:-1])

    def number(self) -> float:
        token = self.next()
        negate = False
        if token == "-":
            negate = True
            token = self.next()
        try:
            value = float(token)
        except ValueError:
            raise ProgramParseError(f"expected a number, got {token!r}") from None
        return -value if negate else value

    def name_list(self):
        self.expect("(")
        names = []
        if self.peek() != ")":
            names.append(self.name())
            while self.peek() == ",":
                self.next()
                names.append(self.name())
        self.expect(")")
        return tuple(names)

    def literal(self):
        token = self.peek()
        if token is None:
            raise ProgramParseError("expected a literal")
        if token.startswith('"'):
            text = self.string()
            as_date = parse_date(text)
            return as_date if as_date is not None else text
        return self.number()


def _parse_call(parser: _Parser):
    head = parser.next()
    parser.expect("(")
    if head == "identity":
        parser.expect(")")
        return None
    if head == "pivot_longer":
        parser.expect("cols")
        parser.expect("=")
        cols = parser.name_list()
        parser.expect(",")
        parser.expect("names_to")
        parser.expect("=")
        names_to = parser.string()
        parser.expect(",")
        parser.expect("values_to")
        parser.expect("=")
        values_to = parser.string()
        parser.expect(")")
        return PivotLonger(cols, names_to, values_to)
    if head == "pivot_wider":
        parser.expect("names_from")
        parser.expect("=")
        names_from = parser.name()
        parser.expect(",")
        parser.expect("values_from")
        parser.expect("=")
        values_from = parser.name()
        parser.expect(")")
        return PivotWider(names_from, values_from)
    if head == "select":
        cols = [parser.name()]
        while parser.peek() == ",":
            parser.next()
            cols.append(parser.name())
        parser.expect(")")
        return Select(tuple(cols))
    if head == "filter":
        col = parser.name()
        cmp_op = parser.next()
        if cmp_op not in COMPARE_OPS:
            raise ProgramParseError(f"bad comparison {cmp_op!r}")
        lit = parser.literal()
        parser.expect(")")
        return Filter(col, cmp_op, lit)
    if head == "group_summarise":
        parser.expect("by")
        parser.expect("=")
        group_cols = parser.name_list()
        parser.expect(",")
        out_name = parser.name()
        parser.expect("=")
        agg = parser.next()
        if agg not in AGG_FUNCS:
            raise ProgramParseError(f"bad aggregator {agg!r}")
        parser.expect("(")
        target = parser.name()
        parser.expect(")")
        parser.expect(")")
        return GroupSummarise(group_cols, agg, target, out_name)
    if head == "cumsum":
        parser.expect("by")
        parser.expect("=")
        group_cols = parser.name_list()
        parser.expect(",")
        parser.expect("target")
        parser.expect("=")
        target = parser.name()
        parser.expect(")")
        return CumSum(group_cols, target)
    if head == "mutate":
        out_name = parser.name()
        parser.expect("=")
        lhs = parser.name()
        arith = parser.next()
        if arith not in ARITH_OPS:
            raise ProgramParseError(f"bad arithmetic operator {arith!r}")
        token = parser.peek()
        if token is not None and (token == "-" or token[0].isdigit()):
            rhs = parser.number()
            parser.expect(")")
            return Mutate(out_name, lhs, arith, rhs, rhs_is_col=False)
        rhs = parser.name()
        parser.expect(")")
        return Mutate(out_name, lhs, arith, rhs, rhs_is_col=True)
    if head == "separate":
        parser.expect("col")
        parser.expect("=")
        col = parser.name()
        parser.expect(",")
        parser.expect("sep")
        parser.expect("=")
        delim = parser.string()
        parser.expect(",")
        parser.expect("into")
        parser.expect("=")
        parser.expect("(")
        out1 = parser.string()
        parser.expect(",")
        out2 = parser.string()
        parser.expect(")")
        parser.expect(")")
        return Separate(col, delim, out1, out2)
    if head == "unite":
        parser.expect("cols")
        parser.expect("=")
        parser.expect("(")
        col1 = parser.name()
        parser.expect(",")
        col2 = parser.name()
        parser.expect(")")
        parser.expect(",")
        parser.expect("sep")
        parser.expect("=")
        delim = parser.string()
        parser.expect(",")
        parser.expect("into")
        parser.expect("=")
        out_name = parser.string()
        parser.expect(")")
        return Unite(col1, col2, delim, out_name)
    raise ProgramParseError(f"unknown operator {head!r}")


def parse(text: str) -> TransformProgram:
    """Inverse of serialize."""
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    ops = []
    op = _parse_call(parser)
    if op is not None:
        ops.append(op)
        while parser.peek() == "%>%":
            parser.next()
            nxt = _parse_call(parser)
            if nxt is None:
                raise ProgramParseError("identity() cannot appear in a chain")
            ops.append(nxt)
    if parser.peek() is not None:
        raise ProgramParseError(f"trailing tokens: {parser.tokens[parser.pos:]!r}")
    return TransformProgram(tuple(ops))


def program_to_json(prog: TransformProgram) -> list:
    """JSON AST encoding used by the HTTP API."""
    out = []
    for op in prog.ops:
        entry = {"op": op_name(op)}
        if isinstance(op, PivotLonger):
            entry.update(cols=list(op.cols), names_to=op.names_to, values_to=op.values_to)
        elif isinstance(op, PivotWider):
            entry.update(names_from=op.names_from, values_from=op.values_from)
        elif isinstance(op, Select):
            entry.update(cols=list(op.cols))
        elif isinstance(op, Filter):
            entry.update(col=op.col, cmp=op.op, lit=format_cell(op.lit)
                         if isinstance(op.lit, date) else op.lit)
        elif isinstance(op, GroupSummarise):
            entry.update(by=list(op.group_cols), agg=op.agg, target=op.target,
                         out=op.out_name)
        elif isinstance(op, CumSum):
            entry.update(by=list(op.group_cols), target=op.target)
        elif isinstance(op, Mutate):
            entry.update(out=op.out_name, lhs=op.lhs, arith=op.op, rhs=op.rhs,
                         rhs_is_col=op.rhs_is_col)
        elif isinstance(op, Separate):
            entry.update(col=op.col, sep=op.delim, into=[op.out1, op.out2])
        elif isinstance(op, Unite):
            entry.update(cols=[op.col1, op.col2], sep=op.delim, into=op.out_name)
        out.append(entry)
    return out
