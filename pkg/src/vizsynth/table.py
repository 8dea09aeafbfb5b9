"""Immutable typed relational tables.

Cells are plain Python values: ``float`` for numbers, ``str`` for text,
``datetime.date`` for day-precision dates, and ``None`` for missing cells.
Column types are inferred from cell text: a column is temporal when every
non-missing cell is a strict ISO "YYYY-MM-DD" date, quantitative when every
non-missing cell parses as a finite number, nominal otherwise.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import re
from dataclasses import dataclass
from datetime import date

from .errors import EmptyTable, MalformedCsv

Cell = "float | str | date | None"  # cells are plain values, None = missing

_ISO_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class ColumnType(enum.Enum):
    QUANTITATIVE = "quantitative"
    NOMINAL = "nominal"
    TEMPORAL = "temporal"


def parse_date(text: str) -> date | None:
    """Strict "YYYY-MM-DD" parse; returns None when text is not such a date."""
    if not _ISO_DATE_RE.match(text.strip()):
        return None
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        return None


def parse_number(text: str) -> float | None:
    """Parse a finite number; None when text is not one (inf/nan rejected)."""
    try:
        value = float(text.strip())
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def format_cell(cell) -> str:
    """Canonical text of a cell: integral floats drop the decimal point,
    dates render ISO, missing renders empty."""
    if cell is None:
        return ""
    if isinstance(cell, float):
        if cell.is_integer() and abs(cell) < 1e15:
            return str(int(cell))
        return repr(cell)
    if isinstance(cell, date):
        return cell.isoformat()
    return cell


def infer_column_type(texts) -> ColumnType:
    """Infer the type of a column from the canonical text of its cells.

    Empty texts count as missing and are ignored; an all-missing column is
    nominal. Order of the input does not matter.
    """
    present = [t for t in texts if t.strip() != ""]
    if not present:
        return ColumnType.NOMINAL
    if all(parse_date(t) is not None for t in present):
        return ColumnType.TEMPORAL
    if all(parse_number(t) is not None for t in present):
        return ColumnType.QUANTITATIVE
    return ColumnType.NOMINAL


def parse_cell(text: str, ctype: ColumnType):
    """Convert cell text to the stored value for a column of the given type."""
    if text.strip() == "":
        return None
    if ctype is ColumnType.TEMPORAL:
        parsed = parse_date(text)
        if parsed is None:
            raise ValueError(f"not an ISO date: {text!r}")
        return parsed
    if ctype is ColumnType.QUANTITATIVE:
        number = parse_number(text)
        if number is None:
            raise ValueError(f"not a number: {text!r}")
        return number
    return text.strip()


def coerce_value(value) -> "float | str | date | None":
    """Normalize a JSON-ish value (int/float/str/None) into a cell."""
    if value is None:
        return None
    if isinstance(value, bool):
        return format_cell(float(value))
    if isinstance(value, (int, float)):
        as_float = float(value)
        if not math.isfinite(as_float):
            raise ValueError(f"non-finite number: {value!r}")
        return as_float
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        as_date = parse_date(value)
        return as_date if as_date is not None else value
    raise ValueError(f"unsupported cell value: {value!r}")


def cell_equal(a, b, rel_tol: float = 1e-6) -> bool:
    """Tolerant cell comparison used by containment checking.

    Numbers compare within ``rel_tol * max(1, |a|, |b|)``. Text compares
    byte-equal after trimming surrounding whitespace. Dates compare by day.
    A number and a text that parses to the same number compare equal, as do
    a date and its ISO text (example values arrive as text from the UI).
    """
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, str) and isinstance(b, str):
        return a.strip() == b.strip()
    if isinstance(a, date) and isinstance(b, date):
        return a == b
    # cross-variant: promote text to the other side's kind when possible
    if isinstance(a, str) and isinstance(b, float):
        parsed = parse_number(a)
        return parsed is not None and _num_equal(parsed, b, rel_tol)
    if isinstance(b, str) and isinstance(a, float):
        parsed = parse_number(b)
        return parsed is not None and _num_equal(a, parsed, rel_tol)
    if isinstance(a, str) and isinstance(b, date):
        return parse_date(a) == b
    if isinstance(b, str) and isinstance(a, date):
        return parse_date(b) == a
    if isinstance(a, float) and isinstance(b, float):
        return _num_equal(a, b, rel_tol)
    return False


def _num_equal(a: float, b: float, rel_tol: float) -> bool:
    return abs(a - b) <= rel_tol * max(1.0, abs(a), abs(b))


def cell_sort_key(cell):
    """Total order over mixed cells: missing < numbers < dates < text."""
    if cell is None:
        return (0, 0.0, "")
    if isinstance(cell, float):
        return (1, cell, "")
    if isinstance(cell, date):
        return (2, 0.0, cell.isoformat())
    return (3, 0.0, cell)


def resolve_name(base: str, taken) -> str:
    """Pick ``base`` or the first free '{base}_2', '{base}_3', ... variant."""
    if base not in taken:
        return base
    n = 2
    while f"{base}_{n}" in taken:
        n += 1
    return f"{base}_{n}"


def _cell_ok(cell, ctype: ColumnType) -> bool:
    if cell is None:
        return True
    if ctype is ColumnType.QUANTITATIVE:
        return isinstance(cell, float) and math.isfinite(cell)
    if ctype is ColumnType.TEMPORAL:
        return isinstance(cell, date)
    return isinstance(cell, (str, float, date))


@dataclass(frozen=True, eq=True)
class Table:
    """An immutable relational table: ordered named typed columns plus rows
    of cells. Never mutated after construction; safe to share across search
    workers."""

    columns: tuple  # tuple[(name, ColumnType), ...]
    rows: tuple  # tuple[tuple[Cell, ...], ...]

    def __post_init__(self):
        names = [name for name, _ in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names: {names}")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
            for (name, ctype), cell in zip(self.columns, row):
                if not _cell_ok(cell, ctype):
                    raise ValueError(
                        f"cell {cell!r} invalid for {ctype.value} column {name!r}"
                    )

    def __hash__(self):
        # tables key the search memos; cache the content hash
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.columns, self.rows))
            object.__setattr__(self, "_hash", cached)
        return cached

    @property
    def column_names(self):
        return tuple(name for name, _ in self.columns)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column_index(self, name: str) -> int:
        for i, (col_name, _) in enumerate(self.columns):
            if col_name == name:
                return i
        raise KeyError(name)

    def column_type(self, name: str) -> ColumnType:
        return self.columns[self.column_index(name)][1]

    def column_cells(self, name: str):
        idx = self.column_index(name)
        return tuple(row[idx] for row in self.rows)

    @staticmethod
    def from_text_rows(names, text_rows) -> "Table":
        """Build a table from cell texts, inferring each column's type."""
        if not text_rows:
            raise EmptyTable("table has no data rows")
        unique_names = []
        for name in names:
            unique_names.append(resolve_name(name, set(unique_names)))
        types = [
            infer_column_type([row[i] for row in text_rows])
            for i in range(len(unique_names))
        ]
        rows = tuple(
            tuple(parse_cell(text, ctype) for text, ctype in zip(row, types))
            for row in text_rows
        )
        return Table(tuple(zip(unique_names, types)), rows)

    @staticmethod
    def from_json(doc: dict) -> "Table":
        """Parse the wire form {"columns":[{"name","type"}],"rows":[[...]]}."""
        columns = []
        for col in doc["columns"]:
            columns.append((col["name"], ColumnType(col["type"])))
        rows = []
        for raw_row in doc["rows"]:
            row = []
            for (name, ctype), value in zip(columns, raw_row):
                if value is None:
                    row.append(None)
                elif isinstance(value, str):
                    # honor the declared type; nominal keeps the raw text
                    row.append(parse_cell(value, ctype))
                else:
                    row.append(coerce_value(value))
            rows.append(tuple(row))
        if not rows:
            raise EmptyTable("table has no data rows")
        return Table(tuple(columns), tuple(rows))

    def to_json(self) -> dict:
        return {
            "columns": [
                {"name": name, "type": ctype.value} for name, ctype in self.columns
            ],
            "rows": [[cell_to_json(cell) for cell in row] for row in self.rows],
        }

    def to_csv(self) -> str:
        """RFC-4180 CSV with a header row; missing cells render empty."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.column_names)
        for row in self.rows:
            writer.writerow([format_cell(cell) for cell in row])
        return out.getvalue()


def cell_to_json(cell):
    """JSON form of a cell: integral floats become ints, dates ISO strings."""
    if cell is None:
        return None
    if isinstance(cell, float):
        if cell.is_integer() and abs(cell) < 1e15:
            return int(cell)
        return cell
    if isinstance(cell, date):
        return cell.isoformat()
    return cell


def load_csv(data: bytes, has_header: bool = True) -> Table:
    """Load a UTF-8 CSV into a typed table.

    The header row becomes the column names; without a header the columns
    are named "C1", "C2", ... Raises MalformedCsv for invalid UTF-8 or
    ragged rows and EmptyTable when there are no data rows.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedCsv(f"input is not valid UTF-8: {exc}") from None
    try:
        records = [row for row in csv.reader(io.StringIO(text)) if row]
    except csv.Error as exc:
        raise MalformedCsv(str(exc)) from None
    if not records:
        raise EmptyTable("csv has no rows")
    width = len(records[0])
    for i, row in enumerate(records):
        if len(row) != width:
            raise MalformedCsv(f"row {i} has {len(row)} fields, expected {width}")
    if has_header:
        names = [name.strip() for name in records[0]]
        body = records[1:]
    else:
        names = [f"C{i + 1}" for i in range(width)]
        body = records
    if not body:
        raise EmptyTable("csv has a header but no data rows")
    return Table.from_text_rows(names, body)
