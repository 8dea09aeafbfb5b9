"""Turn search results into chart candidates: bind real column names into
the placeholder specs, type the scales, emit Vega-Lite v5 JSON with inline
data, collapse semantic duplicates, and rank.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .decompiler import LayerSketch
from .errors import SchemaError
from .grammar import Channel, LayerSpec, VisSpec, make_layer, spec_to_json, validate_spec
from .table import Table, cell_sort_key, cell_to_json
from .transforms import TransformProgram, complexity, eval_program, serialize

VEGA_LITE_SCHEMA = "https://vega.github.io/schema/vega-lite/v5.json"

# channels whose encoding carries only a field (the paired channel's type
# governs the shared scale)
_FIELD_ONLY = frozenset({Channel.X2, Channel.Y2})


def instantiate(
    sketch: LayerSketch, prog: TransformProgram, mapping, input_table: Table
) -> "tuple[LayerSpec, Table]":
    """Fill the layer's placeholder fields from a containment mapping and
    return it with the fully transformed table."""
    output = eval_program(prog, input_table)
    missing = [name for name in mapping if name not in output.column_names]
    if missing:
        raise SchemaError(f"mapping references absent columns: {missing}")
    fields = {ch: mapping[i] for i, ch in enumerate(sketch.channels)}
    return make_layer(sketch.mark, fields), output


def infer_scales(layer: LayerSpec, data: Table) -> dict:
    """Per-channel scale typing: each channel takes the bound column's type
    (quantitative / nominal / temporal)."""
    return {ch: data.column_type(fld) for ch, fld in layer.encodings}


def _layer_doc(layer: LayerSpec, data: Table) -> dict:
    scales = infer_scales(layer, data)
    encoding = {}
    for ch, fld in layer.encodings:
        if ch in _FIELD_ONLY:
            encoding[ch.value] = {"field": fld}
        else:
            encoding[ch.value] = {"field": fld, "type": scales[ch].value}
    values = [
        {name: cell_to_json(cell) for name, cell in zip(data.column_names, row)}
        for row in data.rows
    ]
    return {
        "data": {"values": values},
        "encoding": encoding,
        "mark": layer.mark.value,
    }


def to_vegalite(spec: VisSpec, rendered) -> dict:
    """Compile an instantiated spec plus its per-layer tables to a Vega-Lite
    v5 document (inline data; multi-layer specs nest under "layer")."""
    validate_spec(spec)
    docs = [_layer_doc(layer, data) for layer, data in zip(spec.layers, rendered)]
    if len(docs) == 1:
        doc = {"$schema": VEGA_LITE_SCHEMA}
        doc.update(docs[0])
        return doc
    return {"$schema": VEGA_LITE_SCHEMA, "layer": docs}


def dumps_vegalite(doc: dict) -> str:
    """Canonical text form used for files and golden comparisons."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class Candidate:
    programs: tuple  # per-layer TransformProgram
    spec: VisSpec
    rendered: tuple  # per-layer Table
    vegalite: dict
    complexity: int
    group_key: tuple  # (sorted mark names, sorted channel names)
    id: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "programs": [serialize(p) for p in self.programs],
            "complexity": self.complexity,
            "group_key": [list(self.group_key[0]), list(self.group_key[1])],
            "vegalite": self.vegalite,
        }


def canonical_table_form(table: Table) -> dict:
    """Order-insensitive table identity: columns sorted by name, then rows
    sorted by every cell."""
    order = sorted(range(table.n_cols), key=lambda j: table.columns[j][0])
    columns = [[table.columns[j][0], table.columns[j][1].value] for j in order]
    rows = sorted(
        (tuple(row[j] for j in order) for row in table.rows),
        key=lambda r: tuple(cell_sort_key(c) for c in r),
    )
    return {
        "columns": columns,
        "rows": [[cell_to_json(c) for c in row] for row in rows],
    }


def canonical_form(spec: VisSpec, rendered) -> str:
    """The dedup identity of a candidate: spec plus canonicalized tables."""
    return json.dumps(
        {
            "spec": spec_to_json(spec),
            "tables": [canonical_table_form(t) for t in rendered],
        },
        sort_keys=True,
    )


def make_candidate(sketches, programs, mappings, input_table: Table) -> Candidate:
    """Compile one per-layer (program, mapping) choice into a Candidate."""
    layers = []
    tables = []
    for sketch, prog, mapping in zip(sketches, programs, mappings):
        layer, data = instantiate(sketch, prog, mapping, input_table)
        layers.append(layer)
        tables.append(data)
    spec = VisSpec(tuple(layers))
    validate_spec(spec)
    doc = to_vegalite(spec, tables)
    total = sum(complexity(p) for p in programs)
    marks = tuple(sorted(layer.mark.value for layer in layers))
    channels = tuple(
        sorted({ch.value for layer in layers for ch, _ in layer.encodings})
    )
    form = canonical_form(spec, tables)
    cid = hashlib.sha256(form.encode("utf-8")).hexdigest()[:16]
    return Candidate(
        programs=tuple(programs),
        spec=spec,
        rendered=tuple(tables),
        vegalite=doc,
        complexity=total,
        group_key=(marks, channels),
        id=cid,
    )


def _dedup_key(candidate: Candidate) -> str:
    return canonical_form(candidate.spec, candidate.rendered)


def _serial_key(candidate: Candidate):
    return tuple(serialize(p) for p in candidate.programs)


def dedup(candidates) -> list:
    """One survivor per canonical (spec, rendered data) class: the lowest
    complexity, ties broken by program serialization."""
    best = {}
    order = []
    for cand in candidates:
        key = _dedup_key(cand)
        held = best.get(key)
        if held is None:
            best[key] = cand
            order.append(key)
        elif (cand.complexity, _serial_key(cand)) < (
            held.complexity,
            _serial_key(held),
        ):
            best[key] = cand
    return [best[key] for key in order]


def rank_and_group(candidates, max_candidates: int) -> list:
    """Complexity-ascending order with same-shape candidates adjacent,
    truncated to the requested count."""
    ranked = sorted(
        candidates,
        key=lambda c: (c.complexity, c.group_key, _dedup_key(c)),
    )
    return ranked[:max_candidates]
