"""Turn example elements into per-layer synthesis goals.

Elements are partitioned into layers by (kind, property set); each partition
becomes a LayerSketch: a mark, a channel list, a placeholder chart spec
binding channel i to column "C{i+1}", and a small example table whose rows
are the elements' literal values. Line elements are the one special case —
a line through (x1, y1) and (x2, y2) contributes two table rows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExampleError, InconsistentGroup, TooManyLayers
from .grammar import (
    CHANNEL_ORDER,
    KIND_TO_MARK,
    MAX_LAYERS,
    PROP_TO_CHANNEL,
    Channel,
    ExampleElement,
    LayerSpec,
    Mark,
    VisSpec,
    make_layer,
    validate_spec,
)
from .table import Table, coerce_value, format_cell, infer_column_type, parse_cell


@dataclass(frozen=True)
class LayerSketch:
    """One layer's synthesis goal: find a table containing ``example`` and
    render it with ``spec`` (whose fields are placeholders C1..Ck)."""

    mark: Mark
    channels: tuple  # (Channel, ...) in canonical order
    spec: LayerSpec  # placeholder-field layer
    example: Table  # one column per channel, typed from the element values


def partition_elements(elements):
    """Group elements by (kind, exact property-name set), first appearance
    order. More than MAX_LAYERS groups raises TooManyLayers."""
    groups = {}
    order = []
    for element in elements:
        key = (element.kind, frozenset(element.prop_names()))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(element)
    if len(order) > MAX_LAYERS:
        raise TooManyLayers(
            f"examples form {len(order)} element groups; at most {MAX_LAYERS} "
            "layers are supported"
        )
    return [groups[key] for key in order]


def _line_channels(prop_names):
    """Channels for a line group: endpoint props collapse to X and Y."""
    channels = [Channel.X, Channel.Y]
    for name in prop_names:
        if name in ("x1", "x2", "y1", "y2"):
            continue
        channels.append(PROP_TO_CHANNEL[name])
    return tuple(ch for ch in CHANNEL_ORDER if ch in channels)


def _plain_channels(prop_names):
    channels = {PROP_TO_CHANNEL[name] for name in prop_names}
    return tuple(ch for ch in CHANNEL_ORDER if ch in channels)


def decompile_layer(group) -> LayerSketch:
    """Build one LayerSketch from a same-shape element group."""
    head = group[0]
    mark = KIND_TO_MARK[head.kind]
    names = head.prop_names()
    if head.kind == "line":
        channels = _line_channels(names)
    else:
        channels = _plain_channels(names)

    # raw text per channel per element row; lines produce two rows each
    raw_rows = []
    for element in group:
        if element.kind == "line":
            shared = {
                PROP_TO_CHANNEL[n]: v
                for n, v in element.props
                if n not in ("x1", "y1", "x2", "y2")
            }
            for xk, yk in (("x1", "y1"), ("x2", "y2")):
                row = {Channel.X: element.get(xk), Channel.Y: element.get(yk)}
                row.update(shared)
                raw_rows.append(row)
        else:
            raw_rows.append(
                {PROP_TO_CHANNEL[n]: v for n, v in element.props}
            )

    columns = []
    cells_by_channel = {}
    for i, channel in enumerate(channels):
        texts = [format_cell(coerce_value(row[channel])) for row in raw_rows]
        if any(t.strip() == "" for t in texts):
            raise ExampleError(
                f"channel {channel.value} has an empty example value",
                field=channel.value,
            )
        ctype = infer_column_type(texts)
        # cells come from the canonical text, so "64.4" given as a string
        # and 64.4 given as a number produce the same example column
        cells = [parse_cell(t, ctype) for t in texts]
        columns.append((f"C{i + 1}", ctype))
        cells_by_channel[channel] = cells

    rows = tuple(
        tuple(cells_by_channel[ch][r] for ch in channels)
        for r in range(len(raw_rows))
    )
    try:
        example = Table(tuple(columns), rows)
    except Exception as exc:  # mixed value kinds within one channel
        raise InconsistentGroup(f"inconsistent example values: {exc}") from None

    spec = make_layer(
        mark, {ch: f"C{i + 1}" for i, ch in enumerate(channels)}
    )
    return LayerSketch(mark, channels, spec, example)


def decompile(elements) -> tuple:
    """Partition elements and decompile every group; validates the combined
    placeholder spec so structural errors surface before any search runs."""
    sketches = tuple(decompile_layer(g) for g in partition_elements(elements))
    validate_spec(VisSpec(tuple(s.spec for s in sketches)))
    return sketches
