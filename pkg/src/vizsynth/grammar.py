"""Chart grammar: marks, encoding channels, layered specs, and the example
geometry elements users supply.

A spec is a list of layers (at most three); each layer binds one mark kind
and a channel -> field map. Example elements are the concrete points / bars /
lines / rects / areas a user sketches; each carries literal data values keyed
by a per-kind property vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ExampleError, SchemaError


class Mark(Enum):
    POINT = "point"
    LINE = "line"
    BAR = "bar"
    RECT = "rect"
    AREA = "area"


class Channel(Enum):
    X = "x"
    Y = "y"
    X2 = "x2"
    Y2 = "y2"
    SIZE = "size"
    COLOR = "color"
    SHAPE = "shape"
    COLUMN = "column"
    ROW = "row"


# which channels each mark may bind; x and y are always required
MARK_CHANNELS = {
    Mark.POINT: frozenset(
        {Channel.X, Channel.Y, Channel.COLOR, Channel.SIZE, Channel.SHAPE,
         Channel.COLUMN, Channel.ROW}
    ),
    Mark.LINE: frozenset(
        {Channel.X, Channel.Y, Channel.COLOR, Channel.SIZE, Channel.COLUMN,
         Channel.ROW}
    ),
    Mark.BAR: frozenset(
        {Channel.X, Channel.Y, Channel.Y2, Channel.COLOR, Channel.COLUMN,
         Channel.ROW}
    ),
    Mark.RECT: frozenset(
        {Channel.X, Channel.X2, Channel.Y, Channel.Y2, Channel.COLOR,
         Channel.COLUMN, Channel.ROW}
    ),
    Mark.AREA: frozenset(
        {Channel.X, Channel.Y, Channel.Y2, Channel.COLOR, Channel.COLUMN,
         Channel.ROW}
    ),
}

REQUIRED_CHANNELS = frozenset({Channel.X, Channel.Y})
FACET_CHANNELS = frozenset({Channel.COLUMN, Channel.ROW})
MAX_LAYERS = 3

# canonical channel ordering used when a layer's channels are listed
CHANNEL_ORDER = (
    Channel.X,
    Channel.X2,
    Channel.Y,
    Channel.Y2,
    Channel.COLOR,
    Channel.SIZE,
    Channel.SHAPE,
    Channel.COLUMN,
    Channel.ROW,
)


@dataclass(frozen=True)
class LayerSpec:
    mark: Mark
    encodings: tuple  # ((Channel, field name), ...) in CHANNEL_ORDER

    @property
    def channels(self):
        return tuple(ch for ch, _ in self.encodings)

    def field(self, channel: Channel):
        for ch, f in self.encodings:
            if ch is channel:
                return f
        return None


@dataclass(frozen=True)
class VisSpec:
    layers: tuple  # (LayerSpec, ...)


def make_layer(mark: Mark, mapping: dict) -> LayerSpec:
    """Build a layer with encodings normalized into canonical channel order."""
    encodings = tuple((ch, mapping[ch]) for ch in CHANNEL_ORDER if ch in mapping)
    return LayerSpec(mark, encodings)


def validate_spec(spec: VisSpec):
    """Raise SchemaError if the spec breaks a structural rule."""
    if not spec.layers:
        raise SchemaError("a spec needs at least one layer")
    if len(spec.layers) > MAX_LAYERS:
        raise SchemaError(f"too many layers: {len(spec.layers)} > {MAX_LAYERS}")
    facet_bindings = None
    for i, layer in enumerate(spec.layers):
        allowed = MARK_CHANNELS[layer.mark]
        seen = set()
        for ch, fld in layer.encodings:
            if ch in seen:
                raise SchemaError(f"layer {i}: channel {ch.value} bound twice")
            seen.add(ch)
            if ch not in allowed:
                raise SchemaError(
                    f"layer {i}: mark {layer.mark.value} does not take {ch.value}"
                )
            if not isinstance(fld, str) or not fld:
                raise SchemaError(f"layer {i}: channel {ch.value} has no field")
        for ch in REQUIRED_CHANNELS:
            if ch not in seen:
                raise SchemaError(f"layer {i}: missing required channel {ch.value}")
        bindings = frozenset(seen & FACET_CHANNELS)
        if facet_bindings is None:
            facet_bindings = bindings
        elif bindings != facet_bindings:
            raise SchemaError("facet channels must agree across layers")


# ---------------------------------------------------------------------------
# example elements

# property vocabulary per element kind: (required, optional)
ELEMENT_PROPS = {
    "point": (("x", "y"), ("color", "size", "shape", "column", "row")),
    "line": (("x1", "y1", "x2", "y2"), ("color", "size", "column", "row")),
    "bar": (("x", "y"), ("y2", "color", "column", "row")),
    "rect": (("x", "x2", "y", "y2"), ("color", "column", "row")),
    "area": (("x", "y"), ("y2", "color", "column", "row")),
}


@dataclass(frozen=True)
class ExampleElement:
    kind: str
    props: tuple  # ((prop name, raw value), ...) in vocabulary order

    def prop_names(self):
        return tuple(name for name, _ in self.props)

    def get(self, name: str):
        for n, v in self.props:
            if n == name:
                return v
        return None


def element_from_json(obj, index: int | None = None) -> ExampleElement:
    """Validate and normalize one element from its wire form.

    The wire form is {"kind": ..., <prop>: <value>, ...}. Raises
    ExampleError with a dotted field path for anything off-vocabulary.
    """
    where = f"elements[{index}]" if index is not None else "element"
    if not isinstance(obj, dict):
        raise ExampleError(f"{where} must be an object", field=where)
    kind = obj.get("kind")
    if kind not in ELEMENT_PROPS:
        raise ExampleError(
            f"{where}.kind must be one of {sorted(ELEMENT_PROPS)}",
            field=f"{where}.kind",
        )
    required, optional = ELEMENT_PROPS[kind]
    vocab = required + optional
    props = []
    for name in vocab:
        if name in obj:
            value = obj[name]
            if value is None or isinstance(value, bool) or not isinstance(
                value, (int, float, str)
            ):
                raise ExampleError(
                    f"{where}.{name} must be a number or a string",
                    field=f"{where}.{name}",
                )
            props.append((name, value))
    for name in required:
        if name not in obj:
            raise ExampleError(
                f"{where} ({kind}) is missing {name!r}", field=f"{where}.{name}"
            )
    for name in obj:
        if name != "kind" and name not in vocab:
            raise ExampleError(
                f"{where} ({kind}) does not take {name!r}", field=f"{where}.{name}"
            )
    return ExampleElement(kind, tuple(props))


def elements_from_json(objs) -> tuple:
    if not isinstance(objs, list) or not objs:
        raise ExampleError("elements must be a nonempty list", field="elements")
    return tuple(element_from_json(o, i) for i, o in enumerate(objs))


def element_to_json(element: ExampleElement) -> dict:
    out = {"kind": element.kind}
    out.update({name: value for name, value in element.props})
    return out


# mark <-> element kind correspondence (names coincide today, but keep the
# mapping explicit so the two vocabularies can drift)
KIND_TO_MARK = {
    "point": Mark.POINT,
    "line": Mark.LINE,
    "bar": Mark.BAR,
    "rect": Mark.RECT,
    "area": Mark.AREA,
}

# element prop name -> encoding channel (line's endpoint props are handled
# specially by the decompiler and are not in this map)
PROP_TO_CHANNEL = {
    "x": Channel.X,
    "x2": Channel.X2,
    "y": Channel.Y,
    "y2": Channel.Y2,
    "color": Channel.COLOR,
    "size": Channel.SIZE,
    "shape": Channel.SHAPE,
    "column": Channel.COLUMN,
    "row": Channel.ROW,
}


def layer_to_json(layer: LayerSpec) -> dict:
    return {
        "mark": layer.mark.value,
        "encodings": {ch.value: fld for ch, fld in layer.encodings},
    }


def spec_to_json(spec: VisSpec) -> dict:
    return {"layers": [layer_to_json(layer) for layer in spec.layers]}


def spec_from_json(obj) -> VisSpec:
    try:
        layers = []
        for raw in obj["layers"]:
            mark = Mark(raw["mark"])
            mapping = {Channel(k): v for k, v in raw["encodings"].items()}
            layers.append(make_layer(mark, mapping))
        spec = VisSpec(tuple(layers))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad spec JSON: {exc}") from None
    validate_spec(spec)
    return spec
