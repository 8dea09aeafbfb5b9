"""Unit tests for the chart grammar: mark/channel legality, layered-spec
validation, and the example-element wire format."""

import pytest

from vizsynth.errors import ExampleError, SchemaError
from vizsynth.grammar import (
    CHANNEL_ORDER,
    Channel,
    ExampleElement,
    LayerSpec,
    Mark,
    VisSpec,
    element_from_json,
    element_to_json,
    elements_from_json,
    layer_to_json,
    make_layer,
    spec_from_json,
    spec_to_json,
    validate_spec,
)


def layer(mark, **fields):
    return make_layer(mark, {Channel(k): v for k, v in fields.items()})


class TestMakeLayer:
    def test_canonical_channel_order(self):
        built = layer(Mark.BAR, color="c", y="b", x="a", y2="d")
        assert built.channels == (Channel.X, Channel.Y, Channel.Y2, Channel.COLOR)
        assert built.field(Channel.Y2) == "d"
        assert built.field(Channel.SHAPE) is None

    def test_channel_order_covers_all_channels(self):
        assert set(CHANNEL_ORDER) == set(Channel)


class TestValidateSpec:
    def test_minimal_ok(self):
        validate_spec(VisSpec((layer(Mark.POINT, x="a", y="b"),)))

    def test_empty_rejected(self):
        with pytest.raises(SchemaError, match="at least one layer"):
            validate_spec(VisSpec(()))

    def test_too_many_layers(self):
        one = layer(Mark.POINT, x="a", y="b")
        with pytest.raises(SchemaError, match="too many layers"):
            validate_spec(VisSpec((one,) * 4))

    def test_missing_required_channel(self):
        with pytest.raises(SchemaError, match="missing required channel y"):
            validate_spec(VisSpec((layer(Mark.POINT, x="a"),)))

    @pytest.mark.parametrize(
        "mark,field",
        [
            (Mark.LINE, "y2"),
            (Mark.LINE, "shape"),
            (Mark.POINT, "y2"),
            (Mark.POINT, "x2"),
            (Mark.BAR, "shape"),
            (Mark.BAR, "x2"),
            (Mark.AREA, "x2"),
            (Mark.RECT, "shape"),
            (Mark.RECT, "size"),
        ],
    )
    def test_illegal_channel_for_mark(self, mark, field):
        bad = layer(mark, **{"x": "a", "y": "b", field: "c"})
        with pytest.raises(SchemaError, match="does not take"):
            validate_spec(VisSpec((bad,)))

    @pytest.mark.parametrize(
        "mark,field",
        [
            (Mark.BAR, "y2"),
            (Mark.RECT, "x2"),
            (Mark.RECT, "y2"),
            (Mark.AREA, "y2"),
            (Mark.POINT, "shape"),
            (Mark.LINE, "size"),
        ],
    )
    def test_legal_channel_for_mark(self, mark, field):
        good = layer(mark, **{"x": "a", "y": "b", field: "c"})
        validate_spec(VisSpec((good,)))

    def test_duplicate_channel_rejected(self):
        bad = LayerSpec(Mark.POINT, ((Channel.X, "a"), (Channel.X, "b"),
                                     (Channel.Y, "c")))
        with pytest.raises(SchemaError, match="bound twice"):
            validate_spec(VisSpec((bad,)))

    def test_empty_field_rejected(self):
        bad = LayerSpec(Mark.POINT, ((Channel.X, ""), (Channel.Y, "b")))
        with pytest.raises(SchemaError, match="has no field"):
            validate_spec(VisSpec((bad,)))

    def test_facet_channels_must_agree(self):
        faceted = layer(Mark.POINT, x="a", y="b", column="c")
        plain = layer(Mark.LINE, x="a", y="b")
        with pytest.raises(SchemaError, match="facet"):
            validate_spec(VisSpec((faceted, plain)))

    def test_same_facet_channels_ok(self):
        first = layer(Mark.POINT, x="a", y="b", column="c")
        second = layer(Mark.LINE, x="a", y="d", column="e")
        validate_spec(VisSpec((first, second)))

    def test_layering_without_facets_ok(self):
        validate_spec(
            VisSpec((layer(Mark.LINE, x="a", y="b"),
                     layer(Mark.BAR, x="a", y="c", y2="d")))
        )


class TestElementWireFormat:
    def test_bar_parses_in_vocabulary_order(self):
        el = element_from_json({"kind": "bar", "y2": 87.8, "x": "09-05", "y": 64.4})
        assert el.kind == "bar"
        assert el.prop_names() == ("x", "y", "y2")
        assert el.get("x") == "09-05"
        assert el.get("missing") is None

    def test_line_requires_endpoints(self):
        el = element_from_json(
            {"kind": "line", "x1": "a", "y1": 1, "x2": "b", "y2": 2, "color": "c"}
        )
        assert el.prop_names() == ("x1", "y1", "x2", "y2", "color")

    def test_unknown_kind(self):
        with pytest.raises(ExampleError) as info:
            element_from_json({"kind": "pie", "x": 1, "y": 2}, index=3)
        assert info.value.field == "elements[3].kind"

    def test_missing_required_prop(self):
        with pytest.raises(ExampleError) as info:
            element_from_json({"kind": "point", "x": 1}, index=0)
        assert info.value.field == "elements[0].y"

    def test_off_vocabulary_prop(self):
        with pytest.raises(ExampleError) as info:
            element_from_json({"kind": "line", "x1": 1, "y1": 2, "x2": 3,
                               "y2": 4, "shape": "s"}, index=1)
        assert info.value.field == "elements[1].shape"

    def test_point_rejects_y2(self):
        with pytest.raises(ExampleError) as info:
            element_from_json({"kind": "point", "x": 1, "y": 2, "y2": 3})
        assert info.value.field == "element.y2"

    @pytest.mark.parametrize("bad", [None, True, [1], {"v": 1}])
    def test_bad_value_types(self, bad):
        with pytest.raises(ExampleError) as info:
            element_from_json({"kind": "point", "x": bad, "y": 2}, index=0)
        assert info.value.field == "elements[0].x"

    def test_not_an_object(self):
        with pytest.raises(ExampleError):
            element_from_json(["kind", "point"], index=0)

    def test_elements_must_be_nonempty(self):
        with pytest.raises(ExampleError) as info:
            elements_from_json([])
        assert info.value.field == "elements"
        with pytest.raises(ExampleError):
            elements_from_json({"kind": "point"})

    def test_roundtrip(self):
        doc = {"kind": "bar", "x": "09-05", "y": 64.4, "y2": 87.8}
        assert element_to_json(element_from_json(doc)) == doc


class TestSpecJson:
    def test_layer_roundtrip(self):
        built = layer(Mark.BAR, x="Date", y="Low", y2="High")
        doc = layer_to_json(built)
        assert doc == {
            "mark": "bar",
            "encodings": {"x": "Date", "y": "Low", "y2": "High"},
        }

    def test_spec_roundtrip(self):
        spec = VisSpec(
            (layer(Mark.LINE, x="a", y="b"), layer(Mark.BAR, x="a", y="c", y2="d"))
        )
        assert spec_from_json(spec_to_json(spec)) == spec

    def test_spec_from_json_validates(self):
        with pytest.raises(SchemaError):
            spec_from_json({"layers": [{"mark": "line",
                                        "encodings": {"x": "a", "y2": "b"}}]})

    def test_spec_from_json_bad_shape(self):
        with pytest.raises(SchemaError):
            spec_from_json({"nope": []})
        with pytest.raises(SchemaError):
            spec_from_json({"layers": [{"mark": "donut", "encodings": {}}]})
