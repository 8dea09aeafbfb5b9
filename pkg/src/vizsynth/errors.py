"""Exception types shared across the pipeline."""


class VizSynthError(Exception):
    """Base class for all library errors."""


class MalformedCsv(VizSynthError):
    """CSV input is not valid UTF-8 or has ragged rows."""


class EmptyTable(VizSynthError):
    """A table was constructed or loaded with zero data rows."""


class EvalError(VizSynthError):
    """Base class for transformation evaluation failures.

    ``op_index`` is the position of the failing operator within the program,
    or None when the failure is not tied to a specific operator.
    """

    def __init__(self, message, op_index=None):
        super().__init__(message)
        self.op_index = op_index


class SchemaError(EvalError):
    """An operator referenced a column missing from its input schema."""


class TypeMismatch(EvalError):
    """An operator was applied to a column of an unsupported type."""


class PivotCollision(EvalError):
    """pivot_wider found two rows with the same (key, name) pair."""


class DivisionByZero(EvalError):
    """mutate division encountered a zero divisor cell."""


class EmptyGroupAggregate(EvalError):
    """group_summarise aggregated a group whose target cells are all missing."""


class ProgramParseError(VizSynthError):
    """Canonical program text could not be parsed."""


class ExampleError(VizSynthError):
    """An example element is malformed (bad kind, missing or invalid props)."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class TooManyLayers(VizSynthError):
    """Example elements partition into more layers than supported."""


class InconsistentGroup(VizSynthError):
    """Elements in one layer group disagree on kind or property set."""
