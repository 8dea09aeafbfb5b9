"""Synthesize (table transform, chart spec) pairs from an input table and a
handful of example geometry elements."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DivisionByZero,
    EmptyGroupAggregate,
    EmptyTable,
    EvalError,
    ExampleError,
    InconsistentGroup,
    MalformedCsv,
    PivotCollision,
    ProgramParseError,
    SchemaError,
    TooManyLayers,
    TypeMismatch,
    VizSynthError,
)
from .table import ColumnType, Table, cell_equal, load_csv  # noqa: F401
from .transforms import (  # noqa: F401
    TransformProgram,
    complexity,
    contains,
    eval_program,
    parse,
    serialize,
)
from .grammar import ExampleElement, Mark, Channel, elements_from_json  # noqa: F401
from .decompiler import LayerSketch, decompile  # noqa: F401
from .synthesizer import ConstantPool, SearchConfig, synthesize_layer  # noqa: F401
from .compiler import Candidate, dumps_vegalite, to_vegalite  # noqa: F401
from .pipeline import SynthesisOutcome, synthesize  # noqa: F401
