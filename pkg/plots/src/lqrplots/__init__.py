"""Figure rendering for sparse-disturbance LQR experiment CSVs."""

from .render import (
    FigureSpec,
    KINDS,
    POLICY_STYLE,
    REQUIRED_COLUMNS,
    SchemaError,
    read_table,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "KINDS",
    "POLICY_STYLE",
    "REQUIRED_COLUMNS",
    "SchemaError",
    "read_table",
    "render",
    "__version__",
]
