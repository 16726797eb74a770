"""Vector-chart rendering for semcom experiment CSV datasets."""

from .render import (
    FIGURES,
    EmptyDataset,
    FigureSpec,
    MissingColumn,
    PlotError,
    default_spec,
    render,
    render_all,
)

__version__ = "0.1.0"
