"""Plot scripts for lookup-batching sweep CSVs."""

from .render import (FIGURE_KINDS, FigureSpec, load_rows, render,
                     series_structure)

__version__ = "0.1.0"
