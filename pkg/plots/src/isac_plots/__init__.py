"""Paper-style figures from the experiment runner's CSV outputs.

This package reads only the documented CSV schemas (plus the run.json
manifest); it never imports the simulation library.
"""

from .figures import FIGURES, SchemaError, render

__version__ = "0.1.0"
