"""Periodic-grid fields, spectral operators and snapshot files."""

from .grid import *
from .operators import *
from .snapshot import *
