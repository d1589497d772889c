"""Energy diagnostics, spectra, global errors and metric files."""

from .diagnostics import *
from .errors import *
from .export import *
