"""The filter-radius decision process."""

from .actions import *
from .episode import *
from .references import *
