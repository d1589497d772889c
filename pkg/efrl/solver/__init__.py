"""Evolve-Filter time stepping and initial conditions."""

from .initial import *
from .rollout import *
from .state import *
from .steps import *
