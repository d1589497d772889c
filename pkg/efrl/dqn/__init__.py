"""Deep Q-learning on numpy arrays."""

from .adam import *
from .agent import *
from .checkpoint import *
from .network import *
from .replay import *
from .training import *
