#!/usr/bin/env python
from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version(__name__)
except PackageNotFoundError:
    # running from a source checkout
    __version__ = "0.0.0"


# isort: off

# many modules log through efrl.logger -> has to be loaded first
from ._config import *

# isort: on

from .constants import *
from .dqn import *
from .env import *
from .fields import *
from .metrics import *
from .rewards import *
from .solver import *
