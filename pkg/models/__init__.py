"""Domain models and errors."""

from .errors import *
from .models import *
