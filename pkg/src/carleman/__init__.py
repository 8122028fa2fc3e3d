"""Carleman (area-orthonormal) polynomials on disks and lemniscates, their asymptotics and zeros."""
from . import asymptotics, checks, geometry, ortho, special, zeros
from .errors import (
    CarlemanError,
    CoincidenceError,
    ConvergenceError,
    DegenerateInput,
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    PoleError,
    RangeError,
    RankDeficiency,
)
from .geometry import disk, lemniscate
from .poly import Poly

__version__ = "0.1.0"
