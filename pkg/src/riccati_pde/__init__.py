"""Explicit solutions of nonlocal nonlinear PDEs through a linear Riccati
relation and a single Fredholm solve, with direct pseudo-spectral solvers
to check them against."""

from .errors import BlowUp, NearSingular, PoleEncountered, RiccatiError
from .grid import FOURIER, PHYSICAL, Grid1D, Symbol, make_grid
from .kernels import BlockKernel, Kernel2D, StarSeries
from .riccati import (
    OddDegreeProblem,
    QuadraticProblem,
    RiccatiSolution,
    conv_riccati_solution,
    fkpp_solution,
    solve_odd,
    solve_quadratic,
)

__version__ = "0.1.0"

__all__ = [
    "BlockKernel",
    "BlowUp",
    "FOURIER",
    "Grid1D",
    "Kernel2D",
    "NearSingular",
    "OddDegreeProblem",
    "PHYSICAL",
    "PoleEncountered",
    "QuadraticProblem",
    "RiccatiError",
    "RiccatiSolution",
    "StarSeries",
    "Symbol",
    "conv_riccati_solution",
    "fkpp_solution",
    "make_grid",
    "solve_odd",
    "solve_quadratic",
]
