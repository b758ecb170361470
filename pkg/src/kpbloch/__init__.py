"""Bloch eigenvalues and gaps of the Kronig-Penney operator by truncated-series fixed points."""
from .asymptotics import GapPrediction, condition_c, eigen_asym, gap_prediction
from .oracle import Monodromy, SpectralTable, bands_and_gaps, discriminant, find_eigen, monodromy
from .potential import KroneckerPotential, PotentialError, new_potential, q_fourier
from .series import SectorIndex, SectorKind, TruncationParams, antiperiodic, first, periodic
from .solver import Condition, EigenSolution, solve, solve_pair, solve_spectrum

__all__ = [
    "GapPrediction", "condition_c", "eigen_asym", "gap_prediction",
    "Monodromy", "SpectralTable", "bands_and_gaps", "discriminant", "find_eigen", "monodromy",
    "KroneckerPotential", "PotentialError", "new_potential", "q_fourier",
    "SectorIndex", "SectorKind", "TruncationParams", "antiperiodic", "first", "periodic",
    "Condition", "EigenSolution", "solve", "solve_pair", "solve_spectrum",
]
