"""Helicity entanglement generated by consecutive tree-level QED scatterings."""

from .amplitude import (HelicityAmplitudeTable, amplitude_table, t_channel_amplitude,
                        unpolarized_oracle)
from .cascade import (CoefficientTensor, DensityMatrix, cascade_coefficients,
                      density_matrix, partial_trace, purity)
from .entangle import (ConcurrenceReport, concurrence, monogamy_residual,
                       pairwise_concurrences, pure_bipartite_concurrence,
                       pure_pair_concurrence, spin_flip)
from .relkin import (M_ELECTRON, M_PROTON, CascadeKinematics, FourMomentum,
                     ScatterGeometry, build_cascade, solve_scattering)
from .sweep import (Measure, OptimumReport, ScanGrid, Scenario, analytic_popt,
                    optimize_momentum)

__all__ = [
    "HelicityAmplitudeTable", "amplitude_table", "t_channel_amplitude", "unpolarized_oracle",
    "CoefficientTensor", "DensityMatrix", "cascade_coefficients", "density_matrix",
    "partial_trace", "purity",
    "ConcurrenceReport", "concurrence", "monogamy_residual", "pairwise_concurrences",
    "pure_bipartite_concurrence", "pure_pair_concurrence", "spin_flip",
    "M_ELECTRON", "M_PROTON", "CascadeKinematics", "FourMomentum", "ScatterGeometry",
    "build_cascade", "solve_scattering",
    "Measure", "OptimumReport", "ScanGrid", "Scenario", "analytic_popt", "optimize_momentum",
]

__version__ = "0.1.0"
