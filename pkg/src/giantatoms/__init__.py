"""Scattering observables for two giant two-level atoms on a 1D waveguide.

Closed-form single- and two-photon scattering amplitudes for the separate,
braided, and nested coupling layouts, the photon-pair observables built on
the two-photon bound state (incoherent spectra, inelastic flux, differential
and normalized second-order correlations), and an independent two-qubit
Lindblad master-equation oracle used to cross-validate all of it.
"""

__version__ = "0.1.0"

from .core import (PhotonPair, Poles, SystemParams, Topology, TOPOLOGIES,
                   collective_shift_and_rate, parity_map, system_poles)
from .errors import (DarkChannel, DegenerateChannel, DenominatorCollision,
                     GiantAtomsError, NonUniqueSteadyState, PoleOnGrid,
                     SingularGreen)
from .observables import (CorrelationSeries, LossModel, SpectrumSeries,
                          apply_loss, differential_correlation,
                          g2_normalized, incoherent_spectrum,
                          pair_production_amplitude, spectral_roots,
                          total_flux, total_flux_quadrature)
from .single_photon import (SinglePhotonSolution, left_moving_solution,
                            scatter_single, transfer_matrix_solution)
from .two_photon import (BoundState, GreenElements, bound_state,
                         bound_state_eval, green_elements,
                         two_photon_amplitude)

__all__ = [
    "__version__",
    "Topology", "TOPOLOGIES", "SystemParams", "PhotonPair", "Poles",
    "collective_shift_and_rate", "system_poles", "parity_map",
    "SinglePhotonSolution", "scatter_single", "left_moving_solution",
    "transfer_matrix_solution",
    "GreenElements", "BoundState", "green_elements", "bound_state",
    "bound_state_eval", "two_photon_amplitude",
    "SpectrumSeries", "CorrelationSeries", "LossModel",
    "spectral_roots", "pair_production_amplitude", "incoherent_spectrum",
    "total_flux", "total_flux_quadrature", "differential_correlation",
    "g2_normalized", "apply_loss",
    "GiantAtomsError", "DegenerateChannel", "SingularGreen",
    "DenominatorCollision", "DarkChannel", "PoleOnGrid",
    "NonUniqueSteadyState",
]
