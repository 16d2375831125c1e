"""Finite-N analytic objects of the coupled ensemble."""
from coupledsv.ensemble.biorthogonal import BiorthogonalSystem, raw_phi, raw_psi
from coupledsv.ensemble.parameters import CouplingParameters, make_parameters
from coupledsv.ensemble.recurrence import RecurrenceCoefficients, recurrence_a, recurrence_b

__all__ = [
    "BiorthogonalSystem", "CouplingParameters", "RecurrenceCoefficients",
    "make_parameters", "raw_phi", "raw_psi", "recurrence_a", "recurrence_b",
]
