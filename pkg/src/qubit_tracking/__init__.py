"""Tracking control of a driven two-level system under dephasing and thermal noise."""
__version__ = "0.1.0"

from .coherence import (AsymptoticCoherence, CoherenceSolution, SteadyState, asymptotic_coherence,
                        coherence_constant_population, coherence_general, coherence_unitary,
                        integral_I1_sine_squared, integral_I2_sine_squared, lam, solve_coherence,
                        steady_state_coherence)
from .errors import (CapabilityError, DomainError, InfeasiblePrescriptionError,
                     InfeasibleStateError, IntegrationError, PrescriptionError, ProfileError,
                     SingularityError)
from .model import (MixednessConstant, NoiseRates, QubitState, SystemParams, derive_rates,
                    mixedness_constant)
from .profiles import (WHOLE_INTERVAL, PhaseProfile, PopulationProfile, crossing_times,
                       eval_phase, eval_population, validate_prescription)
from .propagate import (Trajectory, convergence_check, extract_phase, propagate_lab,
                        propagate_rwa, tracking_errors)
from .reachability import (Access, AsymptoticCurve, ReachabilityGrid, accessibility_map,
                           asymptotic_curve, classify_transition, steady_table)
from .synthesis import ControlField, envelope, sample_waveform, synthesize

__all__ = [
    "Access", "AsymptoticCoherence", "AsymptoticCurve", "CapabilityError", "CoherenceSolution",
    "ControlField", "DomainError", "InfeasiblePrescriptionError", "InfeasibleStateError",
    "IntegrationError", "MixednessConstant", "NoiseRates", "PhaseProfile", "PopulationProfile",
    "PrescriptionError", "ProfileError", "QubitState", "ReachabilityGrid", "SingularityError",
    "SteadyState", "SystemParams", "Trajectory", "WHOLE_INTERVAL", "accessibility_map",
    "asymptotic_coherence", "asymptotic_curve", "classify_transition",
    "coherence_constant_population", "coherence_general", "coherence_unitary",
    "convergence_check", "crossing_times", "derive_rates", "envelope", "eval_phase",
    "eval_population", "extract_phase", "integral_I1_sine_squared", "integral_I2_sine_squared",
    "lam", "mixedness_constant", "propagate_lab", "propagate_rwa", "sample_waveform",
    "solve_coherence", "steady_state_coherence", "steady_table", "synthesize",
    "tracking_errors", "validate_prescription",
]
