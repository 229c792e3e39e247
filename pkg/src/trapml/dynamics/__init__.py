"""Fields, generating-function ansatz, evolution matrices and stability."""
from .ansatz import (AnsatzValidityReport, ConstantFieldAnsatz,
                     OddHarmonicAnsatz, SLOPE_TOL, ZERO_WINDOW,
                     ansatz_field_residual, ansatz_top_row,
                     evolution_from_ansatz, field_from_ansatz,
                     stiffness_from_ansatz, stiffness_rate_from_ansatz,
                     validate_ansatz)
from .evolution import (EvolutionMatrix, EvolutionPath, StabilityClass,
                        classify_stability, detect_loop, integrate_evolution,
                        integrate_on_grid, loop_distance)
from .fields import (ElasticField, constant_field, custom_field,
                     field_from_magnetic_length, harmonic_field)

__all__ = [
    "AnsatzValidityReport", "ConstantFieldAnsatz", "OddHarmonicAnsatz",
    "SLOPE_TOL", "ZERO_WINDOW", "ansatz_field_residual", "ansatz_top_row",
    "evolution_from_ansatz", "field_from_ansatz", "stiffness_from_ansatz",
    "stiffness_rate_from_ansatz", "validate_ansatz",
    "EvolutionMatrix", "EvolutionPath", "StabilityClass", "classify_stability",
    "detect_loop", "integrate_evolution", "integrate_on_grid", "loop_distance",
    "ElasticField", "constant_field", "custom_field",
    "field_from_magnetic_length", "harmonic_field",
]
