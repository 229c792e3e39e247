"""trapml: machine learning on canonical variables in time-dependent traps."""
from .config import RunConfig
from .datagen import (Dataset, Trajectory, add_noise, evolve_canonical,
                      label_by_median, label_by_quantiles,
                      make_trajectory_dataset, split_dataset)
from .dynamics import (AnsatzValidityReport, ConstantFieldAnsatz,
                       ElasticField, EvolutionMatrix, EvolutionPath,
                       OddHarmonicAnsatz, StabilityClass,
                       ansatz_field_residual, classify_stability,
                       constant_field, custom_field, detect_loop,
                       evolution_from_ansatz, field_from_ansatz,
                       field_from_magnetic_length, harmonic_field,
                       integrate_evolution, integrate_on_grid, loop_distance,
                       stiffness_from_ansatz, validate_ansatz)
from .errors import (ConfigError, DomainError, IntegrationError,
                     SingularAnsatzError, TrapmlError)
from .learning import (ClassifierModel, FitReport, MulticlassModel,
                       RegressionModel, classification_cost, fit_classifier,
                       fit_multiclass, fit_regression, regression_cost)
from .metrics import (classification_summary, confusion, r2, rmse,
                      roc_and_auc)
from .optimize import (OptimizationTrace, OptimizerConfig, ParameterSpace,
                       bayes_minimize, expected_improvement, random_search)
from .rng import PortableRng
from .wavepacket import (GaussianState, density, fit_density_regression,
                         make_density_dataset, propagate_gaussian)

__version__ = "0.1.0"
