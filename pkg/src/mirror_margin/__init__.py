"""Mirror descent on separable data, horizon functions of potentials and max-margin solvers."""
from .data import Dataset, check_separable, generate_blobs, margin_of
from .exceptions import (ContractError, DegenerateShapeError, GenerationError, GeometryError, InfeasibleError,
                         LimitError, MirrorMarginError, NumericError)
from .flow import FlowConfig, Trajectory, limit_diagnostics, run, step
from .horizon import (Gauge, HorizonShapeProbe, LimitGauge, NormGauge, SampledGauge, gauge_from_probe,
                      gauge_subdifferential, horizon_gauge, horizon_separable, horizon_shape_numeric)
from .losses import ExponentialLoss, LogisticLoss, get_loss
from .margin import (MarginProblem, MarginSolution, angular_sweep_oracle, directional_gap, kkt_verify,
                     solve_max_margin)
from .potentials import (CoshEntropy, CustomScalar, GeneralPotential, HypEntropy, PowerP, Quadratic,
                         SeparablePotential, potential_from_spec)

__version__ = "0.1.0"
