"""Geodesics on the jet space J^k: Hill intervals, geodesic flow, period and holonomy certificates."""

from .action_angle import (ActionAngleTrace, action_angle_trace, angle_phi_h, angle_phi_time,
                           calibration_check, dPi_dh, generating_function)
from .config import ScenarioConfig
from .errors import (BadInitialEnergy, ConfigError, CriticalEndpoint, IdenticallyZero,
                     InconsistentComputation, IntegratorError, JetGeodesicError, NoConvergence,
                     NoHillInterval, OutsideHill, PerturbationLeavesClass, StepSizeUnderflow,
                     UnboundedInterval)
from .flow import State, Trajectory, initial_state, integrate, level_set_momenta, vector_field
from .hill import EndpointKind, GeoClass, HillInterval, LoopShape, classify_loop, hill_intervals
from .holonomy import (PeriodReport, Verdict, adiabatic_invariant, certify, dPi_da, gram_lambda_min,
                       gram_matrix, holonomy, period)
from .poly import Polynomial, Root, RootList, derivative, eval_poly, real_roots, translate
from .quadrature import QuadratureSpec, integrate_regular, integrate_singular

__version__ = "0.1.0"
