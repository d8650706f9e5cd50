"""Time-dependent elliptic billiards: slow-fast maps, separatrix splitting
and Fermi acceleration along the major axis."""

from .accelerator import critical_times, run_ifs, switching_band
from .boundary import BoundaryModel, TrigPoly, load_config, parse_config
from .dynmap import PhaseState, linear_response, step_full
from .elliptic import EllipticContext, jacobi, solve_modulus
from .frozen import FrozenState, integral_I, step_frozen
from .inner import CylinderState, H_in, flow_in, step_inner
from .melnikov import Domain, SplittingConfig, in_domain
from .scattering import H_out, S_truncated, flow_out

__all__ = [
    "BoundaryModel",
    "CylinderState",
    "Domain",
    "EllipticContext",
    "FrozenState",
    "H_in",
    "H_out",
    "PhaseState",
    "S_truncated",
    "SplittingConfig",
    "TrigPoly",
    "critical_times",
    "flow_in",
    "flow_out",
    "in_domain",
    "integral_I",
    "jacobi",
    "linear_response",
    "load_config",
    "parse_config",
    "run_ifs",
    "solve_modulus",
    "step_frozen",
    "step_full",
    "step_inner",
    "switching_band",
]
