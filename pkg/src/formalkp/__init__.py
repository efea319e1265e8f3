"""Exact formal pseudodifferential calculus, KP hierarchy solver, renormalized traces and PC gauge tools."""

__version__ = "0.1.0"

from .scalar import QI
from .fourier import FourierPoly
from .symbol import FormalSymbol, sym_compose, sym_bracket, psido, phi_map, residues, pairing_res
from .powers import complex_power
from .timeseries import TimeSeriesOperator
from .kp import (KPSolution, kp_solve, kp_fcl_solve, kp_complex_solve, hkp_from_classical,
                 kp_residual, sato_wilson_residual, kp_conserved, mulase_factorize)
from .bandop import BandOperator, ClassViolation, op_build, op_mul, op_bracket
from .zeta import ExactValue, renorm_trace, res_zeta, schwinger_cocycle
from .groups import GL, SO2, Affine, PosReal
from .pc import PCMatrix, pc_is_consistent, gauge_act, koczkodaj_kii, graph_holonomy
from .lattice import PolyForm, Triangulation, transport, simplex_holonomy, discretize_connection

__all__ = [name for name in dir() if not name.startswith("_")]
