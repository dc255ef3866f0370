"""Semidefinite games: zero-sum solving through SDPs, Nash certificates and Dantzig's reduction."""

from .errors import ContractViolation, NumericalFailure, SdGameError, UnsupportedConfiguration
from .games import SemidefiniteGame, embed_bimatrix, payoff, payoff_tensor
from .nash import NashCertificate, best_response, verify_nash
from .sdp import SdpProblem, SdpSolution, Sense, Status, solve
from .zerosum import ZeroSumSolution, solve_zero_sum
from .dantzig import DantzigGame, build_dantzig_game, extract_sdp_solution, solve_symmetric_game

__version__ = "0.1.0"

__all__ = [
    "ContractViolation", "NumericalFailure", "SdGameError", "UnsupportedConfiguration",
    "SemidefiniteGame", "embed_bimatrix", "payoff", "payoff_tensor",
    "NashCertificate", "best_response", "verify_nash",
    "SdpProblem", "SdpSolution", "Sense", "Status", "solve",
    "ZeroSumSolution", "solve_zero_sum",
    "DantzigGame", "build_dantzig_game", "extract_sdp_solution", "solve_symmetric_game",
]
