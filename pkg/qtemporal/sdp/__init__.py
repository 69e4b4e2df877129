from qtemporal.sdp.dump import dump_problem, load_problem
from qtemporal.sdp.embedding import embed_hermitian
from qtemporal.sdp.ipm import solve_sdp
from qtemporal.sdp.lp import solve_lp
from qtemporal.sdp.problem import (
    LmiBlock,
    LpProblem,
    LpSolution,
    SdpProblem,
    SdpSolution,
    check_certificate,
)

__all__ = [
    "LmiBlock",
    "LpProblem",
    "LpSolution",
    "SdpProblem",
    "SdpSolution",
    "check_certificate",
    "dump_problem",
    "embed_hermitian",
    "load_problem",
    "solve_lp",
    "solve_sdp",
]
