"""Deterministic CONGEST construction of near-additive spanners, with an exact verifier."""

from .errors import BandwidthViolation, ConfigError, DeterminismError, InputError, ProtocolError
from .generators import generate
from .graph import Graph, ball_centers, bfs, read_edge_list, write_edge_list
from .protocol import build_spanner
from .schedule import PhaseSchedule, build_schedule
from .verifier import VerificationReport, verify

__version__ = "0.1.0"

__all__ = [
    "BandwidthViolation",
    "ConfigError",
    "DeterminismError",
    "Graph",
    "InputError",
    "PhaseSchedule",
    "ProtocolError",
    "VerificationReport",
    "ball_centers",
    "bfs",
    "build_schedule",
    "build_spanner",
    "generate",
    "read_edge_list",
    "verify",
    "write_edge_list",
]
