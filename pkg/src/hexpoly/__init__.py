"""Exact computations for the hexagonal polygon model on the torus."""

from .kasteleyn import correlation_M, log_partition_Z, partition_Z
from .lattice import build_aug_fisher, build_fisher, build_hex_torus, build_path, nw_pair
from .limits import fourier_kinv, lambda_estimate, m_inf_squared
from .params import DimerWeights, HalfEdgeWeights, OneTwoParams, PolygonParams
from .spectral import classify, phase_boundaries, symmetry_orbit, uvst

__version__ = "0.1.0"

__all__ = [
    "DimerWeights",
    "HalfEdgeWeights",
    "OneTwoParams",
    "PolygonParams",
    "build_aug_fisher",
    "build_fisher",
    "build_hex_torus",
    "build_path",
    "classify",
    "correlation_M",
    "fourier_kinv",
    "lambda_estimate",
    "log_partition_Z",
    "m_inf_squared",
    "nw_pair",
    "partition_Z",
    "phase_boundaries",
    "symmetry_orbit",
    "uvst",
]
