"""SVD framelet transforms and graph convolutions for directed graphs."""
from .errors import (
    ConfigError,
    DatasetError,
    DimensionError,
    GraphBoundsError,
    GraphFormatError,
    SpectralError,
    SvdGcnError,
    VariantError,
)
from .framelets import ChebFilter, Family, ModulationSet, check_identity, eval_modulation
from .graph import DirectedGraph, degrees, load_edge_list, normalized_adjacency
from .kernels import BACKEND
from .operators import (
    FrameletConfig,
    FrameletOperators,
    Variant,
    build_cheb_operators,
    build_exact_operators,
    decompose,
    reconstruct,
    verify_theorem1,
)
from .spectral import SvdFactors, compute_svd

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChebFilter",
    "ConfigError",
    "DatasetError",
    "DimensionError",
    "DirectedGraph",
    "Family",
    "FrameletConfig",
    "FrameletOperators",
    "GraphBoundsError",
    "GraphFormatError",
    "ModulationSet",
    "SpectralError",
    "SvdFactors",
    "SvdGcnError",
    "Variant",
    "VariantError",
    "build_cheb_operators",
    "build_exact_operators",
    "check_identity",
    "compute_svd",
    "decompose",
    "degrees",
    "eval_modulation",
    "load_edge_list",
    "normalized_adjacency",
    "reconstruct",
    "verify_theorem1",
]
