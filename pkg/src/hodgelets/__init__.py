"""Spectral wavelet dictionaries for edge flows on simplicial complexes."""

from .complex import (
    ComplexError,
    Geometry,
    HexMeta,
    SimplicialComplex,
    boundary_1,
    boundary_2,
    delaunay,
    from_simplices,
    hex_complex,
    punch_hole,
)
from .dictionary import (
    Dictionary,
    FrameBounds,
    analyze,
    dual_reconstruct,
    frame_bounds_empirical,
    frame_bounds_joint,
    frame_bounds_separate,
    joint_dictionary,
    separate_dictionary,
    subspace_residual,
)
from .kernels import FunctionBank, HannBank, hann_bank, normalize_on_spectrum
from .spectral import (
    SpectralDecomposition,
    eigendecompose,
    hodge_decompose,
    hodge_operators,
    hodge_spectra,
    linegraph_laplacian,
    sft,
)
from .sparse import SparseApproximation, omp, sparsity_curve
from .clustering import ClusterModel, alignment_score, sparse_kmeans, train_test_split
from .flows import discretize_field, lift_trajectory, paper_field, parse_trajectories, synthetic_trajectories

__version__ = "0.1.0"
