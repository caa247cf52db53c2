"""Certify exact recovery of planted k-means clusterings by the Peng-Wei SDP.

The package builds an explicit dual certificate for the k-means SDP at a
candidate clustering, samples stochastic-ball instances, and runs
phase-transition sweeps, Monte-Carlo checks and brute-force cross-checks.
"""

__version__ = "0.1.0"

from .certificate import (
    MODES,
    CertificateDegenerate,
    CertificateParts,
    CertificateReport,
    alpha_from_z,
    assemble_Q,
    build_B,
    build_certificate,
    build_E,
    build_M,
    certify,
    compute_z,
    distance_matrix,
    lemma42_decomposition,
)
from .clustering import Clustering, brute_force, lloyd, objective_centroid, objective_pairwise
from .model import (
    BallConfig,
    LabeledPointCloud,
    RadialDistribution,
    cond_gamma,
    generate,
    read_cloud,
    sample_offset,
    separation_threshold,
    write_cloud,
)
