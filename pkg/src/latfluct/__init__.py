"""Fluctuations of lattice point counts in dilated disks.

The package samples Haar-random unimodular planar lattices, counts
lattice points in dilated disks exactly, evaluates the oscillatory
weight function phi and truncated spectral sums, draws the heavy-tailed
limit law of the normalized counting error, and runs the Monte Carlo
experiments that check the distributional claims tying them together.
"""

from .counting import (EllipseForm, ErrorSample, count_points,
                       count_points_ellipse, counts_for_frames,
                       ellipse_to_disk, error_sample, error_samples_batch)
from .errors import ContractViolation, InvariantViolation
from .experiments import (ExperimentReport, compare_laws, delta_experiment,
                          equidistribution_experiment, error_law_experiment,
                          minima_law_check, phase_statistics,
                          siegel_mean_check, tail_report, verify_identities)
from .haar import (DensitySpec, SamplerConfig, sample_haar, sample_haar_batch,
                   sample_frames, sample_weighted, sample_weighted_detail)
from .lattice import (Basis2, FrameBatch, PrimeIndex, ReducedFrame,
                      ShapeCoords, dual, dual_stack, enumerate_prime_indices,
                      gauss_reduce, is_prime_vector, reduce_batch,
                      shape_coords)
from .limitlaw import (LimitConfig, WeightDistribution, convergence_probe,
                       draw_stream, limit_values, phi_weights,
                       rademacher_weights, sample_limit, sample_limit_batch,
                       tail_sigma, weighted_siegel, weighted_sums_batch)
from .reporting import (REPORT_SCHEMA, ErrorRowSet, LatticeSampleSet,
                        LimitSampleSet, emit, render, report_to_dict)
from .rng import Stream, derive_key, index_key, mix64, stream64
from .spectral import (OvalGeometry, PhiEvaluator, default_evaluator, h_sum,
                       kernel_phi_table, oval_geometry, phi, phi_grid,
                       phi_many, s_a_prime, theta_k, w_coefficient,
                       z_free_witness)
from .stats import (EmpiricalDistribution, bootstrap_ci, chi_square_uniform,
                    hill_tail_index, ks_distance)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
