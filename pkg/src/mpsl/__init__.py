"""Spectral features of image datasets via local sheaf Laplacians.

The pipeline vectorizes an image dataset, sweeps PCA embedding
dimensions, builds a local clique complex around every image in every
embedding, attaches a distance-kernel sheaf, and summarizes the spectra
of the order-0/1 (optionally persistent) sheaf Laplacians into feature
vectors that a k-NN classifier evaluates under seeded cross-validation.
"""

from .complexes import LocalComplex, NeighborGraph, knn_graph, local_complex, sublevel
from .embed import (DistanceMatrix, Embedding, PCAModel, fit_pca,
                    pairwise_distances, project)
from .evaluation import (CVConfig, EvalReport, MetricSet, cross_validate,
                         kfold_indices, knn_predict, metrics)
from .features import (FeatureMatrix, SpectrumStats, Standardizer,
                       assemble_features, export_csv, feature_names,
                       fit_standardizer, select_dim, spectrum_stats)
from .ingest import (DatasetError, DatasetMatrix, ImageRecord,
                     MagicNumberError, MatrixFormatError, TruncatedFileError,
                     load_dataset, load_matrix, read_netpbm, resize_bilinear,
                     save_matrix, to_grayscale, vectorize, write_pgm, write_ppm)
from .pipeline import (RunConfig, config_from_mapping, extract_features,
                       parse_config_file, run_sweep)
from .report import render_report
from .rng import Xoshiro256StarStar
from .sheaf import (CoboundaryPair, SheafAssignment, build_sheaf, coboundaries,
                    kernel, local_sigma)
from .spectral import (LaplacianMatrix, Spectrum, eigenvalues, laplacian,
                       persistent_laplacian, persistent_laplacian_pair,
                       schur_restriction)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
