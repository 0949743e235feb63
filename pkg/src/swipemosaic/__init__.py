"""Swipe mosaics: probabilistic 2D visual odometry and layout for image
sequences, browsable in an interactive swipe viewer.

The pipeline estimates a Gaussian over the planar camera translation (and
optical-axis rotation) between image pairs with a regression random forest
over NCC-derived features, solves for global frame positions by weighted
linear least squares with loop closure, and exports a viewer manifest.
"""

from .evaluation import (CameraPose, best_fit_plane, evaluate_pipeline,
                         interpolate_ground_truth, ncc_align,
                         parse_tum_trajectory, procrustes_align,
                         project_to_plane)
from .features import (FEATURE_DIM, build_gabor_bank, compute_ncc,
                       extract_features, feature_dim, window_geometry)
from .forest import (Forest, ForestConfig, MotionEstimate, deserialize,
                     load_forest, predict, save_forest, serialize, train)
from .frames import Frame, load_frame
from .layout import (LayoutSolution, PairSet, close_loops, crop_for_rotation,
                     find_loop_points, select_pairs, solve_layout,
                     solve_rotations)
from .pipeline import MosaicManifest, PipelineConfig, ingest, run_pipeline
from .synth import (LabeledPair, SceneSpec, generate_dataset,
                    generate_rotation_pair, generate_translation_pair,
                    make_scene_spec, render_sequence)

__version__ = "0.1.0"
