# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The epsnode Authors
# ------------------------------------------------------------------------
"""UWB novelty detection with overcomplete autoencoders."""

from ._core import (
    Autoencoder,
    Environment,
    MeasurementSet,
    ModelBundle,
    anchor_error,
    enumerate_space,
    estimate_range,
    feature_matrix,
    find_peaks,
    fit_pca,
    fit_scaler,
    generate_dataset,
    ground_truth_density,
    kde,
    kl_divergence,
    load_bundle,
    load_dataset,
    moving_average,
    preset,
    preset_names,
    render_ascii,
    score,
    synthesize_cir,
    total_error,
    train,
    train_bundle,
    uniform_density,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
