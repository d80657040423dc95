# Copyright 2026 The flatnoise Authors
# SPDX-License-Identifier: Apache-2.0
"""Python access to the flatnoise training and evaluation core."""

import json
import os

from ._core import (
    ConfigError,
    DomainError,
    IdxError,
    NumericError,
    aggregate,
    cosine_lr,
    gen_blobs,
    gen_spirals,
    h_term,
    load_idx,
    run_cli,
    strength_at,
)
from . import _core

__all__ = [
    "ConfigError",
    "DomainError",
    "IdxError",
    "NumericError",
    "aggregate",
    "config_hash",
    "cosine_lr",
    "evaluate",
    "gen_blobs",
    "gen_spirals",
    "h_term",
    "load_idx",
    "run_cli",
    "strength_at",
    "train",
]


def config_hash(config):
    return _core.config_hash(json.dumps(config))


def train(config, output_dir):
    """Trains every seed of `config` (a dict) and returns per-seed summaries."""
    return json.loads(_core.train_json(json.dumps(config), os.fspath(output_dir)))


def evaluate(checkpoints, sigma_test=None, draws=10, seed=None, split="test"):
    if isinstance(checkpoints, (str, os.PathLike)):
        checkpoints = [checkpoints]
    paths = [os.fspath(p) for p in checkpoints]
    sigmas = None if sigma_test is None else [float(s) for s in sigma_test]
    return json.loads(_core.eval_json(paths, sigmas, draws, seed, split))
