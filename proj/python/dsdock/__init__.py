# SPDX-License-Identifier: Apache-2.0
"""Surrogate docking engine: SMILES graphs, GNN surrogates, ranking metrics."""

from ._dsdock import (
    Molecule,
    aurtc,
    auroc,
    compute_speedup,
    dock,
    generate_library,
    predict,
    recall_at,
    res_score,
    train_surrogate,
)

__all__ = [
    "Molecule",
    "aurtc",
    "auroc",
    "compute_speedup",
    "dock",
    "generate_library",
    "predict",
    "recall_at",
    "res_score",
    "train_surrogate",
]
