"""Self-verification of the Fisher-information closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import fim_monte_carlo_oracle
from .rng import RandomStream


@dataclass
class FimVerification:
    """Sharded Monte-Carlo estimate of the joint FIM vs its closed forms."""

    matrix: np.ndarray
    expected: np.ndarray
    stderr: np.ndarray
    diag_rel_err: float
    offdiag_max_sigma: float
    ok: bool


def expected_fim(g: float, dt: float, dim: int) -> np.ndarray:
    """Closed-form joint FIM: (dt/g^2) I on the drift block, 2*dim/g^2 for g."""
    mat = np.zeros((dim + 1, dim + 1))
    mat[np.arange(dim), np.arange(dim)] = dt / (g * g)
    mat[dim, dim] = 2.0 * dim / (g * g)
    return mat


def verify_fim(g: float, dt: float, dim: int, n_samples: int, seed: int = 0,
               n_shards: int = 10, diag_tol: float = 0.05,
               offdiag_sigmas: float = 3.0) -> FimVerification:
    """Estimate the joint FIM and check it against the closed forms.

    The estimate is sharded over independent streams (one chain id per
    shard); entry-wise standard errors come from the shard spread.  Diagonal
    entries must match within ``diag_tol`` relative error, off-diagonal
    entries must sit within ``offdiag_sigmas`` standard errors of zero.
    """
    per_shard = n_samples // n_shards
    if per_shard < 1:
        raise ValueError(f"need n_samples >= n_shards, got {n_samples} < {n_shards}")
    shards = np.array([
        fim_monte_carlo_oracle(g, dt, dim, per_shard, RandomStream(seed, chain))
        for chain in range(n_shards)
    ])
    mean = shards.mean(axis=0)
    stderr = shards.std(axis=0, ddof=1) / np.sqrt(n_shards)
    expected = expected_fim(g, dt, dim)

    diag = np.diagonal(mean)
    diag_expected = np.diagonal(expected)
    diag_rel_err = float(np.max(np.abs(diag - diag_expected) / diag_expected))

    off_mask = ~np.eye(dim + 1, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigmas = np.abs(mean[off_mask]) / stderr[off_mask]
    offdiag_max_sigma = float(np.max(sigmas)) if sigmas.size else 0.0

    ok = diag_rel_err <= diag_tol and offdiag_max_sigma <= offdiag_sigmas
    return FimVerification(
        matrix=mean, expected=expected, stderr=stderr,
        diag_rel_err=diag_rel_err, offdiag_max_sigma=offdiag_max_sigma, ok=ok,
    )
