"""Desk-scale fidelity metrics: diagonal-Gaussian W2, RBF MMD, graph MMDs."""

from __future__ import annotations

import math

import numpy as np

from .errors import StructuralError


def gaussian_w2(mean1, var1, mean2, var2) -> float:
    """2-Wasserstein distance between diagonal Gaussians.

    sqrt(||mu1 - mu2||^2 + sum_d (sigma1_d - sigma2_d)^2).  Variances may be
    zero (point masses) but not negative.
    """
    mean1 = np.asarray(mean1, dtype=np.float64).reshape(-1)
    mean2 = np.asarray(mean2, dtype=np.float64).reshape(-1)
    var1 = np.asarray(var1, dtype=np.float64).reshape(-1)
    var2 = np.asarray(var2, dtype=np.float64).reshape(-1)
    if not (mean1.shape == mean2.shape == var1.shape == var2.shape):
        raise StructuralError(
            f"gaussian_w2 dimension mismatch: means {mean1.shape}/{mean2.shape}, "
            f"vars {var1.shape}/{var2.shape}"
        )
    if np.any(var1 < 0) or np.any(var2 < 0):
        raise ValueError("variances must be nonnegative")
    dm = mean1 - mean2
    ds = np.sqrt(var1) - np.sqrt(var2)
    return math.sqrt(float(dm @ dm) + float(ds @ ds))


def _as_matrix(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def mmd_rbf(samples_p, samples_q, bandwidth: float) -> float:
    """Biased (V-statistic) MMD with Gaussian kernel exp(-||x-y||^2 / (2 h^2)).

    Returns sqrt(max(0, MMD^2)); symmetric in each sample set's ordering.
    """
    p = _as_matrix(samples_p)
    q = _as_matrix(samples_q)
    if p.shape[0] == 0 or q.shape[0] == 0:
        raise StructuralError("mmd_rbf needs nonempty sample sets")
    if p.shape[1] != q.shape[1]:
        raise StructuralError(
            f"mmd_rbf feature dimensions differ: {p.shape[1]} vs {q.shape[1]}"
        )
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    inv = 1.0 / (2.0 * bandwidth * bandwidth)

    def mean_kernel(a, b):
        d2 = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        return float(np.mean(np.exp(-inv * np.maximum(d2, 0.0))))

    mmd2 = mean_kernel(p, p) + mean_kernel(q, q) - 2.0 * mean_kernel(p, q)
    return math.sqrt(max(0.0, mmd2))


def median_pairwise_bandwidth(samples_p, samples_q) -> float:
    """Median nonzero pairwise distance over the pooled samples (fallback 1.0)."""
    pooled = np.vstack([_as_matrix(samples_p), _as_matrix(samples_q)])
    d2 = (
        np.sum(pooled * pooled, axis=1)[:, None]
        + np.sum(pooled * pooled, axis=1)[None, :]
        - 2.0 * (pooled @ pooled.T)
    )
    dists = np.sqrt(np.maximum(d2[np.triu_indices(len(pooled), k=1)], 0.0))
    dists = dists[dists > 0]
    if dists.size == 0:
        return 1.0
    return float(np.median(dists))


def _check_adjacency(adj: np.ndarray, what: str) -> np.ndarray:
    adj = np.asarray(adj, dtype=np.float64)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise StructuralError(f"{what}: adjacency must be square, got shape {adj.shape}")
    if not np.array_equal(adj, adj.T):
        raise StructuralError(f"{what}: adjacency must be symmetric")
    return adj


def degree_histogram(adj: np.ndarray, n_bins: int) -> np.ndarray:
    """Counts of node degrees 0..n_bins-1 (degrees above the range are clipped)."""
    degrees = np.minimum(adj.sum(axis=1).astype(int), n_bins - 1)
    return np.bincount(degrees, minlength=n_bins).astype(np.float64)


def laplacian_spectrum(adj: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the combinatorial Laplacian D - A."""
    lap = np.diag(adj.sum(axis=1)) - adj
    return np.sort(np.linalg.eigvalsh(lap))


def graph_summary_mmd(generated, reference, bandwidth: float | None = None) -> dict:
    """Degree- and spectrum-based MMDs between two sets of 0/1 adjacencies.

    Degree MMD compares degree-histogram vectors; spectral MMD compares
    sorted Laplacian eigenvalue vectors, zero-padded to a common length.
    ``bandwidth`` defaults to the median pairwise distance per feature kind;
    the bandwidths used are included in the returned dict.
    """
    gen = [_check_adjacency(a, "generated") for a in generated]
    ref = [_check_adjacency(a, "reference") for a in reference]
    if not gen or not ref:
        raise StructuralError("graph_summary_mmd needs nonempty graph sets")

    n_max = max(a.shape[0] for a in gen + ref)
    deg_gen = [degree_histogram(a, n_max) for a in gen]
    deg_ref = [degree_histogram(a, n_max) for a in ref]

    def padded_spectrum(a):
        spec = laplacian_spectrum(a)
        return np.pad(spec, (0, n_max - spec.size))

    spec_gen = [padded_spectrum(a) for a in gen]
    spec_ref = [padded_spectrum(a) for a in ref]

    bw_deg = bandwidth if bandwidth is not None else median_pairwise_bandwidth(deg_gen, deg_ref)
    bw_spec = bandwidth if bandwidth is not None else median_pairwise_bandwidth(spec_gen, spec_ref)
    return {
        "mmd_degree": mmd_rbf(deg_gen, deg_ref, bw_deg),
        "mmd_spectral": mmd_rbf(spec_gen, spec_ref, bw_spec),
        "bandwidth_degree": bw_deg,
        "bandwidth_spectral": bw_spec,
    }


def threshold_adjacency(edge_part: np.ndarray, n_nodes: int, cut: float = 0.5) -> np.ndarray:
    """Reshape a flat edge part to (n, n), threshold at ``cut``, zero the diagonal."""
    mat = np.asarray(edge_part, dtype=np.float64).reshape(n_nodes, n_nodes)
    adj = (mat > cut).astype(np.float64)
    np.fill_diagonal(adj, 0.0)
    return adj
