"""Sample state container for single- and two-component (node/edge) systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError


def _frozen_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SystemState:
    """Flat float64 vector(s) holding the evolving sample.

    ``node_part`` is always present; ``edge_part`` is ``None`` for
    single-component systems.  Arrays are copied on construction and marked
    read-only, so instances are value-like and safe to share between threads.
    The same container is used for drifts and noise draws ("state-shaped"
    vectors).
    """

    node_part: np.ndarray
    edge_part: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "node_part", _frozen_vector(self.node_part))
        if self.edge_part is not None:
            object.__setattr__(self, "edge_part", _frozen_vector(self.edge_part))

    @property
    def node_dim(self) -> int:
        return self.node_part.shape[0]

    @property
    def edge_dim(self) -> int:
        return 0 if self.edge_part is None else self.edge_part.shape[0]

    @property
    def total_dim(self) -> int:
        return self.node_dim + self.edge_dim

    @property
    def has_edge(self) -> bool:
        return self.edge_part is not None

    def as_vector(self) -> np.ndarray:
        """Concatenated copy of both parts (node first)."""
        if self.edge_part is None:
            return self.node_part.copy()
        return np.concatenate([self.node_part, self.edge_part])

    def norm(self) -> float:
        """Euclidean norm over all components."""
        sq = float(self.node_part @ self.node_part)
        if self.edge_part is not None:
            sq += float(self.edge_part @ self.edge_part)
        return float(np.sqrt(sq))

    def all_finite(self) -> bool:
        if not np.all(np.isfinite(self.node_part)):
            return False
        if self.edge_part is not None and not np.all(np.isfinite(self.edge_part)):
            return False
        return True


def check_same_shape(a: SystemState, b: SystemState, what: str) -> None:
    """Raise ``StructuralError`` unless ``b`` is shaped like ``a``."""
    if a.node_dim != b.node_dim:
        raise StructuralError(
            f"{what}: node part has dimension {b.node_dim}, expected {a.node_dim}"
        )
    if a.has_edge != b.has_edge:
        raise StructuralError(
            f"{what}: edge part {'missing' if b.edge_part is None else 'unexpected'}"
        )
    if a.has_edge and a.edge_dim != b.edge_dim:
        raise StructuralError(
            f"{what}: edge part has dimension {b.edge_dim}, expected {a.edge_dim}"
        )
