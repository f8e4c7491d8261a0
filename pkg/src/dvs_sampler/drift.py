"""Drift-field contract: pure per-component evaluators with an NFE counter."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import StructuralError
from .state import SystemState

# A component evaluator sees the full state (coupled fields need both parts)
# and returns the drift for its own component.
ComponentFn = Callable[[SystemState, float], np.ndarray]


class DriftField:
    """Evaluates f(state, t) component-wise and counts evaluations.

    ``eval_count`` increments by the number of components evaluated per call
    (1 for single-component fields, 2 for node/edge fields), which makes it
    the NFE ledger for a trajectory.  Evaluators must be deterministic pure
    functions; the counter is the only mutable piece, so each trajectory
    should own a ``fresh()`` copy.
    """

    def __init__(self, node_fn: ComponentFn, edge_fn: ComponentFn | None = None,
                 name: str = ""):
        self._node_fn = node_fn
        self._edge_fn = edge_fn
        self.name = name
        self._eval_count = 0

    @property
    def eval_count(self) -> int:
        return self._eval_count

    @property
    def n_components(self) -> int:
        return 1 if self._edge_fn is None else 2

    def fresh(self) -> "DriftField":
        """Copy sharing the evaluators but with a zeroed counter."""
        return DriftField(self._node_fn, self._edge_fn, self.name)

    def eval(self, state: SystemState, t: float) -> SystemState:
        """Drift at ``(state, t)``, shaped like ``state``."""
        if state.has_edge != (self._edge_fn is not None):
            raise StructuralError(
                f"field {self.name!r} has {self.n_components} component(s) but the "
                f"state has {'an' if state.has_edge else 'no'} edge part"
            )
        node = np.asarray(self._node_fn(state, t), dtype=np.float64)
        self._eval_count += 1
        if self._edge_fn is None:
            drift = SystemState(node)
        else:
            edge = np.asarray(self._edge_fn(state, t), dtype=np.float64)
            self._eval_count += 1
            drift = SystemState(node, edge)
        if drift.node_dim != state.node_dim or drift.edge_dim != state.edge_dim:
            raise StructuralError(
                f"field {self.name!r} returned drift of dimension "
                f"({drift.node_dim}, {drift.edge_dim}), state is "
                f"({state.node_dim}, {state.edge_dim})"
            )
        return drift
