"""Naive dense reference: the full Kronecker-product rotation matrix.

Used by the tests and as the O(N^2) baseline in the benchmark. Deliberately
unoptimized.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .qcore import AmplitudeState, RotationPlan, compose_gates

MAX_DENSE_QUBITS = 12


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def unitarity_error(self) -> float:
        eye = np.eye(self.dim)
        return float(np.max(np.abs(self.entries @ self.entries.conj().T - eye)))


def build_dense(plan: RotationPlan, max_qubits: int = MAX_DENSE_QUBITS) -> DenseOperator:
    """``G(n-1) kron ... kron G(0)``; the last Kronecker factor acts on bit 0."""
    if plan.n_qubits > max_qubits:
        raise ResourceLimitError(
            f"dense operator for {plan.n_qubits} qubits exceeds the {max_qubits}-qubit cap"
        )
    gates = [compose_gates(g) for g in plan.per_qubit]
    return DenseOperator(reduce(np.kron, reversed(gates), np.eye(1, dtype=complex)))


def apply_dense(op: DenseOperator, state: AmplitudeState) -> AmplitudeState:
    if op.dim != state.dim:
        raise InvalidInputError(f"operator dim {op.dim} != state dim {state.dim}")
    return state.with_amplitudes(op.entries @ state.amplitudes)
