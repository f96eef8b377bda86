"""Amplitude embedding and per-qubit Bloch rotations on state vectors.

Register convention: qubit ``i`` is bit ``i`` of the amplitude address, qubit 0
least significant. A plan is applied one qubit at a time as a 2x2 matrix acting
on the two halves of the state selected by that bit, so the full ``N x N``
rotation is never built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError

AXES = ("X", "Y", "Z")
MODES = ("X", "Y", "Z", "XYZ")

# 2**14 complex128 = 256 KiB, comfortably inside L2
BLOCK_BITS = 14

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    """Unnormalized amplitude vector of an embedded channel.

    ``source_shape`` and ``pad_len`` record how to undo the embedding.
    """

    amplitudes: np.ndarray
    n_qubits: int
    source_shape: tuple[int, int]
    pad_len: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.n_qubits < 1 or amps.shape != (1 << self.n_qubits,):
            raise InvalidInputError(
                f"amplitudes of shape {amps.shape} do not match {self.n_qubits} qubits"
            )
        rows, cols = self.source_shape
        if not 0 <= self.pad_len < amps.size or amps.size - self.pad_len != rows * cols:
            raise InvalidInputError("pad_len inconsistent with source_shape")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def with_amplitudes(self, amplitudes) -> AmplitudeState:
        return AmplitudeState(amplitudes, self.n_qubits, self.source_shape, self.pad_len)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class RotationPlan:
    """Ordered (axis, angle) rotations for every qubit.

    ``per_qubit[i]`` lists the gates of qubit ``i`` in application order.
    """

    per_qubit: tuple[tuple[tuple[str, float], ...], ...]
    theta_max: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        per_qubit = tuple(
            tuple((str(axis), float(angle)) for axis, angle in gates) for gates in self.per_qubit
        )
        for gates in per_qubit:
            axes = [axis for axis, _ in gates]
            if any(axis not in AXES for axis in axes) or len(set(axes)) != len(axes):
                raise InvalidInputError(f"invalid axis tuple {axes}")
        object.__setattr__(self, "per_qubit", per_qubit)

    @property
    def n_qubits(self) -> int:
        return len(self.per_qubit)

    @classmethod
    def single_axis(cls, axis: str, angles, theta_max: float = 0.0, seed=None) -> RotationPlan:
        return cls(tuple(((axis, float(a)),) for a in angles), theta_max, seed)

    def angles(self, axis: str) -> np.ndarray:
        """Angle of ``axis`` on every qubit (0 where the axis is absent)."""
        return np.array([dict(gates).get(axis, 0.0) for gates in self.per_qubit])

    def to_dict(self) -> dict:
        return {
            "theta_max": self.theta_max,
            "seed": self.seed,
            "per_qubit": [[[axis, angle] for axis, angle in gates] for gates in self.per_qubit],
        }

    @classmethod
    def from_dict(cls, d: dict) -> RotationPlan:
        return cls(
            tuple(tuple((axis, angle) for axis, angle in gates) for gates in d["per_qubit"]),
            d.get("theta_max", 0.0),
            d.get("seed"),
        )


def embed(channel) -> AmplitudeState:
    """Flatten a 2D channel row-major and zero-pad it to a power of two.

    No normalization is applied. A single pixel is padded to one qubit.
    """
    arr = np.asarray(channel)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected a non-empty 2D channel, got shape {arr.shape}")
    size = arr.size
    n_qubits = max(1, (size - 1).bit_length())
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[:size] = arr.reshape(-1)
    return AmplitudeState(amps, n_qubits, arr.shape, amps.size - size)


def extract(state: AmplitudeState) -> np.ndarray:
    """Inverse of :func:`embed`; the padded tail is dropped even if nonzero."""
    rows, cols = state.source_shape
    return state.amplitudes[: rows * cols].reshape(rows, cols).copy()


def rotation_gate(axis: str, theta: float) -> np.ndarray:
    """``exp(-i theta P / 2)`` for the Pauli operator ``P`` named by ``axis``."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidInputError(f"rotation angle must be finite, got {theta}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "Y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "Z":
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=complex)
    raise InvalidInputError(f"unknown rotation axis {axis!r}")


def compose_gates(gates) -> np.ndarray:
    """Single 2x2 matrix equal to applying ``gates`` in order."""
    out = np.eye(2, dtype=complex)
    for axis, angle in gates:
        out = rotation_gate(axis, angle) @ out
    return out


def sample_plan(n_qubits: int, mode: str = "XYZ", theta_max: float = 0.01, seed: int = 0) -> RotationPlan:
    """Draw a random rotation plan.

    Angles are ``numpy.random.default_rng(seed).uniform(0, theta_max)``. In
    ``XYZ`` mode every qubit first draws a permutation of the three axes, then
    its three angles; single-axis modes draw one angle per qubit, qubit 0 first.
    """
    if n_qubits < 1:
        raise InvalidInputError("n_qubits must be >= 1")
    if mode not in MODES:
        raise InvalidInputError(f"unknown rotation mode {mode!r}")
    if not theta_max >= 0:
        raise InvalidInputError("theta_max must be >= 0")
    rng = np.random.default_rng(seed)
    per_qubit = []
    for _ in range(n_qubits):
        if mode == "XYZ":
            order = rng.permutation(3)
            angles = rng.uniform(0.0, theta_max, size=3)
            per_qubit.append(tuple((AXES[a], float(t)) for a, t in zip(order, angles)))
        else:
            per_qubit.append(((mode, float(rng.uniform(0.0, theta_max))),))
    return RotationPlan(tuple(per_qubit), float(theta_max), seed)


def invert_plan(plan: RotationPlan) -> RotationPlan:
    """Reverse each qubit's gate order and negate every angle."""
    per_qubit = tuple(
        tuple((axis, -angle) for axis, angle in reversed(gates)) for gates in plan.per_qubit
    )
    return RotationPlan(per_qubit, plan.theta_max, plan.seed)


def plan_gates(plan: RotationPlan) -> np.ndarray:
    """Stack of composed per-qubit gates, shape ``(n_qubits, 2, 2)``."""
    return np.array([compose_gates(gates) for gates in plan.per_qubit], dtype=complex)


@numba.njit(cache=True, nogil=True)
def _butterfly(x, q, g00, g01, g10, g11, start, stop):
    half = 1 << q
    for base in range(start, stop, 2 * half):
        for j in range(base, base + half):
            a = x[j]
            b = x[j + half]
            x[j] = g00 * a + g01 * b
            x[j + half] = g10 * a + g11 * b


@numba.njit(cache=True, nogil=True)
def _apply_gates_inplace(x, gates, block_bits):
    n = gates.shape[0]
    size = x.size
    low = min(block_bits, n)
    block = 1 << low
    # low qubits: every block of 2**low amplitudes is finished while cache-resident
    for start in range(0, size, block):
        for q in range(low):
            _butterfly(x, q, gates[q, 0, 0], gates[q, 0, 1], gates[q, 1, 0], gates[q, 1, 1],
                       start, start + block)
    for q in range(low, n):
        _butterfly(x, q, gates[q, 0, 0], gates[q, 0, 1], gates[q, 1, 0], gates[q, 1, 1], 0, size)


def _apply_transpose(x: np.ndarray, gates: np.ndarray) -> np.ndarray:
    # reshape to 2 x N/2 (leading row = top qubit), multiply, transpose, flatten;
    # each pass rotates the address bits by one, so n passes visit qubits n-1 .. 0
    n = gates.shape[0]
    for q in range(n - 1, -1, -1):
        x = (gates[q] @ x.reshape(2, -1)).T.reshape(-1)
    return x


def apply_gates(amplitudes: np.ndarray, gates: np.ndarray, kernel: str = "blocked") -> np.ndarray:
    """Apply ``gates[i]`` to qubit ``i`` of a raw amplitude vector."""
    gates = np.ascontiguousarray(gates, dtype=complex)
    if kernel == "blocked":
        x = np.array(amplitudes, dtype=complex)
        _apply_gates_inplace(x, gates, BLOCK_BITS)
        return x
    if kernel == "transpose":
        return _apply_transpose(np.asarray(amplitudes, dtype=complex), gates)
    raise InvalidInputError(f"unknown kernel {kernel!r}")


def apply_plan(state: AmplitudeState, plan: RotationPlan, kernel: str = "blocked") -> AmplitudeState:
    """Rotate every qubit of ``state`` by its composed gate from ``plan``.

    ``kernel="blocked"`` updates the amplitudes in place, one 2x2 pass per
    qubit, with the low qubits handled in cache-sized blocks.
    ``kernel="transpose"`` runs the reshape/multiply/transpose loop in numpy.
    Both cost O(N log N).
    """
    if plan.n_qubits != state.n_qubits:
        raise InvalidInputError(
            f"plan has {plan.n_qubits} qubits but state has {state.n_qubits}"
        )
    return state.with_amplitudes(apply_gates(state.amplitudes, plan_gates(plan), kernel))


def qrz_factors(angles) -> np.ndarray:
    """Diagonal of the tensor product of Z rotations, built in O(N)."""
    angles = np.asarray(angles, dtype=float)
    if not np.all(np.isfinite(angles)):
        raise InvalidInputError("rotation angles must be finite")
    factors = np.ones(1, dtype=complex)
    for theta in angles:
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        # new top bit: 0 -> e^{-i theta/2}, 1 -> e^{+i theta/2}
        factors = np.concatenate((factors * complex(c, -s), factors * complex(c, s)))
    return factors


def phase_sums(angles, addresses=None) -> np.ndarray:
    """Signed sums ``sum_i s_i(k) theta_i``, ``s_i(k) = +1`` if bit i of k is set else -1.

    The Z-rotation factor at address ``k`` is ``exp(1j * phase_sums[k] / 2)``.
    """
    angles = np.asarray(angles, dtype=float)
    n = angles.size
    if addresses is None:
        addresses = np.arange(1 << n)
    addresses = np.asarray(addresses, dtype=np.int64)
    bits = (addresses[..., None] >> np.arange(n)) & 1
    return (2 * bits - 1) @ angles


def apply_qrz_fast(state: AmplitudeState, angles) -> AmplitudeState:
    """Z-only rotation as an elementwise product with the diagonal, O(N)."""
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (state.n_qubits,):
        raise InvalidInputError(
            f"expected {state.n_qubits} angles, got shape {angles.shape}"
        )
    return state.with_amplitudes(state.amplitudes * qrz_factors(angles))
