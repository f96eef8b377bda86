"""Laplace pixel noise, key-based strong rotations and the non-DP witness."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .augment import ImageBuffer, project_abs
from .dsl import node_seed
from .errors import InvalidInputError
from .qcore import AmplitudeState, RotationPlan, apply_plan, embed, extract, invert_plan, sample_plan
from .spectral import schmidt_coefficients

POSITIVE = "POSITIVE"
INCONCLUSIVE = "INCONCLUSIVE"
NEGATIVE = "NEGATIVE"


@dataclass(frozen=True)
class DpParams:
    epsilon: float
    sensitivity: float = 255.0
    seed: int = 0
    delta: float = 0.0  # reserved; the Laplace mechanism is pure epsilon-DP

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInputError("epsilon must be > 0")
        if not self.sensitivity > 0:
            raise InvalidInputError("sensitivity must be > 0")

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon


def dp_noise(img: ImageBuffer, params: DpParams) -> ImageBuffer:
    """Add Laplace(0, sensitivity / epsilon) noise to every pixel."""
    rng = np.random.default_rng(params.seed)
    return img.replace(img.channels + rng.laplace(0.0, params.scale, size=img.channels.shape))


def encrypt_states(img: ImageBuffer, plan: RotationPlan) -> list[AmplitudeState]:
    return [apply_plan(embed(c), plan) for c in img.channels]


def decrypt_states(states, plan: RotationPlan) -> ImageBuffer:
    inverse = invert_plan(plan)
    return ImageBuffer([extract(apply_plan(s, inverse)).real for s in states])


def strong_rotation_encrypt(img: ImageBuffer, theta_max: float = 1.0, seed: int = 0,
                            mode: str = "XYZ") -> tuple[ImageBuffer, RotationPlan]:
    """Rotate with a seeded plan and release only the moduli.

    The plan is the key: :func:`encrypt_states` with the same plan rebuilds
    the complex states and :func:`decrypt_states` inverts them. With
    ``mode="Z"`` the moduli of a nonnegative image are unchanged, so the
    released image does not depend on the key.
    """
    n_qubits = embed(img.channels[0]).n_qubits
    plan = sample_plan(n_qubits, mode, theta_max, seed)
    states = encrypt_states(img, plan)
    return img.replace([project_abs(s) for s in states]), plan


@dataclass
class WitnessReport:
    trials: int
    min_own_distance: float | None  # None when no trial was run
    max_own_distance: float | None
    min_cross_distance: float
    gap: float
    verdict: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _schmidt_cut(state: AmplitudeState) -> int:
    rows, cols = state.source_shape
    col_bits = cols.bit_length() - 1
    if state.pad_len == 0 and cols == 1 << col_bits and 1 <= col_bits < state.n_qubits:
        return state.n_qubits - col_bits  # rows x cols blocking: spectrum of the image itself
    return max(1, state.n_qubits // 2)


def _spectrum(states) -> np.ndarray:
    return np.concatenate([schmidt_coefficients(s, _schmidt_cut(s)) for s in states])


def non_dp_witness(img_a: ImageBuffer, img_b: ImageBuffer, theta_max: float = 0.01, seed: int = 0,
                   trials: int = 100, gap: float | None = None, mode: str = "XYZ",
                   tol: float = 1e-9) -> WitnessReport:
    """Identify which input produced each rotated output from its Schmidt spectrum.

    Every trial draws a fresh plan, rotates both inputs without projection and
    compares the output spectra with both source spectra (L-infinity).
    POSITIVE means every output matched its own source within ``tol`` and sat
    further than ``gap`` (default: half the source spectra distance) from the
    other source, so the output reveals the input with certainty.
    """
    if img_a.channels.shape != img_b.channels.shape:
        raise InvalidInputError("inputs must share a shape")
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    states_a = [embed(c) for c in img_a.channels]
    states_b = [embed(c) for c in img_b.channels]
    spec_a, spec_b = _spectrum(states_a), _spectrum(states_b)
    source_gap = float(np.max(np.abs(spec_a - spec_b)))
    if gap is None:
        gap = source_gap / 2
    if source_gap <= tol:
        return WitnessReport(0, None, None, source_gap, gap, INCONCLUSIVE)

    own, cross = [], []
    n_qubits = states_a[0].n_qubits
    for t in range(trials):
        plan = sample_plan(n_qubits, mode, theta_max, node_seed(seed, 0, "witness", t))
        out_a = _spectrum([apply_plan(s, plan) for s in states_a])
        out_b = _spectrum([apply_plan(s, plan) for s in states_b])
        own += [np.max(np.abs(out_a - spec_a)), np.max(np.abs(out_b - spec_b))]
        cross += [np.max(np.abs(out_a - spec_b)), np.max(np.abs(out_b - spec_a))]
    own, cross = np.array(own), np.array(cross)
    verdict = POSITIVE if own.max() < tol and cross.min() > gap else NEGATIVE
    return WitnessReport(trials, float(own.min()), float(own.max()), float(cross.min()), gap, verdict)
