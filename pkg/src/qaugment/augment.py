"""Classical augmentations, quantum projections and min-max renormalization.

Images are carried as ``ImageBuffer`` objects holding a ``(C, rows, cols)``
float64 stack. Every operator acts on each channel with shared geometry.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError
from .qcore import AmplitudeState, extract


class DegenerateRangeWarning(UserWarning):
    """An augmented channel was constant, so min-max scaling was undefined."""


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """Stack of equally sized real channels.

    When ``complex_split`` is set the first half of the channels are real
    planes and the second half the matching imaginary planes.
    """

    channels: np.ndarray
    complex_split: bool = False

    def __post_init__(self):
        data = np.array(self.channels, dtype=float)
        if data.ndim == 2:
            data = data[None]
        if data.ndim != 3 or data.shape[0] < 1 or data.shape[1] < 1 or data.shape[2] < 1:
            raise InvalidInputError(f"expected (C, rows, cols) channels, got shape {data.shape}")
        if self.complex_split and data.shape[0] % 2:
            raise InvalidInputError("complex-split image needs an even channel count")
        data.setflags(write=False)
        object.__setattr__(self, "channels", data)

    @classmethod
    def from_array(cls, arr) -> ImageBuffer:
        """Accept ``(rows, cols)`` or channel-last ``(rows, cols, C)`` arrays."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 3:
            arr = np.moveaxis(arr, -1, 0)
        return cls(arr)

    def to_array(self) -> np.ndarray:
        """Channel-last array; a single channel comes back 2D."""
        if self.n_channels == 1:
            return self.channels[0].copy()
        return np.moveaxis(self.channels, 0, -1).copy()

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def rows(self) -> int:
        return self.channels.shape[1]

    @property
    def cols(self) -> int:
        return self.channels.shape[2]

    @property
    def value_range(self) -> list[tuple[float, float]]:
        return [(float(c.min()), float(c.max())) for c in self.channels]

    def replace(self, channels, complex_split=None) -> ImageBuffer:
        if complex_split is None:
            complex_split = self.complex_split
        return ImageBuffer(channels, complex_split)


@dataclass
class AugmentParams:
    theta_max: float = 0.01
    gn_sigma: float = 1.0
    cr_bound_deg: float = 35.0
    crop_enlarge: float = 1.15
    crop_out: tuple[int, int] | None = None  # None keeps the input size
    seed: int = 0

    def __post_init__(self):
        if not self.theta_max >= 0:
            raise InvalidInputError("theta_max must be >= 0")
        if not self.gn_sigma >= 0:
            raise InvalidInputError("gn_sigma must be >= 0")
        if not 0 <= self.cr_bound_deg <= 180:
            raise InvalidInputError("cr_bound_deg must lie in [0, 180]")
        if not self.crop_enlarge > 1:
            raise InvalidInputError("crop_enlarge must be > 1")
        if self.crop_out is not None:
            self.crop_out = tuple(int(v) for v in self.crop_out)


def gaussian_noise(img: ImageBuffer, sigma: float, seed) -> ImageBuffer:
    """Add i.i.d. ``Normal(0, sigma**2)`` noise to every pixel of every channel."""
    if sigma < 0:
        raise InvalidInputError("sigma must be >= 0")
    if sigma == 0:
        return img
    rng = np.random.default_rng(seed)
    return img.replace(img.channels + rng.normal(0.0, sigma, size=img.channels.shape))


def flip_h(img: ImageBuffer) -> ImageBuffer:
    return img.replace(img.channels[:, :, ::-1])


def perfect_rotation(img: ImageBuffer, k: int) -> ImageBuffer:
    """Counter-clockwise rotation by ``90 * k`` degrees (index permutation)."""
    return img.replace(np.rot90(img.channels, k % 4, axes=(1, 2)))


def _rotate_channel(channel: np.ndarray, angle_rad: float) -> np.ndarray:
    rows, cols = channel.shape
    cy, cx = (rows - 1) / 2, (cols - 1) / 2
    r, c = np.mgrid[0:rows, 0:cols].astype(float)
    # image axes: u to the right, v up; pull each output pixel back through R(-angle)
    u, v = c - cx, cy - r
    cos, sin = math.cos(angle_rad), math.sin(angle_rad)
    u_src = cos * u + sin * v
    v_src = -sin * u + cos * v
    coords = np.array([cy - v_src, cx + u_src])
    return ndimage.map_coordinates(channel, coords, order=1, mode="constant", cval=0.0)


def classical_rotation(img: ImageBuffer, angle_deg: float) -> ImageBuffer:
    """Rotate counter-clockwise about the image center with bilinear sampling.

    Samples falling outside the frame are 0; the output keeps the input size.
    """
    if not math.isfinite(angle_deg):
        raise InvalidInputError("rotation angle must be finite")
    if angle_deg == 0:
        return img
    angle = math.radians(angle_deg)
    return img.replace([_rotate_channel(c, angle) for c in img.channels])


def crop_source_coords(size: int, enlarge: float, out: int) -> np.ndarray:
    """Input coordinates sampled by a centered window of ``out`` pixels.

    The axis is first resized to ``round(size * enlarge)`` pixels with pixel
    centers aligned; the window starts at ``(enlarged - out) // 2``.
    """
    enlarged = int(round(size * enlarge))
    if out > enlarged or out < 1:
        raise InvalidInputError(f"crop of {out} does not fit the enlarged size {enlarged}")
    start = (enlarged - out) // 2
    idx = np.arange(start, start + out, dtype=float)
    return (idx + 0.5) * size / enlarged - 0.5


def center_crop(img: ImageBuffer, enlarge: float, out: tuple[int, int] | None = None) -> ImageBuffer:
    """Bilinearly enlarge by ``enlarge`` and keep the central ``out`` window."""
    if not enlarge > 1:
        raise InvalidInputError("enlarge must be > 1")
    out_r, out_c = out if out is not None else (img.rows, img.cols)
    rr = crop_source_coords(img.rows, enlarge, out_r)
    cc = crop_source_coords(img.cols, enlarge, out_c)
    coords = np.array(np.meshgrid(rr, cc, indexing="ij"))
    return img.replace(
        [ndimage.map_coordinates(c, coords, order=1, mode="nearest") for c in img.channels]
    )


def resize_bilinear(channel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Pixel-center aligned bilinear resize of one channel."""
    rows, cols = channel.shape
    rr = (np.arange(shape[0]) + 0.5) * rows / shape[0] - 0.5
    cc = (np.arange(shape[1]) + 0.5) * cols / shape[1] - 0.5
    coords = np.array(np.meshgrid(rr, cc, indexing="ij"))
    return ndimage.map_coordinates(np.asarray(channel, dtype=float), coords, order=1, mode="nearest")


def project_real(state: AmplitudeState) -> np.ndarray:
    return extract(state).real.copy()


def project_abs(state: AmplitudeState) -> np.ndarray:
    return np.abs(extract(state))


def minmax_renormalize(augmented, original) -> np.ndarray:
    """Affinely map ``augmented``'s [min, max] onto ``original``'s [min, max].

    Complex input is handled plane-wise: real and imaginary parts are scaled
    independently and returned as a complex array. A constant plane maps to
    ``min(original)`` and emits :class:`DegenerateRangeWarning`.
    """
    augmented = np.asarray(augmented)
    original = np.asarray(original, dtype=float)
    if np.iscomplexobj(augmented):
        return minmax_renormalize(augmented.real, original) + 1j * minmax_renormalize(
            augmented.imag, original
        )
    augmented = augmented.astype(float)
    o_min, o_max = float(original.min()), float(original.max())
    a_min, a_max = float(augmented.min()), float(augmented.max())
    if a_max == a_min:
        warnings.warn("constant augmented channel; output set to original minimum",
                      DegenerateRangeWarning, stacklevel=2)
        return np.full(augmented.shape, o_min)
    unit = (augmented - a_min) / (a_max - a_min)
    out = unit * (o_max - o_min) + o_min
    # pin the endpoints exactly; rounding in the affine map can miss them by an ulp
    out[augmented == a_min] = o_min
    out[augmented == a_max] = o_max
    return out


def quantize_uint8(values) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], return uint8."""
    values = np.asarray(values, dtype=float)
    rounded = np.sign(values) * np.floor(np.abs(values) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)
