"""Singular value spectra, baseline differences and Z-phase statistics."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .augment import AugmentParams, ImageBuffer, quantize_uint8, resize_bilinear
from .dsl import AugmentSpec, parse_spec, run_pipeline
from .errors import InvalidInputError
from .qcore import AmplitudeState


def singular_values(channel) -> np.ndarray:
    """All ``min(rows, cols)`` singular values, descending, never truncated."""
    return np.linalg.svd(np.asarray(channel), compute_uv=False)


def schmidt_coefficients(state: AmplitudeState, cut: int) -> np.ndarray:
    """Singular values of the amplitudes reshaped to ``2**cut x 2**(n - cut)``.

    Rows index the top ``cut`` qubits, columns the low ``n - cut`` qubits. For
    an embedded ``2**cut x 2**(n-cut)`` image this is the image's own matrix.
    """
    n = state.n_qubits
    if not 1 <= cut <= n - 1:
        raise InvalidInputError(f"cut must lie in [1, {n - 1}], got {cut}")
    return singular_values(state.amplitudes.reshape(1 << cut, 1 << (n - cut)))


@dataclass
class SpectrumReport:
    values: np.ndarray  # (channels, k), each row descending
    diff_vs_baseline: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.diff_vs_baseline is not None:
            self.diff_vs_baseline = np.atleast_2d(np.asarray(self.diff_vs_baseline, dtype=float))
            if self.diff_vs_baseline.shape != self.values.shape:
                raise InvalidInputError("diff shape must match values shape")

    def to_csv(self) -> str:
        """``channel,index,value[,diff]`` rows."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        has_diff = self.diff_vs_baseline is not None
        writer.writerow(["channel", "index", "value"] + (["diff"] if has_diff else []))
        for c, row in enumerate(self.values):
            for k, v in enumerate(row):
                line = [c, k, repr(float(v))]
                if has_diff:
                    line.append(repr(float(self.diff_vs_baseline[c, k])))
                writer.writerow(line)
        return buf.getvalue()

    def to_dict(self) -> dict:
        d = {"meta": self.meta, "values": self.values.tolist()}
        if self.diff_vs_baseline is not None:
            d["diff_vs_baseline"] = self.diff_vs_baseline.tolist()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> SpectrumReport:
        return cls(np.array(d["values"]), d.get("diff_vs_baseline"), d.get("meta", {}))


def _channel_matrices(img: ImageBuffer) -> np.ndarray:
    if img.complex_split:
        half = img.n_channels // 2
        return img.channels[:half] + 1j * img.channels[half:]
    return img.channels


def spectrum_report(img: ImageBuffer, **meta) -> SpectrumReport:
    """Spectrum of every channel; complex-split planes are recombined first."""
    return SpectrumReport(np.array([singular_values(c) for c in _channel_matrices(img)]), meta=meta)


def spectrum_diff(augmented: SpectrumReport, baseline: SpectrumReport) -> SpectrumReport:
    if augmented.values.shape != baseline.values.shape:
        raise InvalidInputError(
            f"spectrum shapes differ: {augmented.values.shape} vs {baseline.values.shape}"
        )
    return SpectrumReport(augmented.values, augmented.values - baseline.values, dict(augmented.meta))


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    if img.n_channels == 1:
        return img
    return ImageBuffer(img.channels.mean(axis=0))


def prepare_image(img, size: int | None = 256) -> ImageBuffer:
    """Grayscale by channel average, then bilinear resize to ``size x size``."""
    if not isinstance(img, ImageBuffer):
        img = ImageBuffer.from_array(img)
    img = to_grayscale(img)
    if size is not None and (img.rows, img.cols) != (size, size):
        img = ImageBuffer(resize_bilinear(img.channels[0], (size, size)))
    return img


def quantize_image(img: ImageBuffer) -> ImageBuffer:
    return img.replace(quantize_uint8(img.channels).astype(float))


def average_spectra(corpus, spec, count: int, params: AugmentParams | None = None, seed: int = 0,
                    convert_uint8: bool = False, size: int | None = 256) -> SpectrumReport:
    """Mean spectrum of ``spec`` over the first ``count`` corpus images.

    With ``convert_uint8`` each augmented image is renormalized and quantized
    to 8 bits before the SVD; otherwise raw, unnormalized floats are used.
    The ``diff_vs_baseline`` field compares against the unaugmented mean.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    params = params or AugmentParams()
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    images = []
    for img in corpus:
        images.append(prepare_image(img, size))
        if len(images) == count:
            break
    if len(images) < count:
        raise InvalidInputError(f"corpus yielded {len(images)} images, {count} requested")
    shapes = {(im.rows, im.cols) for im in images}
    if len(shapes) != 1:
        raise InvalidInputError(f"corpus images have differing shapes {sorted(shapes)}; set size")

    aug_rows, base_rows = [], []
    for idx, img in enumerate(images):
        out = run_pipeline(img, spec, params, seed=seed, image_index=idx, renormalize=convert_uint8)
        base = img
        if convert_uint8:
            out, base = quantize_image(out), quantize_image(img)
        aug_rows.append(spectrum_report(out).values[0])
        base_rows.append(spectrum_report(base).values[0])
    aug_rows, base_rows = np.array(aug_rows), np.array(base_rows)
    mean = aug_rows.mean(axis=0)
    meta = {
        "spec": str(spec),
        "theta_max": params.theta_max,
        "seed": seed,
        "count": count,
        "convert_uint8": convert_uint8,
    }
    return SpectrumReport(mean, mean - base_rows.mean(axis=0), meta)


def qrz_factor_stats(n: int, theta_max: float, m: int) -> tuple[float, float]:
    """Mean and variance of the Z-phase sum at an address with ``m`` set bits.

    Uses the sign convention where a 0 bit contributes ``+theta_i``, i.e. the
    sum is ``-phase_sums(angles)[k]``; the factor ``cos(sum / 2)`` is the same
    under either sign since cosine is even.
    """
    if not 0 <= m <= n:
        raise InvalidInputError(f"popcount m={m} outside [0, {n}]")
    return (n - 2 * m) * theta_max / 2, n * theta_max**2 / 12


@dataclass
class GaussianApproxReport:
    n: int
    theta_max: float
    samples: int
    distance: float
    passed: bool


def gaussian_approx_check(n: int, theta_max: float = 0.01, samples: int = 100_000,
                          seed: int = 0, threshold: float = 0.02) -> GaussianApproxReport:
    """Kolmogorov-Smirnov distance between the n-term uniform sum and its normal fit."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if samples < 10_000:
        raise InvalidInputError("samples must be >= 1e4")
    rng = np.random.default_rng(seed)
    sums = rng.uniform(0.0, theta_max, size=(samples, n)).sum(axis=1)
    mu, var = qrz_factor_stats(n, theta_max, 0)
    distance = float(stats.kstest(sums, "norm", args=(mu, math.sqrt(var))).statistic)
    return GaussianApproxReport(n, theta_max, samples, distance, distance < threshold)
