"""8-bit PGM/PPM/PNG input and output."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .augment import ImageBuffer, quantize_uint8

IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".png")


def read_image(path) -> ImageBuffer:
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB" if im.mode in ("RGBA", "P", "CMYK") else "L")
        return ImageBuffer.from_array(np.asarray(im, dtype=float))


def write_image(path, img: ImageBuffer | np.ndarray) -> Path:
    """Quantize to uint8 and write; the format follows the file suffix.

    Color data aimed at a ``.pgm`` path is written as ``.ppm``; the path
    actually written is returned.
    """
    arr = img.to_array() if isinstance(img, ImageBuffer) else np.asarray(img)
    data = quantize_uint8(arr)
    path = Path(path)
    if data.ndim == 3 and data.shape[2] == 1:
        data = data[:, :, 0]
    if data.ndim == 3 and data.shape[2] != 3:
        raise ValueError(f"cannot write {data.shape[2]} channels as an 8-bit image")
    if data.ndim == 3 and path.suffix.lower() == ".pgm":
        path = path.with_suffix(".ppm")
    Image.fromarray(data).save(path)
    return path


def list_images(path) -> list[Path]:
    path = Path(path)
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [path]
