"""Command-line entry point: ``qaugment {augment,spectrum,bench,dp,demo}``.

Exit codes: 0 success, 1 usage or spec error, 2 I/O error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .augment import AugmentParams, ImageBuffer, quantize_uint8, resize_bilinear
from .bench import fit_exponent, run_bench
from .dsl import METHODS, node_seed, parse_spec, run_pipeline
from .errors import InvalidInputError, ResourceLimitError
from .imageio import list_images, read_image, write_image
from .privacy import DpParams, dp_noise
from .spectral import average_spectra

log = logging.getLogger("qaugment")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_RESOURCE = 0, 1, 2, 3
FORMATS = ("pgm", "png", "csv", "json")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    spec: str = "x"
    params: AugmentParams = field(default_factory=AugmentParams)
    input: str | None = None
    output: str | None = None
    format: str | None = None
    count: int | None = None
    seed: int = 0
    convert_uint8: bool = False
    workers: int = 1
    resize_pow2: bool = False


_PARAM_FLAGS = {
    "theta_max": "theta_max",
    "gn_sigma": "gn_sigma",
    "cr_bound": "cr_bound_deg",
    "crop_enlarge": "crop_enlarge",
    "crop_out": "crop_out",
}


def load_config(args) -> RunConfig:
    """Merge a JSON config (same fields as RunConfig) with CLI flags; flags win."""
    raw = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid config JSON: {exc}") from exc
    param_raw = dict(raw.pop("params", {}) or {})
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**{k: v for k, v in raw.items() if k != "params"})

    for flag, attr in (("spec", "spec"), ("input", "input"), ("output", "output"),
                       ("format", "format"), ("count", "count"), ("seed", "seed"),
                       ("workers", "workers")):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "uint8", False):
        cfg.convert_uint8 = True
    if getattr(args, "resize_pow2", False):
        cfg.resize_pow2 = True
    for flag, attr in _PARAM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            param_raw[attr] = value
    param_raw["seed"] = cfg.seed
    try:
        cfg.params = AugmentParams(**param_raw)
    except TypeError as exc:
        raise UsageError(f"bad params in config: {exc}") from exc
    if cfg.count is not None and cfg.count < 1:
        raise UsageError("--count must be >= 1")
    if cfg.format is not None and cfg.format not in FORMATS:
        raise UsageError(f"--format must be one of {FORMATS}")
    parse_spec(cfg.spec, strict=getattr(args, "command", None) != "dp")
    return cfg


def _next_pow2(v: int) -> int:
    return 1 << max(0, (v - 1).bit_length())


def _prepare(img: ImageBuffer, cfg: RunConfig) -> ImageBuffer:
    if not cfg.resize_pow2:
        return img
    shape = (_next_pow2(img.rows), _next_pow2(img.cols))
    if shape == (img.rows, img.cols):
        return img
    return img.replace([resize_bilinear(c, shape) for c in img.channels])


def _write_arrays(stem: Path, fmt: str, img: ImageBuffer, convert_uint8: bool) -> list[Path]:
    channels = img.channels
    if convert_uint8:
        channels = quantize_uint8(channels).astype(float)
    if fmt == "json":
        path = stem.with_suffix(".json")
        payload = {"shape": list(channels.shape), "complex_split": img.complex_split,
                   "channels": channels.tolist()}
        path.write_text(json.dumps(payload))
        return [path]
    paths = []
    for i, channel in enumerate(channels):
        path = stem.with_name(f"{stem.name}_c{i}.csv") if len(channels) > 1 else stem.with_suffix(".csv")
        np.savetxt(path, channel, delimiter=",", fmt="%.17g" if not convert_uint8 else "%d")
        paths.append(path)
    return paths


def write_output(out_dir: Path, name: str, img: ImageBuffer, fmt: str, convert_uint8: bool) -> list[Path]:
    """Write one augmented image; complex-split images become ``_re``/``_im`` pairs."""
    stem = out_dir / name
    if fmt in ("csv", "json"):
        return _write_arrays(stem, fmt, img, convert_uint8)
    suffix = "." + fmt
    if img.complex_split:
        half = img.n_channels // 2
        parts = [("_re", img.channels[:half]), ("_im", img.channels[half:])]
        return [write_image(out_dir / f"{name}{tag}{suffix}", ImageBuffer(ch)) for tag, ch in parts]
    return [write_image(stem.with_suffix(suffix), img)]


def _output_format(cfg: RunConfig, src: Path) -> str:
    if cfg.format:
        return cfg.format
    suffix = src.suffix.lower().lstrip(".")
    return suffix if suffix in ("pgm", "png") else "png"


def _inputs(cfg: RunConfig) -> list[Path]:
    if not cfg.input:
        raise UsageError("an input file or directory is required")
    src = Path(cfg.input)
    if not src.exists():
        raise OSError(f"input {src} does not exist")
    paths = list_images(src)
    if not paths:
        raise OSError(f"no PGM/PNG images in {src}")
    if cfg.count is not None:
        paths = paths[: cfg.count]
    return paths


def _output_dir(cfg: RunConfig) -> Path:
    if not cfg.output:
        raise UsageError("--output is required")
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _batch(cfg: RunConfig, transform) -> int:
    paths = _inputs(cfg)
    out_dir = _output_dir(cfg)

    def work(item):
        idx, path = item
        img = _prepare(read_image(path), cfg)
        result = transform(img, idx)
        return write_output(out_dir, path.stem, result, _output_format(cfg, path), cfg.convert_uint8)

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        for written in pool.map(work, enumerate(paths)):
            for p in written:
                log.info("wrote %s", p)
    return EXIT_OK


def cmd_augment(cfg: RunConfig) -> int:
    spec = parse_spec(cfg.spec)
    return _batch(cfg, lambda img, idx: run_pipeline(img, spec, cfg.params, cfg.seed, image_index=idx))


def cmd_dp(cfg: RunConfig, epsilon: float, sensitivity: float) -> int:
    spec = parse_spec(cfg.spec, strict=False)

    def transform(img, idx):
        out = run_pipeline(img, spec, cfg.params, cfg.seed, image_index=idx)
        dp = DpParams(epsilon, sensitivity, seed=node_seed(cfg.seed, 0, "DP", idx))
        return dp_noise(out, dp)

    return _batch(cfg, transform)


def cmd_spectrum(cfg: RunConfig, size: int | None) -> int:
    paths = _inputs(cfg)
    if size is None and len(paths) > 1:
        size = 256
    corpus = (read_image(p) for p in paths)
    report = average_spectra(corpus, cfg.spec, len(paths), cfg.params, cfg.seed,
                             convert_uint8=cfg.convert_uint8, size=size)
    text = report.to_json() if cfg.format == "json" else report.to_csv()
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(min_qubits: int, max_qubits: int, reps: int, dense_max: int, fmt: str | None,
              output: str | None, seed: int, step: int = 2) -> int:
    if not 1 <= min_qubits <= max_qubits <= 24:
        raise UsageError("need 1 <= --min-qubits <= --max-qubits <= 24")
    if dense_max > 12:
        raise ResourceLimitError("the dense oracle is capped at 12 qubits")
    rows = run_bench(min_qubits, max_qubits, reps, step=step, dense_max=dense_max, seed=seed)
    exponents = {p: fit_exponent(rows, p) for p in ("plan", "qrz", "dense")}
    if fmt == "json":
        text = json.dumps({"rows": [asdict(r) for r in rows], "exponents": exponents}, indent=2)
    else:
        lines = ["path,n_qubits,median_s,ratio_prev"]
        lines += [f"{r.path},{r.n_qubits},{r.median_s:.6g},{'' if r.ratio_prev is None else f'{r.ratio_prev:.3f}'}"
                  for r in rows]
        lines += [f"# exponent {p}={e:.3f}" for p, e in exponents.items()]
        text = "\n".join(lines) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _slug(method: str) -> str:
    return method.replace("(", "_").replace(")", "").replace("__", "_").strip("_") or "x"


def _tile(img: ImageBuffer) -> np.ndarray:
    ch = img.channels
    if img.complex_split:
        half = img.n_channels // 2
        return np.hstack([ch[:half].mean(axis=0), ch[half:].mean(axis=0)])
    return ch.mean(axis=0)


def cmd_demo(cfg: RunConfig) -> int:
    """Apply every catalog method to one image; write each result and a grid."""
    src = _inputs(cfg)[0]
    out_dir = _output_dir(cfg)
    img = _prepare(read_image(src), cfg)
    tiles, index = [], ["position,method"]
    for i, method in enumerate(METHODS):
        result = run_pipeline(img, method, cfg.params, cfg.seed)
        write_output(out_dir, f"{i:02d}_{_slug(method)}", result, "png", False)
        tiles.append(_tile(result))
        index.append(f"{i},{method}")
    width = max(t.shape[1] for t in tiles)
    height = max(t.shape[0] for t in tiles)
    per_row = 4
    grid = np.zeros((height * -(-len(tiles) // per_row), width * per_row))
    for i, t in enumerate(tiles):
        r, c = divmod(i, per_row)
        grid[r * height: r * height + t.shape[0], c * width: c * width + t.shape[1]] = t
    write_image(out_dir / "grid.png", grid)
    (out_dir / "grid_index.csv").write_text("\n".join(index) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--spec", help="augmentation method, e.g. 'real(QR_Z(F(PR(x))))'")
    common.add_argument("--theta-max", type=float, dest="theta_max", help="rotation bound (rad), default 0.01")
    common.add_argument("--gn-sigma", type=float, dest="gn_sigma", help="Gaussian noise std, default 1.0")
    common.add_argument("--cr-bound", type=float, dest="cr_bound", help="CR angle bound (deg), default 35")
    common.add_argument("--crop-enlarge", type=float, dest="crop_enlarge", help="crop enlargement, default 1.15")
    common.add_argument("--crop-out", type=lambda s: tuple(int(v) for v in s.lower().split("x")),
                        dest="crop_out", help="crop size ROWSxCOLS, default input size")
    common.add_argument("--seed", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--uint8", action="store_true", help="quantize to 8 bits before output/analysis")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--workers", type=int)
    common.add_argument("--resize-pow2", action="store_true", dest="resize_pow2")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="qaugment", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("augment", parents=[common], help="augment a file or directory of images")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")

    p = sub.add_parser("spectrum", parents=[common], help="singular value spectrum vs baseline")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--size", type=int, help="resize to SIZE x SIZE (default 256 for directories)")

    p = sub.add_parser("bench", parents=[common], help="kernel scaling benchmark")
    p.add_argument("--min-qubits", type=int, default=16)
    p.add_argument("--max-qubits", type=int, default=24)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--dense-max", type=int, default=12)
    p.add_argument("-o", "--output")

    p = sub.add_parser("dp", parents=[common], help="optional augmentation followed by Laplace noise")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sensitivity", type=float, default=255.0)

    p = sub.add_parser("demo", parents=[common], help="catalog of every method on one image")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        if args.command == "augment":
            return cmd_augment(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.size)
        if args.command == "bench":
            return cmd_bench(args.min_qubits, args.max_qubits, args.reps, args.dense_max,
                             cfg.format, cfg.output, cfg.seed, args.step)
        if args.command == "dp":
            return cmd_dp(cfg, args.epsilon, args.sensitivity)
        if args.command == "demo":
            return cmd_demo(cfg)
    except (UsageError, InvalidInputError) as exc:
        print(f"qaugment: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"qaugment: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"qaugment: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
