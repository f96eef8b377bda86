"""Mean spectrum difference to the baseline for every catalog method.

Uses the standard scikit-image test images (grayscale, 256x256) as a small
corpus, with and without 8-bit conversion, and writes one CSV per setting.

    python3 scripts/spectrum_catalog.py --out spectra/
"""
import argparse
from pathlib import Path

import numpy as np
from skimage import data

from qaugment.augment import AugmentParams
from qaugment.dsl import METHODS
from qaugment.spectral import average_spectra

NAMES = ("camera", "astronaut", "coins", "moon", "page", "text", "clock", "horse")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="spectra")
    ap.add_argument("--theta-max", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    corpus = [getattr(data, n)().astype(float) for n in NAMES]
    params = AugmentParams(theta_max=args.theta_max)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for convert in (False, True):
        diffs = {}
        for method in METHODS:
            rep = average_spectra(corpus, method, len(corpus), params, args.seed, convert_uint8=convert)
            diffs[method] = rep.diff_vs_baseline[0]
            print(f"uint8={convert!s:5s} {method:28s} max |diff| {np.max(np.abs(diffs[method])):.3e}")
        path = out / f"catalog_uint8_{int(convert)}.csv"
        header = "index," + ",".join(f'"{m}"' for m in METHODS)
        table = np.column_stack([np.arange(256)] + [diffs[m] for m in METHODS])
        np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.10g")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
