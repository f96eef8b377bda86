"""Mean absolute pixel change of Laplace noising over epsilon and rotation strength.

Mirrors the DP_eps(abs(QR_{Z,theta}(x))) composition on the cameraman image;
the abs-of-Z stage is an identity on nonnegative pixels, so only epsilon moves
the numbers. The XYZ variant shows a rotation that does change pixels.

    python3 scripts/dp_sweep.py
"""
import numpy as np
from skimage import data

from qaugment.augment import AugmentParams
from qaugment.dsl import parse_spec, run_pipeline
from qaugment.privacy import DpParams, dp_noise
from qaugment.spectral import prepare_image


def main():
    img = prepare_image(data.camera(), 256)
    print(f"{'spec':22s} {'theta':>6s} {'eps':>6s} {'mean |change|':>14s}")
    for axes in ("Z", "XYZ"):
        spec = parse_spec(f"abs(QR_{axes}(x))", strict=False)
        for theta in (0.01, 0.15, 1.0):
            rotated = run_pipeline(img, spec, AugmentParams(theta_max=theta), seed=0)
            for eps in (0.5, 5.0, 50.0):
                noisy = dp_noise(rotated, DpParams(eps, seed=0))
                change = np.abs(noisy.channels - img.channels).mean()
                print(f"{str(spec):22s} {theta:6.2f} {eps:6.1f} {change:14.3f}")


if __name__ == "__main__":
    main()
