"""Compare the reported sigma_B with the spread of B over independent seeds.

    python3 scripts/error_bar_calibration.py --seeds 200 --shots 10000
"""

from __future__ import annotations

import argparse

import numpy as np

from bellfriends import stats
from bellfriends.cli import simulate_table
from bellfriends.noise import NoiseModel

MODELS = {
    "ideal": NoiseModel(),
    "ibm-like": NoiseModel(p1=1e-3, p2=1e-2, readout_flip=0.01),
    "ionq-rates": NoiseModel(p1=5e-4, p2=6.6e-3),
}


def calibrate(variant, model, seeds, shots):
    reports = [stats.chsh(simulate_table(variant, model, shots, seed=s)) for s in range(seeds)]
    b = np.array([r.B for r in reports])
    sig = np.array([r.sigma_B for r in reports])
    return b.mean(), b.std(ddof=1), sig.mean()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--variant", default="ibm-ecr")
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--shots", type=int, default=10**4)
    args = ap.parse_args(argv)
    print(f"{'model':<12} {'mean B':>8} {'std B':>10} {'sigma_B':>10} {'ratio':>6}")
    for name, model in MODELS.items():
        mean, std, sig = calibrate(args.variant, model, args.seeds, args.shots)
        print(f"{name:<12} {mean:8.4f} {std:10.3e} {sig:10.3e} {std / sig:6.3f}")


if __name__ == "__main__":
    main()
