"""How strong must setting-time ZZ crosstalk be before the signaling scan sees it?

    python3 scripts/crosstalk_scan.py --shots 1000000

Prints the exact largest |delta P| and the sampled max |z| for each coupling.
"""

from __future__ import annotations

import argparse

from bellfriends import stats
from bellfriends.cli import simulate_table
from bellfriends.noise import NoiseModel

THETAS = (0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--variant", default="ibm-ecr")
    ap.add_argument("--shots", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'theta':>6} {'max|dP| exact':>14} {'B exact':>8} {'max|z|':>8}  direction")
    for theta in THETAS:
        model = NoiseModel(crosstalk_zz=theta)
        exact = simulate_table(args.variant, model, None)
        dmax = max(abs(e.delta) for e in stats.signaling_scan(exact).entries)
        sampled = stats.signaling_scan(simulate_table(args.variant, model, args.shots, args.seed))
        print(f"{theta:6.3f} {dmax:14.3e} {stats.chsh(exact).B:8.4f} {sampled.max_abs_z():8.2f}  {sampled.direction}")


if __name__ == "__main__":
    main()
