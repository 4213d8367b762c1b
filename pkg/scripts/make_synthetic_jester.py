"""Generate a synthetic ratings CSV in the joke-recommendation layout.

Each row is one user: a leading count of rated items followed by 100
raw ratings in [-10, 10], with 99 marking a missing rating.  The file
is deterministic in the seed, so a regenerated dataset reproduces every
downstream run byte for byte.
"""

import argparse
import sys

import numpy as np

from olfw.scenarios import RATING_SENTINEL, synthetic_ratings


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--users", type=int, default=2500)
    parser.add_argument("--items", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--missing", type=float, default=0.1,
                        help="fraction of ratings replaced by the sentinel")
    parser.add_argument("--out", default="data/jester_synthetic.csv")
    args = parser.parse_args(argv)

    raw = synthetic_ratings(args.users, args.items, args.seed, args.missing)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        for row in raw:
            rated = int(np.count_nonzero(row != RATING_SENTINEL))
            cells = [str(rated)] + ["%.2f" % v for v in row]
            fh.write(",".join(cells) + "\n")
    print("wrote %d users x %d items to %s" % (args.users, args.items, args.out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
