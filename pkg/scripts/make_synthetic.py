#!/usr/bin/env python3
"""Generate the synthetic benchmark datasets as CSV files.

Examples:
    python scripts/make_synthetic.py blobs --out blobs.csv --seed 1
    python scripts/make_synthetic.py manifold --out manifold.csv
    python scripts/make_synthetic.py separable --out separable.csv
"""

import argparse
import sys

from nearline.data import save_csv
from nearline.synthetic import gaussian_blobs, manifold_classes, separable_clusters


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("kind", choices=("blobs", "manifold", "separable"))
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-per-class", type=int, default=50)
    parser.add_argument("--classes", type=int, default=3)
    parser.add_argument("--dim", type=int, default=50)
    args = parser.parse_args(argv)

    if args.kind == "blobs":
        ds = gaussian_blobs(
            n_per_class=args.n_per_class, n_classes=args.classes, d=args.dim, seed=args.seed
        )
    elif args.kind == "manifold":
        ds = manifold_classes(
            n_per_class=args.n_per_class,
            n_classes=args.classes,
            ambient_dim=args.dim,
            seed=args.seed,
        )
    else:
        ds = separable_clusters(
            n_per_class=args.n_per_class,
            n_classes=args.classes,
            d=min(args.dim, 8),
            seed=args.seed,
        )
    save_csv(ds, args.out)
    print(f"wrote {args.out}: n={ds.n} d={ds.d} classes={len(set(ds.labels.tolist()))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
