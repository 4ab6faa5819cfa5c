#!/usr/bin/env python
"""Cat-basis spin-mapping deviation table.

For each lattice size and cat amplitude, projects the bosonic Hamiltonian
onto the tensor-product cat basis and reports the worst matrix-element
deviation from the XY spin model built from the closed-form coefficients.
The deviation is pure truncation error and falls off exponentially with
the Fock cutoff.

    python scripts/mapping_table.py
    python scripts/mapping_table.py --u 40 --j 20 --extra 10
"""
import argparse
import sys

import numpy as np

from catlattice.fock import FockSpace
from catlattice.lattice import ModelParams, chain
from catlattice.spinmap import required_n_max, validate_mapping


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--u", type=float, default=100.0)
    ap.add_argument("--j", type=float, default=50.0)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--extra", type=int, default=6,
                    help="levels beyond the required cutoff (default 6)")
    args = ap.parse_args()

    p = ModelParams.resonant(u=args.u, j_hop=args.j, g=args.g)
    print("U=%g J=%g G=%g, cutoff = required + %d"
          % (args.u, args.j, args.g, args.extra))
    print("%8s %6s %7s %12s" % ("|alpha|^2", "N", "n_max", "deviation"))
    worst = 0.0
    for x in (0.5, 1.0, 2.0):
        alpha = np.sqrt(x)
        n_max = required_n_max(alpha) + args.extra
        f = FockSpace(n_max)
        for n_sites in (1, 2, 3):
            dev = validate_mapping(alpha, p, chain(n_sites), f)
            worst = max(worst, dev)
            print("%8.2f %6d %7d %12.3e" % (x, n_sites, n_max, dev))
    print("worst: %.3e" % worst)
    return 0


if __name__ == "__main__":
    sys.exit(main())
