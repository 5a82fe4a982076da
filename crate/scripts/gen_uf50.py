#!/usr/bin/env python3
"""Generate uf50-218 / uuf50-218 style benchmark sets.

Uniform random 3-SAT with 50 variables and 218 clauses (three distinct
variables per clause, fair polarities), split into satisfiable and
unsatisfiable instances with an independent solver (MiniSat 2.2 via
python-sat). Deterministic in --seed.

    pip install python-sat
    python3 scripts/gen_uf50.py --out crates/core/tests/data
"""

import argparse
import random
from pathlib import Path

from pysat.solvers import Minisat22

N_VARS = 50
N_CLAUSES = 218


def random_3sat(rng):
    clauses = []
    for _ in range(N_CLAUSES):
        vs = rng.sample(range(1, N_VARS + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses


def write(path, clauses, sat):
    kind = "satisfiable" if sat else "unsatisfiable"
    lines = [
        f"c uniform random 3-SAT, {N_VARS} variables, {N_CLAUSES} clauses ({kind})",
        f"p cnf {N_VARS} {N_CLAUSES}",
    ]
    lines += [" ".join(str(l) for l in c) + " 0" for c in clauses]
    path.write_text("\n".join(lines) + "\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=20120415)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    sat_dir = args.out / "uf50-218"
    unsat_dir = args.out / "uuf50-218"
    sat_dir.mkdir(parents=True, exist_ok=True)
    unsat_dir.mkdir(parents=True, exist_ok=True)

    n_sat = n_unsat = 0
    while n_sat < args.count or n_unsat < args.count:
        clauses = random_3sat(rng)
        with Minisat22(bootstrap_with=clauses) as solver:
            sat = solver.solve()
        if sat and n_sat < args.count:
            n_sat += 1
            write(sat_dir / f"uf50-{n_sat:03d}.cnf", clauses, True)
        elif not sat and n_unsat < args.count:
            n_unsat += 1
            write(unsat_dir / f"uuf50-{n_unsat:03d}.cnf", clauses, False)


if __name__ == "__main__":
    main()
