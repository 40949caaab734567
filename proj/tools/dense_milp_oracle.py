#!/usr/bin/env python3
"""Independent check of a graph's maximum modularity.

Solves the dense clique-partitioning integer program (every triangle
inequality) with the HiGHS MILP solver bundled in SciPy. Used to pin the
karate optimum in the test suite; not part of the build.

    python3 tools/dense_milp_oracle.py data/karate.txt [--gamma 1.0]
"""
import argparse
import itertools

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("edgelist")
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    edges = []
    with open(args.edgelist) as f:
        for line in f:
            tok = line.split()
            if len(tok) >= 2 and not tok[0].startswith("#"):
                edges.append((tok[0], tok[1], float(tok[2]) if len(tok) > 2 else 1.0))
    labels = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges},
                    key=lambda s: (0, int(s)) if s.isdigit() else (1, s))
    ix = {s: i for i, s in enumerate(labels)}
    n = len(labels)
    a = np.zeros((n, n))
    for u, v, w in edges:
        a[ix[u], ix[v]] += w
        a[ix[v], ix[u]] += w
    d = a.sum(axis=1)
    two_m = d.sum()
    b = a - args.gamma * np.outer(d, d) / two_m

    pairs = list(itertools.combinations(range(n), 2))
    col = {p: k for k, p in enumerate(pairs)}
    # y_ij = 1 when i and j share a community
    cost = -np.array([2.0 * b[i, j] / two_m for i, j in pairs])
    constant = np.trace(b) / two_m
    rows, cols, vals = [], [], []
    r = 0
    for i, j, k in itertools.combinations(range(n), 3):
        ij, ik, jk = col[(i, j)], col[(i, k)], col[(j, k)]
        for x, y, z in ((ij, ik, jk), (ij, jk, ik), (ik, jk, ij)):
            rows += [r, r, r]
            cols += [x, y, z]
            vals += [1, 1, -1]
            r += 1
    m = sp.csr_matrix((vals, (rows, cols)), shape=(r, len(pairs)))
    res = milp(cost, constraints=LinearConstraint(m, -np.inf, 1),
               integrality=np.ones(len(pairs)), bounds=Bounds(0, 1),
               options={"time_limit": args.time_limit})
    status = "optimal" if res.status == 0 else res.message
    print(f"{float(constant - res.fun)!r} {status}")


if __name__ == "__main__":
    main()
