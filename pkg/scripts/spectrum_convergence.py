"""Boundary shift of the ball spectrum as the window grows.

For each r the eigenvalue of one real-basis element is read off the dense
exact operator matrix and compared with the eigenvalue on Q_p.  The gap should
shrink by p^-alpha per step.  Writes a CSV table to stdout or ``--out``.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from fractions import Fraction

from padic_spectral.bases import build_phi
from padic_spectral.io import atomic_write, csv_text
from padic_spectral.operators import vladimirov_eigenvalue_Qp, vladimirov_matrix
from padic_spectral.padic import enumerate_cosets


@dataclass
class ConvergenceConfig:
    p: int = 2
    alpha: int = 1
    r_max: int = 6
    depth: int = 2  # r - l for p > 2; p = 2 always uses l = 0 and gamma = 1


def gap_table(cfg: ConvergenceConfig) -> list[tuple]:
    rows, prev = [], None
    for r in range(1, cfg.r_max + 1):
        if cfg.p == 2:
            grid, gamma = enumerate_cosets(2, r, 0), 1
        else:
            l = r - cfg.depth
            grid, gamma = enumerate_cosets(cfg.p, r, l), l + 1
        phi = build_phi(gamma, 0, 1, grid)
        image = vladimirov_matrix(grid, cfg.alpha).apply(phi)
        i = next(m for m, v in enumerate(phi.data.scalars()) if v != 0)
        lam = image.data[i] / phi.data[i]
        assert image.equals(phi * lam), "basis element is not an eigenvector"
        gap = lam - vladimirov_eigenvalue_Qp(gamma, cfg.alpha, cfg.p)
        ratio = "" if prev is None else gap / prev
        rows.append((r, grid.l, gamma, lam, gap, float(gap), ratio))
        prev = gap
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--r-max", type=int, default=6)
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--out")
    ns = ap.parse_args(argv)
    cfg = ConvergenceConfig(ns.p, ns.alpha, ns.r_max, ns.depth)
    text = csv_text(["r", "l", "gamma", "eigenvalue", "gap", "gap_float", "ratio"],
                    [[str(c) if isinstance(c, Fraction) else c for c in row] for row in gap_table(cfg)])
    if ns.out:
        atomic_write(ns.out, text)
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
