#!/usr/bin/env python3
"""Regenerates tests/oracle_values.hpp from independent reference computations.

Uses mpmath for special functions and numpy/scipy for a brute-force star
discrepancy over the full critical grid. Nothing here touches the C++ code.
"""

import itertools
import pathlib
import sys

import mpmath as mp
import numpy as np
from scipy.stats import qmc

mp.mp.dps = 40


def star_discrepancy(pts):
    """Max over critical corners of both the open and closed deviation."""
    pts = np.asarray(pts, dtype=float)
    n, d = pts.shape
    axes = [np.unique(np.append(pts[:, j], 1.0)) for j in range(d)]
    best = 0.0
    for corner in itertools.product(*axes):
        c = np.array(corner)
        vol = float(np.prod(c))
        open_count = np.count_nonzero(np.all(pts < c, axis=1))
        closed_count = np.count_nonzero(np.all(pts <= c, axis=1))
        best = max(best, vol - open_count / n, closed_count / n - vol)
    return best


def inverse_normal(u):
    return mp.sqrt(2) * mp.erfinv(2 * mp.mpf(u) - 1)


def asian_payoff(u, s0=50, k=45, t=1, r=mp.mpf("0.05"), sigma=mp.mpf("0.3")):
    d = len(u)
    dt = mp.mpf(t) / d
    s = mp.mpf(s0)
    total = 0
    for uj in u:
        z = inverse_normal(uj)
        s = s * mp.exp((r - sigma**2 / 2) * dt + sigma * mp.sqrt(dt) * z)
        total += s
    return mp.exp(-r * t) * max(total / d - k, 0)


def main(out):
    lines = ["#pragma once", "",
             "// Generated by tools/oracles/freeze.py; do not edit by hand.", "",
             "#include <array>", "#include <vector>", "",
             "namespace oracle {", ""]

    us = ["0.975", "0.3", "0.001", "1e-10", "0.999999"]
    lines.append("struct Quantile { double u; double z; };")
    lines.append("inline constexpr std::array<Quantile, %d> kInverseNormal{{" % len(us))
    for u in us:
        lines.append("    {%s, %s}," % (u, mp.nstr(inverse_normal(u), 20)))
    lines.append("}};")
    lines.append("")

    sob = qmc.Sobol(d=2, scramble=False)
    raw = sob.random(256)
    lines.append("// Unscrambled 2D Sobol' (origin included), n = 8 ... 256.")
    lines.append("inline constexpr std::array<double, 6> kSobolStar{")
    for m in range(3, 9):
        lines.append("    %.17g," % star_discrepancy(raw[: 2**m]))
    lines.append("};")
    lines.append("")

    rng = np.random.default_rng(20240611)
    lines.append("struct StarCase { int d; std::vector<double> coords; double value; };")
    lines.append("inline const std::vector<StarCase> kStarCases{")
    for d, n in [(1, 7), (2, 5), (2, 13), (3, 6), (3, 11)]:
        p = np.round(rng.random((n, d)), 6)
        coords = ", ".join("%.6f" % x for x in p.ravel())
        lines.append("    {%d, {%s}, %.17g}," % (d, coords, star_discrepancy(p)))
    lines.append("};")
    lines.append("")

    lines.append("inline constexpr double kAsianMidPayoff = %s;" %
                 mp.nstr(asian_payoff(["0.5"] * 12), 20))
    r, t, d = mp.mpf("0.05"), 1, 12
    zero_vol = mp.exp(-r * t) * (sum(50 * mp.exp(r * j * mp.mpf(t) / d) for j in range(1, d + 1)) / d - 45)
    lines.append("inline constexpr double kAsianZeroVol = %s;" % mp.nstr(zero_vol, 20))
    trunc = (1 - mp.mpf(-0.5) ** 100) / -3
    lines.append("inline constexpr double kTruncationIntegral100 = %s;" % mp.nstr(trunc, 20))
    lines.append("")
    lines.append("}  // namespace oracle")
    pathlib.Path(out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/oracle_values.hpp")
