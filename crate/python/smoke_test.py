#!/usr/bin/env python3
"""Smoke test for the interfgeo_py extension module.

Builds nothing itself: expects `cargo build -p interfgeo-py` (or --release)
to have produced target/<profile>/libinterfgeo_py.so. Copies the shared
object next to a temp dir under the import name and runs a few checks with
known closed-form answers.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def locate_extension() -> Path:
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libinterfgeo_py.so", "interfgeo_py.so", "libinterfgeo_py.dylib")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "extension not found; run `cargo build -p interfgeo-py` first "
        f"(searched {[str(c) for c in candidates]})"
    )


def import_module():
    src = locate_extension()
    staging = Path(tempfile.mkdtemp(prefix="interfgeo-py-"))
    shutil.copy2(src, staging / "interfgeo_py.so")
    sys.path.insert(0, str(staging))
    import interfgeo_py

    return interfgeo_py


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    ig = import_module()

    # thermal kernels
    approx(ig.thermal_factors(0.0)[0], 0.5)
    approx(ig.thermal_factors(0.0)[1], 0.5)
    inv, ratio = ig.thermal_factors(1000.0)
    assert math.isfinite(inv) and math.isfinite(ratio)
    approx(ratio, 1.0, 1e-15)

    # linear algebra plumbing
    approx(ig.nuclear_norm([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3.0)
    evals, evecs = ig.eigh([[0, 1], [1, 0]])
    approx(evals[0], -1.0)
    approx(evals[1], 1.0)

    # Gibbs state of sigma_z at beta = 1
    z = 2.0 * math.cosh(1.0)
    rho = ig.MixedState.gibbs([[1, 0], [0, -1]], 1.0)
    approx(rho.matrix()[0][0].real, math.exp(-1.0) / z)
    assert rho.dim == 2
    assert rho.tau() == [1, 1]

    # four-level Fock-type spectrum {0, E, -E, 0} has type (1, 1, 2)
    fock = ig.MixedState.gibbs(
        [[0, 0, 0, 0], [0, 1.3, 0, 0], [0, 0, -1.3, 0], [0, 0, 0, 0]], 0.8
    )
    assert fock.tau() == [1, 1, 2]

    # interferometric distance: commuting pair closed form
    d = ig.dist_base(
        ig.MixedState([[0.7, 0], [0, 0.3]]), ig.MixedState([[0.6, 0], [0, 0.4]])
    )
    approx(d * d, 2.0 * (1.0 - math.sqrt(0.42) - math.sqrt(0.12)), 1e-13)
    sampled = ig.dist_base_bruteforce(
        ig.MixedState([[0.7, 0], [0, 0.3]]),
        ig.MixedState([[0.6, 0], [0, 0.4]]),
        samples=500,
        seed=7,
    )
    assert sampled >= d - 1e-9
    approx(sampled, d, 1e-6)

    # Mach-Zehnder: maximally mixed state with a sigma_z arm
    half = ig.MixedState([[0.5, 0], [0, 0.5]])
    approx(ig.port_probability(half, [[1, 0], [0, -1]], [[1, 0], [0, 1]]), 0.5)
    pr_max, v_opt = ig.max_port_probability(half, [[1, 0], [0, -1]])
    approx(pr_max, 1.0, 1e-12)

    # pullback integrands at the reference momentum
    interf, bures, fs = ig.integrands("dirac", [math.pi / 2, math.pi / 2], 1.0, 2.0)
    approx(fs, 1.0 / 18.0, 1e-14)
    assert interf > bures > 0.0

    # Chern phase map
    assert ig.chern_number("dirac", -1.0, 41) == 1
    assert ig.chern_number("dirac", 1.0, 41) == -1
    assert ig.chern_number("dirac", 3.0, 41) == 0

    # a tiny scan shows the critical ridge at M = 0
    rows = ig.metric_scan("dirac", [-0.5, 0.0, 0.5], [0.5], 101)
    assert len(rows) == 3
    totals = [r["g_interf_total"] for r in rows]
    assert totals[1] > totals[0] and totals[1] > totals[2]
    assert all(r["gapless_cells"] == 0 for r in rows)

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
