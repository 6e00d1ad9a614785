"""Smoke test for the neqcasimir_py extension module.

Build and run from the repository root:

    cargo build --release -p neqcasimir-py --features extension-module
    python3 python/smoke_test.py

The script locates target/release/libneqcasimir_py.so, copies it to a
temporary directory under the importable name and exercises the bindings.
"""

import importlib
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libneqcasimir_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libneqcasimir_py.so not found; build with "
                 "`cargo build --release -p neqcasimir-py --features extension-module`")
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "neqcasimir_py.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("neqcasimir_py")


def check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
    return ok


def main():
    nc = load_module()
    results = []

    sic = nc.Material.sic()
    eps = sic.epsilon(1e13)
    results.append(check("sic static permittivity", abs(eps.real - 10.05) < 0.05, f"eps={eps:.4f}"))

    lam = nc.thermal_wavelength(300.0)
    results.append(check("thermal wavelength 300 K", abs(lam / 7.63e-6 - 1) < 0.01, f"{lam:.4e} m"))

    cold = nc.Cylinder(1e-7, sic, 0.0)
    warm = nc.Cylinder(1e-7, sic, 300.0)
    controls = nc.Controls(rel_tol=1e-3)

    zero = nc.interaction_force(cold, warm, 0.0, 2e-6, controls=controls)
    results.append(check("zero source temperature gives zero", zero.total == 0.0))

    f = nc.interaction_force(warm, cold, 300.0, 2e-6, controls=controls)
    near, _, _ = nc.interaction_asymptotic(1e-7, 1e-7, sic, sic, 300.0, 2e-6, "far", controls)
    results.append(check("engine vs far closed form at 2 um",
                         abs(f.total / near - 1) < 0.15, f"engine={f.total:.4e} closed={near:.4e}"))

    b = nc.total_force(warm, warm, 300.0, 2e-6, f_eq=-1e-15, controls=controls)
    results.append(check("equal temperatures reproduce equilibrium",
                         b.total_1 == -1e-15 and b.total_2 == 1e-15))

    w = nc.weight_per_length(19300.0, 2e-8) * 1e-6
    results.append(check("tungsten wire weight per um", abs(w / 0.24e-15 - 1) < 0.05, f"{w:.3e} N"))
    a = nc.ampere_force_per_length(17e-6, 17e-6, 0.4e-6) * 1e-6
    results.append(check("Ampere force per um", abs(a / 0.145e-15 - 1) < 0.05, f"{a:.3e} N"))

    try:
        nc.Cylinder(-1.0, sic, 0.0)
        results.append(check("negative radius rejected", False))
    except ValueError:
        results.append(check("negative radius rejected", True))

    if not all(results):
        sys.exit(1)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
