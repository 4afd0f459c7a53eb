#!/usr/bin/env python3
"""Smoke test for the dequad_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p dequad-py` (or --release), copies it next to this script
under the import name Python expects, and exercises the bindings.
"""

import json
import math
import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def locate_extension() -> pathlib.Path:
    candidates = []
    for profile in ("release", "debug"):
        for stem in ("libdequad_py.so", "dequad_py.dll", "libdequad_py.dylib"):
            p = ROOT / "target" / profile / stem
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit("extension not found; run `cargo build -p dequad-py` first")
    return max(candidates, key=lambda p: p.stat().st_mtime)


def main() -> None:
    src = locate_extension()
    dest = HERE / "dequad_py.so"
    shutil.copy2(src, dest)
    sys.path.insert(0, str(HERE))
    import dequad_py

    assert dequad_py.list_builtins() == ["p51", "p52", "p53", "p54"]

    value, h, abs_error = dequad_py.integrate("p51", "new", 60)
    assert abs(value - -2.0464508116069475) <= 5e-5, value
    assert h > 0
    assert abs_error is not None and abs_error <= 5e-5

    params = json.loads(dequad_py.solve("p51"))
    assert params["C"] > 0
    assert len(params["a"]) == len(params["b"]) + 1
    assert math.isclose(
        sum(params["a"]) - sum(params["b"]), params["T"], abs_tol=1e-8
    )

    assert abs(dequad_py.d_de("p51") - 0.346) <= 1e-3
    assert abs(dequad_py.beta2("p51") - 0.252) <= 0.05 * 0.252

    ref = dequad_py.oracle("p51", tol=1e-8)
    assert abs(ref - -2.0464508116069475) <= 1e-7

    try:
        dequad_py.integrate("p51", "warp", 10)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown method should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
