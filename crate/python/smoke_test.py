"""Smoke test for the perfcode extension module.

Build with `cargo build --release -p perfcode-python`, then run
`python3 python/smoke_test.py target/release/libperfcode.so`; the library is
copied next to a temporary `perfcode.so` and imported from there.
"""

import importlib
import json
import shutil
import sys
import tempfile
from pathlib import Path


def load(library):
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(library, tmp / "perfcode.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("perfcode")


def main():
    library = sys.argv[1] if len(sys.argv) > 1 else "target/release/libperfcode.so"
    pc = load(library)

    codes = pc.perfect_codes()
    assert len(codes) == 240, len(codes)
    assert sum(0 in c for c in codes) == 30
    assert all(len(c) == 16 and c.min_distance() == 3 for c in codes)

    assert pc.partition_class_count(8) == 10

    families = dict(pc.fano_families())
    assert len(families["X"]) == 7 and len(families["Y"]) == 7

    k9 = pc.double(0, 0, "01234576")
    assert len(k9) == 2048 and k9.length == 16
    assert pc.Code.from_json(k9.to_json()).words == k9.words
    assert k9.analyze() == {"rank": 12, "kernelDim": 9, "cosetCount": 4}

    types = k9.sts_types()
    assert types["stsHomogeneous"] and not types["unknownSignatures"]

    report = k9.verify()
    assert report["pass"] and report["kappa"] == 9

    graph = k9.export("json")
    assert pc.verify_graph(graph)["pass"]
    rows = k9.export("csv").strip().splitlines()[1:]
    assert all(sum(map(int, r.split(",")[1:])) == 140 for r in rows)

    for bad in (lambda: pc.double(0, 0, "0123"), lambda: k9.export("svg")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("perfcode smoke test ok:", json.dumps(k9.analyze()))


if __name__ == "__main__":
    main()
