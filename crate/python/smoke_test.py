"""Smoke test for the `hofer_bars` extension.

Build first with `cargo build -p hofer-bars-py`; the script loads
target/debug/libhofer_bars_py.so (or HOFER_BARS_LIB) under the module name.
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    lib = Path(os.environ.get("HOFER_BARS_LIB", ROOT / "target" / "debug" / "libhofer_bars_py.so"))
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, Path(tmp) / "hofer_bars.so")
    sys.path.insert(0, tmp)
    import hofer_bars

    return hofer_bars


def main():
    hb = load()

    tent = hb.Profile([("0", "0"), ("1/2", "1/4"), ("1", "0")], "1")
    assert tent.value_at("1/4") == "1/8"
    assert hb.Profile.from_text(tent.to_text()).points() == tent.points()
    try:
        hb.Profile([("0", "0"), ("1/2", "1/4"), ("1", "5/4")], "1")
    except ValueError as e:
        assert "slope" in str(e)
    else:
        raise AssertionError("slope violation accepted")

    flat = hb.Params(1, 0, "0", 0, "1")
    acts = [a for d in range(-2, 3) for a in hb.enumerate_spectrum(tent, flat, d)]
    assert [(a["degree"], a["value"]) for a in acts] == [(-1, "0"), (-1, "0"), (0, "1/4"), (1, "1/4")]

    b = hb.Barcode(0, [("0", "10")])
    c = hb.Barcode(0, [("1", "10")])
    assert hb.bottleneck_distance(b, b) == "0"
    assert hb.bottleneck_distance(b, c) == "1"
    assert hb.bottleneck_distance(hb.Barcode(0, [("0", "2")]), hb.Barcode(0, [])) == "1"

    gens = [(0, "0", "a"), (0, "1", "b"), (0, "1", "c"), (1, "2", "ab"), (1, "2", "bc"), (1, "3", "ca"), (2, "5", "t")]
    bd = [[], [], [], [(1, "1"), (0, "-1")], [(2, "1"), (1, "-1")], [(0, "1"), (2, "-1")], [(3, "1"), (4, "1"), (5, "1")]]
    for field in ("Q", "Z2"):
        codes = hb.reduce_complex(gens, bd, field)
        assert codes[1].bars() == [("3", "5")], codes[1].bars()
        assert codes[1].to_svg().startswith("<svg")

    s2 = hb.Params.sphere("9/10")
    assert s2.case() == 1
    cert = hb.certificate(s2, "1/20", ["1"])
    assert cert["case"] == 1 and cert["eventLog"]
    bound, k = hb.boundary_depth_bound(s2, "1/20", ["1/2", "1"])
    assert k == 2
    target = Fraction(4, 5) * 2 * 3.141592653589793 - 0.35
    assert float(bound["decimal"]) >= target - 1e-12, (bound, target)

    w = hb.hofer_window(s2, "1/20", ["1", "0"], ["0", "1"])
    lo, osc, hi = (float(w[k]["decimal"]) for k in ("lower", "oscillation", "upper"))
    assert lo <= osc <= hi, w

    cli = ROOT / "target" / "debug" / "hofer-bars"
    if cli.exists():
        with tempfile.TemporaryDirectory() as d:
            sc = Path(d) / "s2.txt"
            sc.write_text("n=1\nN=2\ngamma2pi=2\nR=9/10\nepsilon=1/20\na=1\n")
            out = subprocess.run([cli, "certificate", sc], capture_output=True, check=True)
            report = json.loads(out.stdout)
            try:
                import jsonschema
            except ImportError:
                jsonschema = None
            if jsonschema is not None:
                schemas = ROOT / "schemas"
                registry = None
                try:
                    from referencing import Registry, Resource

                    registry = Registry().with_resources(
                        (p.name, Resource.from_contents(json.loads(p.read_text()))) for p in schemas.glob("*.json")
                    )
                except ImportError:
                    pass
                schema = json.loads((schemas / "certificate.schema.json").read_text())
                kw = {"registry": registry} if registry is not None else {}
                jsonschema.Draft202012Validator(schema, **kw).validate(report)
            assert report["meetsTarget"] is True

    print("smoke test ok")


if __name__ == "__main__":
    main()
