#!/usr/bin/env python3
"""Smoke test for the bvpair_py extension module.

Builds the cdylib if needed, loads it, and replays the worked example:
the pairing of the indicator field against the indicator function carries
the two atoms (1 - lambda(-1)) at -1 and (lambda(1) - 1) at +1, on both
construction routes, with zero rational residual.

Run from the repository root:  python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_and_import():
    lib = ROOT / "target" / "debug" / "libbvpair_py.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "-p", "bvpair-py"], cwd=ROOT, check=True
        )
    stage = pathlib.Path(tempfile.mkdtemp(prefix="bvpair-py-"))
    shutil.copy(lib, stage / "bvpair_py.so")
    sys.path.insert(0, str(stage))
    import bvpair_py

    return bvpair_py


def main():
    bp = build_and_import()

    # the worked example: A = chi_(-1,1), u = chi_[-1,1] on (-2,2)
    chi = ["-2", "-1", "1", "2"], [["0"], ["1"], ["0"]]
    field = bp.Field(*chi)
    u = bp.BVFunction(*chi)
    sel = bp.Selector("1/2", {"-1": "1", "1": "0"})

    assert field.divergence().to_text() == "ac: []; atoms: [(-1,1), (1,-1)]; cantor: []"
    assert field.sup_norm() == "1"
    assert field.selector_class(sel) == "lsc"
    assert u.approx_limits("-1") == ("0", "1")

    p1 = bp.pairing_by_definition(field, u, sel)
    p2 = bp.pairing_by_decomposition(field, u, sel)
    assert p1 == p2, "routes disagree"
    # lambda(-1) = 1, lambda(1) = 0: atoms (1-1) delta_{-1} + (0-1) delta_1
    assert p1.atoms() == [("1", "-1")], p1.atoms()

    lsc, usc = bp.extremal_pairings(field, u)
    assert lsc.atoms() == [("1", "-1")] and usc.atoms() == [("-1", "1")]

    mid = bp.Selector("1/2")
    pm = bp.pairing_by_definition(field, u, mid)
    assert pm.atoms() == [("-1", "1/2"), ("1", "-1/2")], pm.atoms()

    # weak evaluation agrees with the measure action
    phi = (["-2", "2"], [["5", "1", "1"]])
    direct = pm.act(*phi)
    weak = bp.pairing_act(field, u, mid, *phi)
    assert direct == weak == ("-1", "0"), (direct, weak)

    # traces and mollification at the jump
    assert field.traces("-1", 1) == ("0", "1", "1/2")
    smoothed = field.mollify("1/8")
    assert smoothed.divergence().eval_interval("-9/8", "-7/8") == ("1", "0")

    # a staircase derivative has unit mass and restricts self-similarly
    stair = bp.BVFunction(["0", "1"], [["0"]], [("0", "1", "1")])
    d = stair.derivative()
    assert d.mass() == ("1", "0")
    assert d.eval_interval("0", "1/3") == ("1/2", "0")

    # truncation and level sets
    ramp = bp.BVFunction(["0", "1"], [["0", "2"]])
    t = ramp.truncate("1")
    assert t.sup_norm() == "1"
    assert ramp.level_set("1/2") == [("1/4", "1")]

    # measure round trip through the canonical text form
    m = bp.Measure.from_text("ac: [(0,1,[0,1])]; atoms: [(1/2,3)]; cantor: [(0,1,1)]")
    assert bp.Measure.from_text(m.to_text()) == m

    # the registry and a bundled scenario end to end
    names = [n for n, _ in bp.list_checks()]
    for required in ("coarea", "gauss_green", "semicontinuity"):
        assert required in names
    report = json.loads(bp.run_scenario_file(str(ROOT / "scenarios" / "example_7_1.json")))
    assert report["pass"] is True
    assert report["schema"] == 1

    print("smoke test: PASS")


if __name__ == "__main__":
    main()
