#!/usr/bin/env python3
"""Smoke test for the orlicz_flow_py extension module.

Build the module first (either profile works):

    cargo build -p orlicz-flow-py --release

then run

    python3 python/smoke_test.py
"""

import importlib.util
import json
import math
import pathlib
import sys
import tempfile


def load_module():
    root = pathlib.Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / "release" / "liborlicz_flow_py.so",
        root / "target" / "debug" / "liborlicz_flow_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("build the extension first: cargo build -p orlicz-flow-py --release")
    spec = importlib.util.spec_from_file_location("orlicz_flow_py", built[0])
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    print(f"loaded {built[0]}")
    return mod


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    of = load_module()

    # grids and integration
    grid = of.Grid([0.5, 1.0, 0.25])
    assert grid.node_count == 3
    approx(grid.mass, 1.75)
    approx(grid.integrate([2.0, 1.0, 4.0]), 3.0)
    interval = of.Grid.uniform_interval(5, 1.0)
    approx(interval.mass, 1.0)
    assert interval.labels[0] == 0.0 and interval.labels[-1] == 1.0

    # convex catalog: values, subdifferentials, conjugacy
    sq = of.ConvexFn("power:2")
    approx(sq(3.0), 4.5)
    lo, hi = sq.subdifferential(3.0)
    approx(lo, 3.0)
    approx(hi, 3.0)
    assert sq.is_even
    conj = sq.conjugate()
    approx(conj(2.0), 2.0)  # (|x|²/2)* = |ξ|²/2
    approx(sq.legendre_numeric(2.0), 2.0, 1e-7)
    d2 = sq.delta2([0.5, 1.0, 2.0])
    assert d2["passes"] and abs(d2["k"] - 4.0) <= 1e-9
    assert sq.superlinear(1.0) and sq.superlinear(-1.0)
    assert not of.ConvexFn("linear_abs").superlinear(1.0)
    approx(sq.coercivity(1.0), 0.5)
    kink = of.ConvexFn("linear_abs").subdifferential(0.0)
    assert kink == (-1.0, 1.0)

    # modular space: norms sandwich within a factor of two
    space = of.OrliczSpace(of.ConvexFn("bp_primal"), grid)
    u = [1.0, -0.5, 2.0]
    lux = space.luxemburg(u)
    ame = space.amemiya(u)
    assert 0 < lux <= ame <= 2.0 * lux * (1 + 1e-9), (lux, ame)
    assert space.modular([0.0, 0.0, 0.0]) == 0.0
    lhs, rhs, holds = space.holder(u, [0.5, 1.0, -0.25])
    assert holds and lhs <= rhs
    assert space.conjugate_modular_gap([0.3, -0.2, 0.1]) <= 1e-8

    # solver: quadratic flow matches the implicit Euler resolvent exactly
    g1 = of.Grid([1.0])
    pot = of.Potential.nodewise(of.ConvexFn("power:2"), g1)
    energy = of.Energy.quadratic(g1, 1.0)
    sol = of.solve(pot, energy, [1.0], 1.0, 0.1)
    states = sol.states
    assert len(states) == 11
    for n, state in enumerate(states):
        approx(state[0], (1.0 / 1.1) ** n, 1e-10)
    report = sol.report()
    assert report["classification"] in ("energy", "lyapunov")
    assert max(report["fy_gaps"]) <= 1e-9
    assert report["max_interval_residual"] <= 1e-9
    mid = sol.interpolate(0.05, "affine")[0]
    approx(mid, 0.5 * (1.0 + 1.0 / 1.1), 1e-10)

    # rate-constrained flow never moves upward
    g4 = of.Grid([1.0, 1.0, 1.0, 1.0])
    dmg = of.solve(of.Potential.damage(g4), of.Energy.quadratic(g4, 1.0),
                   [2.0, 1.0, 0.0, -1.0], 1.0, 0.1)
    for prev, cur in zip(dmg.states, dmg.states[1:]):
        assert all(c <= p + 1e-12 for p, c in zip(prev, cur))
    assert dmg.report()["classification"] == "lyapunov"

    # probe JSON mirrors the CLI
    probe = json.loads(of.probe("power:3"))
    assert probe["delta2"]["passes"] and abs(probe["delta2"]["k"] - 8.0) <= 1e-9

    # config runner writes the same artifacts as the CLI
    with tempfile.TemporaryDirectory() as tmp:
        records = of.run_config('{"problem":"quadratic","tau_list":[0.1]}', tmp)
        assert len(records) == 1
        tau, directory, failed = records[0]
        assert tau == 0.1 and not failed
        run_dir = pathlib.Path(directory)
        for name in ("trajectory.csv", "edb.json", "summary.json"):
            assert (run_dir / name).is_file(), name
        summary = json.loads((run_dir / "summary.json").read_text())
        assert summary["problem"] == "quadratic" and not summary["failed"]

    # full acceptance suite through the bindings
    results = of.acceptance_check()
    assert len(results) == 14
    failures = [name for name, ok, _ in results if not ok]
    assert not failures, f"acceptance criteria failed: {failures}"
    print(f"acceptance: {len(results)}/{len(results)} criteria pass")

    # error mapping: bad input surfaces as ValueError
    try:
        of.ConvexFn("power:0.5")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for p < 1")
    assert math.isinf(of.ConvexFn("damage_primal")(1.0))

    print("smoke test: all checks pass")


if __name__ == "__main__":
    main()
