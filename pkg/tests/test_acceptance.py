"""Acceptance criteria, one test (or small group) per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints
one PASS/FAIL line per criterion with the measured values underneath.
"""

import json
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from mrscodes import cli
from mrscodes.channel import ChannelSpec, TrialConfig, estimate_admissibility, run_trials, sweep
from mrscodes.codes import Blockwise, ExNonOpt, Multiplexed, SubBlock, Superposition, descriptor, symbol_row
from mrscodes.gf2 import IncrementalSolver, parity, rank
from mrscodes.prf import derive, derive_prefix, label_hash
from mrscodes.region import (
    RatePair, example3_check, example3_superposition_check, one_or_all_check, one_or_all_g, one_or_all_pairs,
    pairs_from_curve, superposition_feasible, verify_witness,
)
from mrscodes.stepfn import StepFunction, integral_check, optimal_g, sampling_atoms

HALF_G = StepFunction.decreasing([F(1, 2)], [2])


# ---------------------------------------------------------------- 1


@pytest.mark.criterion(1, "superposition infeasibility of the two-transmitter counterexample")
def test_c1_counterexample(detail):
    t0 = time.perf_counter()
    pairs = [RatePair(F(1, 2), (F(3, 4), 0)), RatePair(F(1, 2), (0, F(3, 4))), RatePair(F(1), (F(1, 2), F(1, 2)))]
    full = superposition_feasible(pairs)
    part = superposition_feasible(pairs[:2])
    secs = time.perf_counter() - t0
    detail(f"all three pairs feasible={full.feasible}; first two feasible={part.feasible} "
           f"margin={part.margin}; {secs:.3f} s")
    assert not full.feasible
    assert part.feasible and verify_witness(part.witness, pairs[:2])
    assert all(isinstance(v, F) for c in part.witness.components for v in c.values)
    assert secs < 1


# ---------------------------------------------------------------- 2


@pytest.mark.criterion(2, "integral tightness of blockwise and multiplexed curves")
def test_c2_integral_tightness(detail):
    t0 = time.perf_counter()
    for r in (Blockwise(1, 2).theory(), Multiplexed(2, 2, 4).theory()):
        assert integral_check(r) == 1
        g = optimal_g(r)
        assert g.integral() == 1
        for c in r.breakpoints:
            assert c * g(r(c)) >= 1
    secs = time.perf_counter() - t0
    detail(f"integrals 1 and 1 (exact), optimal g has unit mass; {secs:.3f} s")
    assert secs < 1


# ---------------------------------------------------------------- 3


@pytest.mark.criterion(3, "three-transmitter example: achievable but not by superposition")
def test_c3_example3(detail):
    t0 = time.perf_counter()
    any_code = example3_check((1, 1, 2), F(3, 2), 3)
    sup = example3_superposition_check((1, 1, 2), F(3, 2), 3)
    secs = time.perf_counter() - t0
    detail(f"general region feasible={any_code.feasible} margin={any_code.margin}; "
           f"superposition feasible={sup.feasible} (4 vs 9/2); {secs:.3f} s")
    assert any_code.feasible and any_code.margin == 0
    assert not sup.feasible and sup.margin == F(-1, 2)
    assert secs < 1


# ---------------------------------------------------------------- 4


def _one_or_all_instance(rng):
    d = rng.randint(1, 4)
    w = [F(rng.randint(1, 12), 12) for _ in range(d)]
    r = [wk * F(rng.randint(0, 6), 6) for wk in w]
    r0 = F(rng.randint(0, 30), 12)
    return w, r0, r


@pytest.mark.criterion(4, "one-or-all region agrees with the superposition LP")
def test_c4_one_or_all_cross_validation(detail):
    rng = random.Random(404)
    t0 = time.perf_counter()
    feasible = 0
    for _ in range(10_000):
        w, r0, r = _one_or_all_instance(rng)
        closed = one_or_all_check(w, r0, r).feasible
        pairs = one_or_all_pairs(w, r0, r)
        lp = superposition_feasible(pairs, len(w)).feasible
        assert closed == lp, (w, r0, r)
        if closed:
            feasible += 1
            assert verify_witness(one_or_all_g(w, r0, r), pairs)
    secs = time.perf_counter() - t0
    detail(f"10000 instances, {feasible} feasible, all agree; {secs:.1f} s")
    assert secs < 30


# ---------------------------------------------------------------- 5


def _random_curve(rng):
    n = rng.randint(1, 5)
    cs = sorted(rng.sample(range(1, 41), n))
    rs = sorted(rng.sample(range(1, 25), n))
    return StepFunction.increasing([F(c, 40) for c in cs], [F(x, 40) for x in rs])


@pytest.mark.criterion(5, "single-transmitter LP matches the integral test")
def test_c5_d1_equivalence(detail):
    rng = random.Random(505)
    t0 = time.perf_counter()
    agree = ok = 0
    for _ in range(1000):
        r = _random_curve(rng)
        lp = superposition_feasible(pairs_from_curve(r), 1).feasible
        want = integral_check(r) <= 1
        agree += lp == want
        ok += want
    secs = time.perf_counter() - t0
    detail(f"{agree}/1000 agree ({ok} achievable curves); {secs:.1f} s")
    assert agree == 1000
    assert secs < 10


# ---------------------------------------------------------------- 6


@pytest.mark.criterion(6, "superposition code Monte Carlo: PASS above, FAIL below the region")
def test_c6_superposition_monte_carlo(detail):
    spec = Superposition(128, HALF_G)
    cfg = TrialConfig(20_000, 0.05, seed=0)
    t0 = time.perf_counter()
    above = estimate_admissibility(spec, ChannelSpec((F(3, 5),)), F(1, 2), cfg, 100)
    below = estimate_admissibility(spec, ChannelSpec((F(9, 20),)), F(1, 2), cfg, 100)
    secs = time.perf_counter() - t0
    for name, v in (("c=0.6", above), ("c=0.45", below)):
        detail(f"{name}: {'PASS' if v.passed else 'FAIL'} error {v.error_rate:.4f} "
               f"Wilson [{v.ci[0]:.4f}, {v.ci[1]:.4f}] mean rate {v.mean_final_rate:.4f}")
    detail(f"{secs:.1f} s for 200 trials")
    assert above.passed
    assert not below.passed
    assert secs <= 120


# ---------------------------------------------------------------- 7


@pytest.mark.criterion(7, "two-transmitter non-superposition code Monte Carlo")
def test_c7_exnonopt_monte_carlo(detail):
    spec = ExNonOpt(64)
    cfg = TrialConfig(20_000, 0.05, seed=0)
    t0 = time.perf_counter()
    rates = {}
    for caps in ((F(11, 20), F(11, 20)), (F(4, 5), F(0))):
        jobs = [(spec, ChannelSpec(caps), TrialConfig(cfg.n, cfg.epsilon, s)) for s in range(50)]
        res = run_trials(jobs)
        rates[caps] = (float(np.mean([r.final_rate for r in res])),
                       float(np.mean([r.decoded_rate for r in res])))
    secs = time.perf_counter() - t0
    both, solo = rates[(F(11, 20), F(11, 20))], rates[(F(4, 5), F(0))]
    detail(f"(0.55,0.55): mean final_rate {both[0]:.4f} (need >= 0.9), all decoded bits {both[1]:.4f}")
    detail(f"(0.80,0): mean final_rate {solo[0]:.4f} (need 0.42..0.52), all decoded bits {solo[1]:.4f}")
    detail(f"{secs:.1f} s for 100 trials")
    assert both[0] >= 0.9
    assert 0.42 <= solo[0] <= 0.52
    assert secs <= 120


# ---------------------------------------------------------------- 8


@pytest.mark.criterion(8, "three-transmitter sub-block code Monte Carlo")
def test_c8_subblock_monte_carlo(detail):
    s = (2, 2, 4)
    spec = SubBlock(60, 240, (1, 1, 2), F(3, 2), 3, s)
    assert spec.gamma == F(2, 3)
    # link k delivers s_k * c = 1.05 w_k bits per step: a 5% margin on every link
    c = F(21, 40)
    receivers = {"R1": ((c, c, 0), F(3, 2)), "R2": ((c, 0, c), F(3)), "R3": ((0, c, c), F(3))}
    n = 240 * 20
    t0 = time.perf_counter()
    for name, (caps, r) in receivers.items():
        ch = ChannelSpec(caps, s, mode="fixed")
        assert all(sk * ck == F(21, 20) * wk for sk, ck, wk in zip(s, caps, spec.w) if ck)
        res = run_trials([(spec, ch, TrialConfig(n, 0.05, seed)) for seed in range(20)])
        norm = [r_.final_rate / float(r) for r_ in res]
        detail(f"{name}: normalized rate min {min(norm):.4f} mean {np.mean(norm):.4f} over 20 seeds")
        assert min(norm) >= 0.95
    secs = time.perf_counter() - t0
    detail(f"{secs:.1f} s for 60 trials")
    assert secs <= 180


# ---------------------------------------------------------------- 9


def _dense_rank(rows, cols):
    a = np.array([[(r >> j) & 1 for j in range(cols)] for r in rows], dtype=np.uint8).reshape(len(rows), cols)
    rk = 0
    for j in range(cols):
        piv = np.nonzero(a[rk:, j])[0]
        if len(piv) == 0:
            continue
        p = rk + piv[0]
        a[[rk, p]] = a[[p, rk]]
        hit = np.nonzero(a[:, j])[0]
        for i in hit:
            if i != rk:
                a[i] ^= a[rk]
        rk += 1
        if rk == a.shape[0]:
            break
    return rk


@pytest.mark.criterion(9, "property suites (solver oracle, atom mass, descriptor symmetry, monotone sweeps)")
def test_c9_property_suites(detail):
    rng = random.Random(909)
    t0 = time.perf_counter()

    # incremental solver vs a dense batch rank oracle, up to 64x64
    for _ in range(300):
        nv, ne = rng.randint(1, 64), rng.randint(1, 64)
        x = rng.getrandbits(nv)
        s = IncrementalSolver()
        rows = []
        for _ in range(ne):
            row = rng.getrandbits(nv) & rng.getrandbits(nv)
            rows.append(row)
            s.insert(row, parity(row & x))
        assert s.rank == _dense_rank(rows, nv) == rank(rows)
        assert all(b == (x >> v) & 1 for v, b in s.resolved.items())

    # sampling atoms carry unit mass for random unit-mass g
    for _ in range(500):
        n = rng.randint(1, 6)
        bps = sorted(rng.sample(range(1, 50), n))
        vals = sorted((rng.randint(1, 30) for _ in range(n)), reverse=True)
        g = StepFunction.decreasing([F(b, 25) for b in bps], vals)
        m = g.integral()
        g = StepFunction.decreasing(g.breakpoints, [v / m for v in g.values])
        assert sum(sampling_atoms(g).probabilities) == 1

    # sender and receiver derive the same descriptors and rows
    specs = [Blockwise(8, 24), Multiplexed(8, 8, 16), Superposition(16, HALF_G), ExNonOpt(8),
             SubBlock(6, 24, (1, 1, 2), F(3, 2), 3)]
    coords = [(rng.choice(specs), rng.getrandbits(64), rng.randint(1, 1 << 14)) for _ in range(100_000)]
    sent = []
    for spec, q, i in coords:
        k = 1 + i % spec.d
        sent.append((descriptor(spec, q, k, i), hash(symbol_row(spec, q, k, i))))
    derive_prefix.cache_clear()
    label_hash.cache_clear()
    for (spec, q, i), (d, h) in zip(coords, sent):
        k = 1 + i % spec.d
        assert descriptor(spec, q, k, i) == d and hash(symbol_row(spec, q, k, i)) == h

    # coupled erasures give a nondecreasing curve for every seed
    grid = [ChannelSpec((F(c, 10),)) for c in range(1, 11)]
    res = sweep(Superposition(32, StepFunction.decreasing([F(1, 4), F(1, 2)], [3, 1])), grid,
                TrialConfig(3000, seed=9), trials=4)
    for j in range(4):
        curve = [res.results[p][j].final_rate for p in range(len(grid))]
        assert curve == sorted(curve)

    secs = time.perf_counter() - t0
    detail(f"300 solver instances, 500 atom sets, 100000 descriptors, 4 coupled curves; {secs:.1f} s")
    assert secs <= 120


# ---------------------------------------------------------------- 10


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.mark.criterion(10, "manifest reruns reproduce outputs byte for byte, including --parallel")
def test_c10_determinism(tmp_path, detail, capsys):
    t0 = time.perf_counter()
    code = _write(tmp_path / "code.json", {"variant": "blockwise", "K": 32, "L": 64})
    ch = _write(tmp_path / "ch.json", {"capacities": [0.6]})
    grid = _write(tmp_path / "grid.json", {"values": [0.3, 0.6, 0.9]})
    theory = _write(tmp_path / "r.json", Blockwise(32, 64).theory().to_json())
    pairs = _write(tmp_path / "pairs.json", [["1/2", ["3/4", 0]], ["1/2", [0, "3/4"]], [1, ["1/2", "1/2"]]])
    runs = {
        "serial": ["simulate", "--code", code, "--channel", ch, "--n", "4000", "--trials", "8",
                   "--rate", "0.4", "--seed", "7"],
        "parallel": ["simulate", "--code", code, "--channel", ch, "--n", "4000", "--trials", "8",
                     "--rate", "0.4", "--seed", "7", "--parallel", "4"],
        "sweep": ["sweep", "--code", code, "--channel", grid, "--n", "3000", "--trials", "3",
                  "--theory", theory, "--seed", "1"],
        "region": ["region", pairs, "--check", "superposition"],
    }
    outputs = {}
    for name, argv in runs.items():
        out = tmp_path / name
        rc = cli.main(argv + ["--out-dir", str(out)])
        assert rc in (0, 2)
        assert cli.main(["rerun", str(out / "manifest.json"), "--out-dir", str(tmp_path / f"{name}-again")]) == 0
        for f in out.iterdir():
            if f.name != "manifest.json":
                assert f.read_bytes() == (tmp_path / f"{name}-again" / f.name).read_bytes()
        outputs[name] = {f.name: f.read_bytes() for f in out.iterdir() if f.name != "manifest.json"}
    assert outputs["serial"] == outputs["parallel"]
    capsys.readouterr()
    secs = time.perf_counter() - t0
    n_files = sum(len(v) for v in outputs.values())
    detail(f"{n_files} output files reproduced from manifests; serial == --parallel 4; {secs:.1f} s")
    assert secs < 60
