"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The verdict lines are printed at the end of the pytest run (see
``conftest.py``) and when this file is executed as a script.  Expected
runtime on one core is about an hour.
"""

from __future__ import annotations

import io
import sys
import time
import traceback

import numpy as np
import pytest

from qa_volume import codes, oracle, stabilizer
from qa_volume.circuit import CircuitSpec, realization_for
from qa_volume.cli import execute
from qa_volume.presets import PRESETS, resolve

pytestmark = pytest.mark.slow

RESULTS: dict[int, tuple[bool, str]] = {}
NOTES: list[str] = []

TITLES = {
    1: "oracle equivalence",
    2: "transition location",
    3: "critical decay of P(t)",
    4: "entanglement fluctuation exponents",
    5: "particle-model exponents",
    6: "code distances",
    7: "structural claims",
    8: "random walk in random environment",
    9: "Z2 family",
    10: "determinism",
}


def record(n: int, ok: bool, detail: str) -> None:
    prev = RESULTS.get(n)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    RESULTS[n] = (ok, detail)


def verdict_lines() -> list[str]:
    out = []
    for n in range(1, 11):
        if n in RESULTS:
            ok, detail = RESULTS[n]
            out.append(f"criterion {n:2d} [{TITLES[n]}]: {'PASS' if ok else 'FAIL'} ({detail})")
        else:
            out.append(f"criterion {n:2d} [{TITLES[n]}]: NOT RUN")
    return out + [f"note: {s}" for s in NOTES]


def run(name, **overrides):
    t0 = time.perf_counter()
    out = execute(name, resolve(name, overrides), 1)
    return out, time.perf_counter() - t0


def table(text):
    return np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)


def within(v, lo, hi):
    return v is not None and lo <= v <= hi


# ---------------------------------------------------------------- 1


def test_c01_oracle_equivalence():
    checks = ent_bad = map_bad = map_total = 0
    for L in (4, 6, 8):
        for i in range(100):
            spec = CircuitSpec(family="ENTANGLE", L=L, p=0.2, T=L, seed=1000 + L)
            real = realization_for(spec, i)
            A = list(range(L // 2))
            ph = oracle.PhaseState(L)
            q = stabilizer.QAState(L)
            tab = stabilizer.init_plus_x(L)
            counts = oracle.exhaustive_pair_count(real, A)
            for t in range(real.T + 1):
                if t:
                    lo, hi = int(real.step_offsets[t - 1]), int(real.step_offsets[t])
                    oracle.evolve_phase_state(ph, real.step_layers(t - 1))
                    q.apply_ops(real.ops, lo, hi)
                    tab.apply_ops(real.ops, lo, hi)
                pur = oracle.purity_swap(ph, A)
                s = oracle.entropy_from_purity(pur)
                checks += 1
                ent_bad += (q.entropy(A) != s) + (tab.entropy(A) != s)
                map_total += 1
                map_bad += counts[t].fraction != pur
    ok = ent_bad == 0
    record(1, ok, f"{ent_bad} entropy mismatches over {checks} comparisons and two engines; "
                  f"particle count N/2^L differs from the purity in {map_bad}/{map_total} cases (reported)")
    assert ok


# ---------------------------------------------------------------- 2


def test_c02_transition_location():
    grid = [round(0.10 + 0.01 * k, 2) for k in range(11)]
    out, dt = run("purify-crossing", sizes=[16, 32, 64], p_grid=grid, samples=400, seed=2)
    cross = out.documents["crossings"]
    c_large = cross["32-64"]
    ok = within(c_large, 0.11, 0.17)
    record(2, ok, f"S_Q(4L) crossing of L=32 and L=64 at p={c_large}; L=16/32 crossing at p={cross['16-32']}; "
                  f"window [0.11, 0.17]; {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 3


def _alpha(p, samples):
    out, dt = run("fig5a", L=256, p=p, T=64, samples=samples, n_configs=16384, seed=3, decay_window=[8, 64])
    f = out.fits["decay_P_t"]
    return -f.exponent, f.stderr, dt


def test_c03_critical_decay():
    alpha, err, dt = _alpha(0.138, 1000)
    ok = abs(alpha - 0.938) <= 0.15
    record(3, ok, f"alpha={alpha:.3f}+-{err:.3f} at p=0.138 from mean P(t), t in [8, 64]; target 0.938+-0.15; {dt:.0f}s")
    # same measurement at the crossing located with this circuit's rate convention (informational)
    a2, e2, _ = _alpha(0.175, 300)
    NOTES.append(f"P(t) decay exponent at p=0.175 (300 realizations): {a2:.3f}+-{e2:.3f}")
    assert ok


# ---------------------------------------------------------------- 4


def test_c04_entanglement_fluctuations():
    parts = []
    ok = True
    for p in (0.0, 0.04):
        out, dt = run("fig3b", L=512, p=p, T=64, samples=2000, seed=4, fit_window=[8, 64])
        b = out.fits["beta2"].exponent
        ok &= within(b, 0.25, 0.37)
        parts.append(f"beta2(p={p})={b:.3f}")
    out, dt = run("fig3a", p=0.04, sizes=[32, 64, 128, 256, 512], samples=2000, seed=4)
    b1 = out.fits["beta1"].exponent
    ok &= within(b1, 0.26, 0.38)
    parts.append(f"beta1(p=0.04, L_A=L/2, L=32..512)={b1:.3f}")
    record(4, ok, ", ".join(parts) + "; windows beta2 [0.25, 0.37], beta1 [0.26, 0.38]")
    assert ok


# ---------------------------------------------------------------- 5


def test_c05_particle_exponents():
    out, _ = run("fig4a", L=1024, p=0.04, T=256, samples=2000, seed=5, fit_window=[8, 128])
    bt = out.fits["beta_K_t"].exponent
    out, _ = run("fig4b", p=0.04, sizes=[32, 64, 128, 256], samples=1000, seed=5, depth_factor=8)
    bk = out.fits["beta_K_LA"].exponent
    k_flags = [f for f in out.flags if f.startswith("undersampled")]
    out, _ = run("fig5b", p=0.04, sizes=[32, 64, 128, 256], samples=1000, seed=5, depth_factor=4)
    bm = out.fits["beta_M_LA"].exponent
    ok = within(bt, 0.24, 0.35) and within(bk, 0.19, 0.31) and within(bm, 0.21, 0.33)
    record(5, ok, f"K t-exponent={bt:.3f} [0.24, 0.35], K L_A-exponent={bk:.3f} [0.19, 0.31]"
                  f"{' (steady state not reached in some runs)' if k_flags else ''}, "
                  f"M L_A-exponent={bm:.3f} [0.21, 0.33]")
    assert ok


# ---------------------------------------------------------------- 6


def test_c06_code_distances():
    sizes = [64, 96, 128, 192, 256, 400]
    res = {}
    dists = {}
    for name in ("fig6b", "fig8b", "fig9b"):
        out, _ = run(name, p=0.04, sizes=sizes, samples=400, seed=6, lmax=96)
        fit = next(iter(out.fits.values()), None)
        res[name] = None if fit is None else fit.exponent
        dists[name] = table(out.tables["distance_L"])[:, 1]
    pointwise = bool((dists["fig8b"] > dists["fig6b"]).all())
    ok = (within(res["fig6b"], 0.28, 0.41) and within(res["fig8b"], 0.27, 0.39) and pointwise
          and within(res["fig9b"], 0.27, 0.39))
    fmt = lambda v: "none" if v is None else f"{v:.3f}"  # noqa: E731
    record(6, ok, f"d_cont exponent={fmt(res['fig6b'])} [0.28, 0.41], d^Z exponent={fmt(res['fig8b'])} [0.27, 0.39], "
                  f"d^Z > d_cont at every L: {pointwise}, d^c exponent={fmt(res['fig9b'])} [0.27, 0.39]; "
                  f"d_cont={dists['fig6b'].astype(int).tolist()}, d^Z={dists['fig8b'].astype(int).tolist()}, "
                  f"d^c={dists['fig9b'].astype(int).tolist()}")
    assert ok


# ---------------------------------------------------------------- 7


def test_c07_structural_claims():
    problems = []
    # purification profile at T = 2L
    L = 128
    out, _ = run("fig6a", L=L, p=0.04, samples=200, seed=7)
    S = table(out.tables["S_A_LA"])[:, 1]
    I = table(out.tables["I_AR_LA"])
    doc = out.documents["profile"]
    peak, dstar = doc["peak_L_A"], doc["L_A_star"]
    if not (S[peak] > S[-1] + 1 and 0 < peak < L):
        problems.append("S_A(L_A) is not non-monotonic")
    if abs(peak - (L - dstar)) > max(3, 0.5 * dstar):
        problems.append(f"peak {peak} far from L - L_A* = {L - dstar}")
    if abs(S[-1] - doc["mean_S_Q"]) > 1e-9:
        problems.append("S_A(L) != S_Q")
    if I[:, 1].min() < 0:
        problems.append("negative mean I_AR")
    # per-trajectory checks: I_AR >= 0 and S_Q non-increasing
    for i in range(40):
        spec = CircuitSpec(family="PURIFY", L=64, p=0.04 + 0.004 * i, T=256, seed=77)
        res = stabilizer.run_trajectory(spec, i, stabilizer.Schedule(times=tuple(range(257)), observables=("S_Q",)))
        if (np.diff(res["S_Q"]) > 0).any():
            problems.append(f"S_Q increased in trajectory {i}")
        prof = codes.window_profiles(res["final_state"], 64, np.arange(64), purify=True)
        if (prof["I"] < 0).any():
            problems.append(f"negative I_AR in trajectory {i}")
    # U+M then U: S_A = L_A below L^c in every sample, distance linear in L
    pts = []
    umu_bad = 0
    for Lu in (64, 128, 256, 512):
        spec_kw = dict(family="UM_U", L=Lu, p=0.08, T1=2 * Lu, T2=2 * Lu, seed=7)
        Ss, Is, sq = [], [], []
        for i in range(20):
            prof = codes.um_u_profile(CircuitSpec(**spec_kw), i)
            Ss.append(prof.S_A)
            Is.append(prof.I_AR)
            sq.append(prof.S_Q)
        Ss = np.array(Ss)
        Lc = (Lu + np.mean(sq)) / 2
        lim = int(Lc) - 8
        if not (Ss[:, :lim] == np.arange(lim)).all():
            umu_bad += 1
        d, cens = codes.first_crossing(np.mean(Is, axis=0), codes.EPSILON, strict=False)
        pts.append((Lu, d))
    from qa_volume.stats import extract_distance_exponent

    gamma = extract_distance_exponent(pts).exponent
    if umu_bad:
        problems.append(f"S_A != L_A below L^c - 8 at {umu_bad} sizes")
    if abs(gamma - 1) > 0.1:
        problems.append(f"U+M/U distance exponent {gamma:.3f} not linear")
    ok = not problems
    record(7, ok, f"PURIFY peak at L_A={peak} vs L-L_A*={L - dstar}; U+M/U distances {[d for _, d in pts]} "
                  f"(exponent {gamma:.3f}); " + ("all checks hold" if ok else "; ".join(problems[:4])))
    assert ok


# ---------------------------------------------------------------- 8


def test_c08_rwre():
    out, dt = run("figC13", L_A=1000, T=20000, samples=1000, seed=8, fit_window=[100, 10000])
    b = out.fits["beta_N_t"].exponent
    ok = within(b, 0.20, 0.32)
    record(8, ok, f"delta N(t) exponent={b:.3f} over t in [100, 10000], window [0.20, 0.32]; {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 9


def test_c09_z2_family():
    broken = 0
    for i in range(100):
        spec = CircuitSpec(family="Z2", L=32, p=0.005 * i, T=64, seed=9)
        res = stabilizer.run_trajectory(spec, i, stabilizer.Schedule(times=tuple(range(65)), observables=("parity",)))
        broken += int(not res["parity"].all())
    out, _ = run("figB12", L=256, p=0.0, T=64, samples=2000, seed=9, fit_window=[8, 64])
    b2 = out.fits["beta2"].exponent
    out, _ = run("z2-crossing", sizes=[16, 32, 64], p_grid=[0.2, 0.25, 0.3, 0.35, 0.4, 0.45], samples=600, seed=9)
    pc = out.documents["crossover"]["p_cross"]
    ok = broken == 0 and within(b2, 0.26, 0.38) and within(pc, 0.275, 0.395)
    record(9, ok, f"parity broken in {broken}/100 trajectories; beta2(p=0)={b2:.3f} [0.26, 0.38]; "
                  f"entropy-increment crossover p={pc} [0.275, 0.395]")
    assert ok


# ---------------------------------------------------------------- 10

TINY = {
    "fig3b": dict(L=32, T=16, samples=6, fit_window=[2, 16]),
    "figB12": dict(L=16, T=16, samples=6, fit_window=[2, 16]),
    "fig3a": dict(sizes=[8, 16, 32, 64], samples=6),
    "fig4a": dict(L=64, T=32, samples=6, fit_window=[2, 32]),
    "fig4b": dict(sizes=[8, 16, 32, 64], samples=6),
    "fig5a": dict(L=32, T=16, samples=6, n_configs=1024),
    "fig5b": dict(sizes=[8, 16, 32, 64], samples=6),
    "fig6a": dict(L=32, samples=6),
    "fig6b": dict(sizes=[16, 24, 32, 48], samples=4, lmax=32),
    "fig8b": dict(sizes=[16, 24, 32, 48], samples=4, lmax=32),
    "fig9b": dict(sizes=[16, 24, 32, 48], samples=4, lmax=32),
    "fig8a": dict(L=16, samples=4, n_configs=4096),
    "fig10b": dict(L=32, samples=4),
    "figD14": dict(L=64, samples=4, cuts=[2, 4, 8, 16, 32], fit_window=[2, 32]),
    "figC13": dict(L_A=50, T=500, samples=6, fit_window=[10, 500]),
    "purify-crossing": dict(sizes=[8, 16], p_grid=[0.05, 0.2, 0.4], samples=4),
    "z2-crossing": dict(sizes=[8, 16, 32], p_grid=[0.1, 0.3, 0.6], samples=4),
    "oracle-check": dict(L=6, samples=6),
}


def _serialized(outcome):
    blobs = dict(outcome.tables)
    blobs.update({f"fit_{k}": v.to_json() for k, v in outcome.fits.items()})
    return blobs


def test_c10_determinism():
    assert set(TINY) == set(PRESETS)
    differ = []
    for name, ov in TINY.items():
        cfg = resolve(name, dict(ov, seed=10))
        a = _serialized(execute(name, cfg, 1))
        b = _serialized(execute(name, cfg, 1))
        c = _serialized(execute(name, cfg, 2))
        if not (a == b == c):
            differ.append(name)
    ok = not differ
    record(10, ok, f"{len(TINY)} presets re-run with 1 and 2 workers; differing outputs: {differ or 'none'}")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    only = set(sys.argv[1:])
    for fn in tests:
        if only and not any(fn.__name__.startswith(f"test_c{int(o):02d}") for o in only):
            continue
        try:
            fn()
        except AssertionError:
            pass
        except Exception:
            traceback.print_exc()
        print(verdict_lines()[int(fn.__name__[6:8]) - 1], flush=True)
    print("\n".join(verdict_lines()))
