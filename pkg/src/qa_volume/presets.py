"""Experiment presets: named, deterministic job lists and their reductions.

A preset resolves a configuration dict into an ordered list of jobs
``(point, index)``.  ``point`` is a sweep value (``None`` for unswept
presets) and ``index`` the trajectory index that seeds its RNG stream.  Job
results are merged in list order, so outputs do not depend on how the jobs
were scheduled over workers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import codes, oracle, particles, stabilizer
from .circuit import CircuitSpec, ConfigError, Family, realization_for
from .stats import EnsembleSeries, FitResult, crossing_point, extract_distance_exponent, fit_power_law

# ---------------------------------------------------------------- result containers


@dataclass
class Outcome:
    """Reduced preset output: CSV tables, JSON documents and flags."""

    tables: dict[str, str] = field(default_factory=dict)
    documents: dict[str, Any] = field(default_factory=dict)
    fits: dict[str, FitResult] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)


def _table(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(_cell(v) for v in r))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fit(out: Outcome, name: str, x, y, window, flag_on_fail=True):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out.fits[name] = fit_power_law(x, y, window)
    except ValueError as e:
        if flag_on_fail:
            out.flags.append(f"degenerate:{name}:{e}")


# ---------------------------------------------------------------- preset registry


@dataclass(frozen=True)
class Preset:
    name: str
    summary: str
    anchor: str
    expected: str
    engine: str
    defaults: dict
    jobs: Callable[[dict], list]
    work: Callable[[dict, Any, int], dict]
    reduce: Callable[[dict, list], Outcome]


PRESETS: dict[str, Preset] = {}


def preset(**kw):
    def deco(cls):
        p = Preset(jobs=cls.jobs, work=cls.work, reduce=cls.reduce, **kw)
        PRESETS[p.name] = p
        return cls

    return deco


COMMON_KEYS = {"L", "p", "T", "samples", "seed", "boundary"}


def resolve(name: str, overrides: dict | None = None) -> dict:
    """Preset defaults merged with ``overrides``; unknown keys raise :class:`ConfigError`."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}")
    cfg = dict(PRESETS[name].defaults)
    cfg["preset"] = name
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k not in cfg:
            raise ConfigError(f"preset {name} has no option {k!r}")
        cfg[k] = type(cfg[k])(v) if cfg[k] is not None and not isinstance(cfg[k], (list, tuple)) else v
    if cfg.get("samples", 1) < 1:
        raise ConfigError("samples must be >= 1")
    return cfg


def _spec(cfg, **kw) -> CircuitSpec:
    base = {"family": cfg.get("family", "ENTANGLE"), "L": cfg["L"], "p": cfg["p"], "boundary": cfg.get("boundary", "periodic"),
            "seed": cfg["seed"]}
    base.update(kw)
    if Family(base["family"]) is not Family.UM_U and "T" not in base:
        base["T"] = cfg["T"]
    return CircuitSpec(**base)


def _index_jobs(cfg, points=(None,)):
    return [(pt, i) for pt in points for i in range(cfg["samples"])]


def _group(jobs_results):
    groups: dict = {}
    for (pt, _), res in jobs_results:
        groups.setdefault(_key(pt), (pt, []))[1].append(res)
    return list(groups.values())


def _key(pt):
    return repr(pt)


# ---------------------------------------------------------------- entanglement time series


def _time_series_work(cfg, pt, index):
    spec = _spec(cfg)
    real = realization_for(spec, index)
    sched = stabilizer.Schedule(times=tuple(range(1, spec.T + 1)), observables=("S_half",))
    res = stabilizer.run_trajectory(spec, index, sched, realization=real)
    return {"S": res["S_half"]}


def _time_series_reduce(cfg, results):
    out = Outcome()
    T = cfg["T"]
    ens = EnsembleSeries(np.arange(1, T + 1), "time")
    for _, r in results:
        ens.accumulate(r["S"])
    out.tables["S_half_t"] = ens.to_csv()
    _fit(out, "beta2", ens.axis, ens.std, tuple(cfg["fit_window"]))
    return out


class _TimeSeries:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_time_series_work)
    reduce = staticmethod(_time_series_reduce)


preset(
    name="fig3b",
    summary="Early-time half-chain entropy fluctuations of the plain QA circuit",
    anchor="delta S_A(t) grows as a power of t in the volume-law phase, close to the KPZ growth exponent",
    expected="beta2 ~ 0.307 at p = 0 and p = 0.04",
    engine="stabilizer",
    defaults={"family": "ENTANGLE", "L": 256, "p": 0.0, "T": 64, "samples": 200, "seed": 0, "boundary": "periodic",
              "fit_window": [8, 64]},
)(_TimeSeries)

preset(
    name="figB12",
    summary="Early-time half-chain entropy fluctuations of the Z2-symmetric circuit",
    anchor="the Z2-symmetric circuit shows the same KPZ-like growth of delta S_A(t)",
    expected="beta2 ~ 0.324 at p = 0",
    engine="stabilizer",
    defaults={"family": "Z2", "L": 128, "p": 0.0, "T": 64, "samples": 200, "seed": 0, "boundary": "periodic",
              "fit_window": [8, 64]},
)(_TimeSeries)


# ---------------------------------------------------------------- steady-state half-chain entropy


def _half_steady_work(cfg, L, index):
    spec = _spec(cfg, L=L, T=cfg["T_factor"] * L)
    st = stabilizer.make_state(spec)
    st.apply_ops(realization_for(spec, index).ops)
    return {"S": float(st.entropy(np.arange(L // 2)))}


@preset(
    name="fig3a",
    summary="Steady-state fluctuations of the half-chain entropy S_{L/2} versus L",
    anchor="delta S_A at L_A = L/2 in the steady state, over a range of system sizes",
    expected="beta1 ~ 0.322 at p = 0.04, ~0.31 at p = 0.08",
    engine="stabilizer",
    defaults={"family": "ENTANGLE", "L": 0, "p": 0.04, "T": 0, "samples": 200, "seed": 0, "boundary": "periodic",
              "sizes": [32, 64, 128, 256, 512], "T_factor": 2},
)
class _HalfSteady:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg, cfg["sizes"]))
    work = staticmethod(_half_steady_work)
    reduce = staticmethod(lambda cfg, res: _sweep_reduce_scalar(cfg, res, "S_half_L", "system-size", "beta1", "S"))


# ---------------------------------------------------------------- single species


def _K_time_work(cfg, pt, index):
    spec = _spec(cfg)
    k = particles.single_species_K(spec, cfg["L_A"] or spec.L // 2, spec.T, index)
    return {"K": k.neglog2K.astype(float)}


def _K_time_reduce(cfg, results):
    out = Outcome()
    ens = EnsembleSeries(np.arange(cfg["T"] + 1), "time")
    for _, r in results:
        ens.accumulate(r["K"])
    out.tables["neglog2K_t"] = ens.to_csv()
    _fit(out, "beta_K_t", ens.axis, ens.std, tuple(cfg["fit_window"]))
    return out


@preset(
    name="fig4a",
    summary="Single-species basis decomposition: -log2 K(t) fluctuations in time",
    anchor="the eliminated-basis count fluctuates as a power of t at early times",
    expected="0.294 at p = 0.04, 0.26 at p = 0.08",
    engine="particles",
    defaults={"L": 1024, "p": 0.04, "T": 256, "samples": 200, "seed": 0, "boundary": "open", "L_A": 0,
              "fit_window": [8, 128]},
)
class _KTime:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_K_time_work)
    reduce = staticmethod(_K_time_reduce)


def _sweep_reduce_scalar(cfg, results, name, axis_kind, fit_name, value_key):
    out = Outcome()
    rows = []
    xs, sds = [], []
    for pt, res in _group(results):
        vals = np.array([r[value_key] for r in res], dtype=float)
        vals = vals[~np.isnan(vals)]
        m = float(vals.mean()) if vals.size else float("nan")
        s = float(vals.std()) if vals.size else float("nan")
        rows.append((pt, m, s, vals.size))
        xs.append(pt)
        sds.append(s)
    out.tables[name] = _table(["x", "mean", "stddev", "n"], rows)
    _fit(out, fit_name, xs, sds, (min(xs), max(xs)))
    return out


def _K_steady_work(cfg, L_A, index):
    L = int(round(L_A * cfg["ratio"]))
    L += L % 2
    spec = _spec(cfg, L=L, T=cfg["depth_factor"] * L)
    k = particles.single_species_K(spec, L_A, spec.T, index)
    return {"K": k.steady, "reached": k.steady_at is not None}


def _K_steady_reduce(cfg, results):
    out = _sweep_reduce_scalar(cfg, results, "neglog2K_LA", "subsystem-size", "beta_K_LA", "K")
    if not all(r["reached"] for _, r in results):
        out.flags.append("undersampled:steady state not reached in some trajectories")
    return out


@preset(
    name="fig4b",
    summary="Single-species steady-state -log2 K fluctuations versus L_A (L = 2 L_A)",
    anchor="finite-size scaling of the steady-state eliminated-basis count",
    expected="0.245 at p = 0.04 and 0.08",
    engine="particles",
    defaults={"L": 0, "p": 0.04, "T": 0, "samples": 200, "seed": 0, "boundary": "open",
              "sizes": [16, 32, 64, 128, 256], "ratio": 2.0, "depth_factor": 8},
)
class _KSteady:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg, cfg["sizes"]))
    work = staticmethod(_K_steady_work)
    reduce = staticmethod(_K_steady_reduce)


# ---------------------------------------------------------------- two-species sampling


def _P_work(cfg, pt, index):
    spec = _spec(cfg)
    s = particles.sample_P(spec, cfg["n_configs"], spec.T, index)
    return {"P": s.P, "S": s.entropy, "exhausted": s.exhausted_at}


def _P_reduce(cfg, results):
    out = Outcome()
    T = cfg["T"]
    axis = np.arange(T + 1)
    ensS = EnsembleSeries(axis, "time")
    ensP = EnsembleSeries(axis, "time")
    for _, r in results:
        ensS.accumulate(r["S"])
        ensP.accumulate(r["P"])
    out.tables["neglog2P_t"] = ensS.to_csv()
    out.tables["P_t"] = ensP.to_csv()
    # points where any trajectory was exhausted are undersampled for the fluctuation fit
    full = ensS.count == len(results)
    std = np.where(full, ensS.std, np.nan)
    _fit(out, "beta_P_t", axis, std, tuple(cfg["fit_window"]))
    _fit(out, "decay_P_t", axis, ensP.mean, tuple(cfg["decay_window"]))
    if "decay_P_t" in out.fits:
        f = out.fits["decay_P_t"]
        out.documents["alpha"] = {"alpha": -f.exponent, "stderr": f.stderr}
    if (~full[1:]).any():
        out.flags.append(f"undersampled:P exhausted from t={int(np.argmax(~full))}")
    return out


@preset(
    name="fig5a",
    summary="Two-species Monte Carlo: -log2 P(t) fluctuations and mean decay of P(t)",
    anchor="fraction of non-meeting configurations; power-law decay at the critical point",
    expected="fluctuation exponent 0.34 at p = 0.08; P(t) ~ t^-0.938 at p_c",
    engine="particles",
    defaults={"L": 256, "p": 0.08, "T": 32, "samples": 200, "seed": 0, "boundary": "periodic",
              "n_configs": 16384, "fit_window": [2, 16], "decay_window": [8, 32]},
)
class _PSample:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_P_work)
    reduce = staticmethod(_P_reduce)


def _M_work(cfg, L_A, index):
    L = int(round(L_A * cfg["ratio"]))
    L += L % 2
    spec = _spec(cfg, L=L, T=cfg["depth_factor"] * L, boundary="open")
    m = particles.approx_two_species_M(spec, L_A, spec.T, index)
    return {"M": float(m.neglog2M[-1])}


@preset(
    name="fig5b",
    summary="Approximate two-species model: steady-state -log2 M fluctuations versus L_A",
    anchor="X basis eliminated against the window right of the leftmost Y particle",
    expected="0.266 at p = 0.04 and 0.08",
    engine="particles",
    defaults={"L": 0, "p": 0.04, "T": 0, "samples": 200, "seed": 0, "boundary": "open",
              "sizes": [16, 32, 64, 128, 256], "ratio": 2.0, "depth_factor": 4},
)
class _MSteady:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg, cfg["sizes"]))
    work = staticmethod(_M_work)
    reduce = staticmethod(lambda cfg, res: _sweep_reduce_scalar(cfg, res, "neglog2M_LA", "subsystem-size", "beta_M_LA", "M"))


# ---------------------------------------------------------------- purification profiles


def _purify_state(cfg, L, index, T):
    spec = _spec(cfg, family="PURIFY", L=L, T=T)
    st = stabilizer.QAState(2 * L)
    st.apply_ops(realization_for(spec, index).ops)
    return spec, st


def _fig6a_work(cfg, pt, index):
    L = cfg["L"]
    spec, st = _purify_state(cfg, L, index, cfg["T_factor"] * L)
    prof = codes.window_profiles(st, L, [0], purify=True, lmax=L, wrap=False)
    return {"S": prof["S"][0].astype(float), "I": prof["I"][0].astype(float), "S_Q": st.entropy(np.arange(L))}


def _fig6a_reduce(cfg, results):
    out = Outcome()
    axis = np.arange(cfg["L"] + 1)
    ensS = EnsembleSeries(axis, "subsystem-size")
    ensI = EnsembleSeries(axis, "subsystem-size")
    sq = []
    for _, r in results:
        ensS.accumulate(r["S"])
        ensI.accumulate(r["I"])
        sq.append(r["S_Q"])
    out.tables["S_A_LA"] = ensS.to_csv()
    out.tables["I_AR_LA"] = ensI.to_csv()
    d, cens = codes.first_crossing(ensI.mean, codes.EPSILON, strict=False)
    out.documents["profile"] = {"peak_L_A": int(np.argmax(ensS.mean)), "mean_S_Q": float(np.mean(sq)),
                                "L_A_star": d, "censored": cens}
    return out


@preset(
    name="fig6a",
    summary="Purification: S_A and I_{A,R} versus L_A at T = 2L",
    anchor="S_A is non-monotonic in L_A and ends at S_Q; I_{A,R} stays ~0 below L_A*",
    expected="peak near L - L_A*",
    engine="stabilizer",
    defaults={"L": 128, "p": 0.04, "T": 0, "samples": 100, "seed": 0, "boundary": "periodic", "T_factor": 2},
)
class _Fig6a:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_fig6a_work)
    reduce = staticmethod(_fig6a_reduce)


# ---------------------------------------------------------------- code distances


def _distance_work(kind):
    def work(cfg, L, index):
        spec = _spec(cfg, family="PURIFY", L=L, T=cfg["T_factor"] * L)
        lmax = min(L, cfg["lmax"])
        fn = {"I_AR": codes.qecc_trajectory, "rank_deficit_Z": codes.z_error_trajectory,
              "rank_deficit_c": codes.clc_trajectory}[kind]
        crit, aux = fn(spec, index, lmax)
        return {"crit": crit, "aux": aux}

    return work


def _distance_reduce(kind, fit_name):
    def reduce(cfg, results):
        out = Outcome()
        rows, pts = [], []
        scans = {}
        for L, res in _group(results):
            spec = _spec(cfg, family="PURIFY", L=L, T=cfg["T_factor"] * L)
            crit = [r["crit"] for r in res]
            aux = [r["aux"] for r in res]
            if kind == "I_AR":
                sc = codes.qecc_distance(crit, spec, aux)
            elif kind == "rank_deficit_Z":
                sc = codes.z_error_distance(crit, spec, aux)
            else:
                sc = codes.clc_distance(crit, spec, aux)
            scans[L] = sc
            rows.append((L, sc.distance, sc.censored, sc.degenerate, float(np.mean(aux)), sc.n_samples))
            if sc.censored or sc.degenerate:
                out.flags.append(f"degenerate:{kind} scan at L={L} censored={sc.censored}")
            elif sc.distance is not None:
                pts.append((L, sc.distance))
            out.tables[f"criterion_L{L}"] = _table(["l", "mean", "stddev"],
                                                   zip(range(len(sc.criterion)), sc.criterion, sc.stddev))
        out.tables["distance_L"] = _table(["L", "distance", "censored", "degenerate", "mean_k", "n"], rows)
        out.documents["scans"] = {str(L): sc.to_dict() for L, sc in scans.items()}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                out.fits[fit_name] = extract_distance_exponent(pts)
        except ValueError as e:
            out.flags.append(f"degenerate:{fit_name}:{e}")
        return out

    return reduce


def _distance_preset(name, kind, fit_name, summary, anchor, expected, T_factor):
    cls = type(name, (), {
        "jobs": staticmethod(lambda cfg: _index_jobs(cfg, cfg["sizes"])),
        "work": staticmethod(_distance_work(kind)),
        "reduce": staticmethod(_distance_reduce(kind, fit_name)),
    })
    preset(name=name, summary=summary, anchor=anchor, expected=expected, engine="codes",
           defaults={"L": 0, "p": 0.04, "T": 0, "samples": 50, "seed": 0, "boundary": "periodic",
                     "sizes": [64, 96, 128, 192, 256], "T_factor": T_factor, "lmax": 96})(cls)


_distance_preset("fig6b", "I_AR", "gamma_d_cont",
                 "Contiguous QECC distance from <I_{A,R}> <= 1 versus L at T = 3L",
                 "distance = largest window length whose ensemble-mean I_{A,R} stays at or below 1",
                 "L^0.343 at p = 0.04, L^0.387 at p = 0.08", 3)
_distance_preset("fig8b", "rank_deficit_Z", "gamma_dZ_cont",
                 "Z-error distance from rank H - rank H' < 1 versus L at T = 3L",
                 "distance = largest zeroed initial window whose mean rank loss stays below 1",
                 "L^0.327 at p = 0.04, L^0.366 at p = 0.08", 3)
_distance_preset("fig9b", "rank_deficit_c", "gamma_dc_cont",
                 "Classical linear code distance from generator-matrix ranks versus L at T = 4L",
                 "distance = largest zeroed final column window whose mean rank loss stays below 1",
                 "L^0.331 at p = 0.04", 4)


# ---------------------------------------------------------------- P1, UM_U, purification fluctuations


def _P1_work(cfg, pt, index):
    L = cfg["L"]
    spec = _spec(cfg, family="PURIFY", L=L, T=cfg["T_factor"] * L)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prof = particles.sample_P1(spec, cfg["n_configs"], index)
    L_, st = _purify_state(cfg, L, index, cfg["T_factor"] * L)
    S = codes.window_profiles(st, L, [0], lmax=L, wrap=False)["S"][0]
    return {"P1": prof.neglog2P1, "PX": prof.neglog2PX, "PYPQ": prof.neglog2PY + prof.neglog2PQ,
            "S": S.astype(float), "under": prof.undersampled}


def _P1_reduce(cfg, results):
    out = Outcome()
    axis = np.arange(cfg["L"] + 1)
    ens = {k: EnsembleSeries(axis, "subsystem-size") for k in ("S", "P1", "PX", "PYPQ")}
    under = np.zeros(len(axis), dtype=bool)
    for _, r in results:
        for k in ens:
            ens[k].accumulate(r[k])
        under |= r["under"]
    for k, e in ens.items():
        out.tables[f"{k}_LA"] = e.to_csv()
    if under.any():
        out.flags.append(f"undersampled:P1 at {int(under.sum())} cuts")
    out.documents["peaks"] = {"S_peak_L_A": int(np.nanargmax(ens["S"].mean))}
    return out


@preset(
    name="fig8a",
    summary="Sampled -log2 P_1 over cuts against the Clifford S_A in purification",
    anchor="configurations that never meet and whose X particles are gone at time T",
    expected="non-monotonic profile with a peak near L^c",
    engine="particles",
    defaults={"L": 32, "p": 0.08, "T": 0, "samples": 50, "seed": 0, "boundary": "periodic", "T_factor": 3,
              "n_configs": 65536},
)
class _P1:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_P1_work)
    reduce = staticmethod(_P1_reduce)


def _umu_work(cfg, pt, index):
    L = cfg["L"]
    spec = CircuitSpec(family="UM_U", L=L, p=cfg["p"], T1=cfg["T_factor"] * L, T2=cfg["T_factor"] * L,
                       seed=cfg["seed"], boundary=cfg["boundary"])
    prof = codes.um_u_profile(spec, index)
    return {"S": prof.S_A.astype(float), "I": prof.I_AR.astype(float), "P2": prof.neglog2P2.astype(float),
            "S_Q": prof.S_Q, "PQ": prof.neglog2PQ}


def _umu_reduce(cfg, results):
    out = Outcome()
    axis = np.arange(cfg["L"] + 1)
    ens = {k: EnsembleSeries(axis, "subsystem-size") for k in ("S", "I", "P2")}
    sq = []
    for _, r in results:
        for k in ens:
            ens[k].accumulate(r[k])
        sq.append(r["S_Q"])
    for k, e in ens.items():
        out.tables[f"{k}_LA"] = e.to_csv()
    d, cens = codes.first_crossing(ens["I"].mean, codes.EPSILON, strict=False)
    Lc = (cfg["L"] + float(np.mean(sq))) / 2
    out.documents["umu"] = {"mean_S_Q": float(np.mean(sq)), "L_c": Lc, "distance": d, "censored": cens}
    return out


@preset(
    name="fig10b",
    summary="U+M followed by pure U: S_A, I_{A,R} and -log2 P_2 versus L_A",
    anchor="S_A equals L_A below L^c; the code distance L - L^c is linear in L",
    expected="S_A = L_A for L_A < L^c; distance ~ L",
    engine="codes",
    defaults={"L": 128, "p": 0.08, "T": 0, "samples": 50, "seed": 0, "boundary": "periodic", "T_factor": 2},
)
class _UMU:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_umu_work)
    reduce = staticmethod(_umu_reduce)


def _figD_work(cfg, pt, index):
    L = cfg["L"]
    spec, st = _purify_state(cfg, L, index, cfg["T_factor"] * L)
    prof = codes.window_profiles(st, L, [0], lmax=L, wrap=False)["S"][0]
    sq = st.entropy(np.arange(L))
    # S_B for B = [l, L): profile from the right end, via a mirrored scan
    SB = np.array([st.entropy(np.arange(l, L)) for l in cfg["cuts"]], dtype=float)
    SA = prof[np.asarray(cfg["cuts"])].astype(float)
    return {"S": SA, "I_AB": SA + SB - sq}


def _figD_reduce(cfg, results):
    out = Outcome()
    axis = np.asarray(cfg["cuts"])
    eS = EnsembleSeries(axis, "subsystem-size")
    eI = EnsembleSeries(axis, "subsystem-size")
    for _, r in results:
        eS.accumulate(r["S"])
        eI.accumulate(r["I_AB"])
    out.tables["S_A_LA"] = eS.to_csv()
    out.tables["I_AB_LA"] = eI.to_csv()
    _fit(out, "beta_S_purify", axis, eS.std, tuple(cfg["fit_window"]))
    _fit(out, "beta_I_AB", axis, eI.mean, tuple(cfg["fit_window"]))
    return out


@preset(
    name="figD14",
    summary="Purification: fluctuations of S_A and growth of I_{A,B} versus L_A",
    anchor="delta S_A and the mutual information between A and B both scale like KPZ",
    expected="delta S_A ~ L_A^0.318, I_{A,B} ~ L_A^0.324",
    engine="stabilizer",
    defaults={"L": 256, "p": 0.04, "T": 0, "samples": 100, "seed": 0, "boundary": "periodic", "T_factor": 2,
              "cuts": [4, 6, 8, 12, 16, 24, 32, 48, 64], "fit_window": [4, 64]},
)
class _FigD:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_figD_work)
    reduce = staticmethod(_figD_reduce)


# ---------------------------------------------------------------- RWRE


def _rwre_work(cfg, pt, index):
    from .circuit import rng_stream

    N = particles.rwre_run(cfg["L_A"], cfg["T"], rng_stream(cfg["seed"], index), count=cfg["count"])
    return {"N": N.astype(float)}


def _rwre_reduce(cfg, results):
    out = Outcome()
    axis = np.arange(cfg["T"] + 1)
    ens = EnsembleSeries(axis, "time")
    for _, r in results:
        ens.accumulate(r["N"])
    out.tables["N_t"] = ens.to_csv()
    _fit(out, "beta_N_t", axis, ens.std, tuple(cfg["fit_window"]))
    if ens.mean[-1] >= cfg["L_A"]:
        out.flags.append("degenerate:all walkers arrived within the horizon")
    return out


@preset(
    name="figC13",
    summary="End-point walkers in a dynamic random environment: fluctuations of N(t)",
    anchor="N(t) counts walkers past the boundary under the ordered-arrival assumption",
    expected="delta N ~ t^0.26",
    engine="rwre",
    defaults={"L": 0, "p": 0.0, "T": 20000, "samples": 200, "seed": 0, "boundary": "open", "L_A": 1000,
              "count": "ordered", "fit_window": [100, 10000]},
)
class _RWRE:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_rwre_work)
    reduce = staticmethod(_rwre_reduce)


# ---------------------------------------------------------------- transitions


def _cross_jobs(cfg):
    return [((L, p), i) for L in cfg["sizes"] for p in cfg["p_grid"] for i in range(cfg["samples"])]


def _SQ_work(cfg, pt, index):
    L, p = pt
    spec = CircuitSpec(family="PURIFY", L=L, p=p, T=cfg["T_factor"] * L, seed=cfg["seed"], boundary=cfg["boundary"])
    st = stabilizer.QAState(2 * L)
    st.apply_ops(realization_for(spec, index).ops)
    return {"v": st.entropy(np.arange(L))}


def _z2_half_work(cfg, pt, index):
    L, p = pt
    spec = CircuitSpec(family="Z2", L=L, p=p, T=cfg["T_factor"] * L, seed=cfg["seed"], boundary=cfg["boundary"])
    st = stabilizer.make_state(spec)
    st.apply_ops(realization_for(spec, index).ops)
    return {"v": st.entropy(np.arange(L // 2))}


def _cross_table(cfg, results):
    means = {}
    rows = []
    for (L, p), res in _group(results):
        v = np.array([r["v"] for r in res], dtype=float)
        means[(L, p)] = v.mean()
        rows.append((L, p, v.mean(), v.std(), len(v)))
    return means, _table(["L", "p", "mean", "stddev", "n"], rows)


def _SQ_reduce(cfg, results):
    out = Outcome()
    means, tab = _cross_table(cfg, results)
    out.tables["S_Q_p"] = tab
    sizes, grid = cfg["sizes"], cfg["p_grid"]
    cross = {}
    for a, b in zip(sizes, sizes[1:]):
        c = crossing_point(grid, [means[(a, p)] for p in grid], [means[(b, p)] for p in grid])
        cross[f"{a}-{b}"] = c
        if c is None:
            out.flags.append(f"degenerate:no crossing between L={a} and L={b}")
    out.documents["crossings"] = cross
    return out


def _z2_reduce(cfg, results):
    out = Outcome()
    means, tab = _cross_table(cfg, results)
    out.tables["S_half_p"] = tab
    s = cfg["sizes"]
    if len(s) != 3:
        raise ConfigError("z2-crossing needs exactly three sizes L0, 2L0, 4L0")
    grid = cfg["p_grid"]
    R = []
    for p in grid:
        a, b, c = (means[(L, p)] for L in s)
        R.append((c - b) / (b - a) if b != a else float("nan"))
    out.tables["increment_ratio_p"] = _table(["p", "R"], zip(grid, R))
    cx = crossing_point(grid, R, [cfg["R_mid"]] * len(grid))
    out.documents["crossover"] = {"p_cross": cx, "R": R, "R_mid": cfg["R_mid"]}
    if cx is None:
        out.flags.append("degenerate:increment ratio never crosses the midpoint")
    return out


@preset(
    name="purify-crossing",
    summary="Purification S_Q(t = 4L) versus p for several L; curve crossings locate p_c",
    anchor="purification time changes from exponential to short at the measurement transition",
    expected="p_c ~ 0.138",
    engine="stabilizer",
    defaults={"L": 0, "p": 0.0, "T": 0, "samples": 200, "seed": 0, "boundary": "periodic", "T_factor": 4,
              "sizes": [16, 32, 64], "p_grid": [0.10, 0.12, 0.14, 0.16, 0.18, 0.20]},
)
class _SQCross:
    jobs = staticmethod(_cross_jobs)
    work = staticmethod(_SQ_work)
    reduce = staticmethod(_SQ_reduce)


@preset(
    name="z2-crossing",
    summary="Z2 circuit: volume-to-logarithmic crossover from half-chain entropy increments",
    anchor="R(p) = [S(4L0) - S(2L0)] / [S(2L0) - S(L0)] falls from 2 (volume law) to 1 (log law)",
    expected="crossover near p_c = 0.335",
    engine="stabilizer",
    defaults={"L": 0, "p": 0.0, "T": 0, "samples": 200, "seed": 0, "boundary": "periodic", "T_factor": 2,
              "sizes": [16, 32, 64], "p_grid": [0.2, 0.25, 0.3, 0.35, 0.4, 0.45], "R_mid": 1.5},
)
class _Z2Cross:
    jobs = staticmethod(_cross_jobs)
    work = staticmethod(_z2_half_work)
    reduce = staticmethod(_z2_reduce)


# ---------------------------------------------------------------- oracle cross-check


def _oracle_work(cfg, pt, index):
    from fractions import Fraction

    L = cfg["L"]
    spec = CircuitSpec(family="ENTANGLE", L=L, p=cfg["p"], T=cfg["T"], seed=cfg["seed"], boundary=cfg["boundary"])
    real = realization_for(spec, index)
    A = list(range(L // 2))
    st = oracle.PhaseState(L)
    oracle.evolve_phase_state(st, real.layers[: real.n_prefix])
    q = stabilizer.QAState(L)
    q.apply_ops(real.ops, 0, int(real.step_offsets[0]))
    counts = oracle.exhaustive_pair_count(real, A) if L <= 12 else None
    ent_bad = 0
    map_bad = []
    for t in range(real.T + 1):
        if t:
            oracle.evolve_phase_state(st, real.step_layers(t - 1))
            q.apply_ops(real.ops, int(real.step_offsets[t - 1]), int(real.step_offsets[t]))
        pur = oracle.purity_swap(st, A)
        if oracle.entropy_from_purity(pur) != q.entropy(A):
            ent_bad += 1
        if counts is not None:
            c = counts[t]
            if Fraction(c.N, c.total) != pur:
                map_bad.append((t, f"{c.N}/{c.total}", str(pur)))
    return {"ent": ent_bad, "map": map_bad, "checks": real.T + 1}


def _oracle_reduce(cfg, results):
    out = Outcome()
    ent = sum(r["ent"] for _, r in results)
    checks = sum(r["checks"] for _, r in results)
    rows = []
    for (_, i), r in results:
        for t, nf, pur in r["map"]:
            rows.append((i, t, nf, pur))
    out.tables["mapping_mismatches"] = _table(["realization", "t", "N_over_2L", "purity"], rows)
    out.documents["report"] = {"checks": checks, "entropy_mismatches": ent, "mapping_mismatches": len(rows),
                               "summary": f"{ent} mismatches between engines over {checks} comparisons"}
    if ent:
        out.flags.append(f"degenerate:{ent} entropy mismatches")
    return out


@preset(
    name="oracle-check",
    summary="Exact cross-check of stabilizer entropies against the phase-state purity",
    anchor="purity from the swap double sum; particle counts compared and mismatches listed",
    expected="0 entropy mismatches",
    engine="oracle",
    defaults={"L": 8, "p": 0.2, "T": 4, "samples": 100, "seed": 0, "boundary": "periodic"},
)
class _Oracle:
    jobs = staticmethod(lambda cfg: _index_jobs(cfg))
    work = staticmethod(_oracle_work)
    reduce = staticmethod(_oracle_reduce)
