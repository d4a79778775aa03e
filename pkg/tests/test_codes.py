import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import dense_bits, dense_rank
from qa_volume import codes, particles, stabilizer
from qa_volume.circuit import CircuitSpec, ConfigError, realization_for
from qa_volume.stabilizer import QAState


def purified_state(L, p, T, seed):
    spec = CircuitSpec(family="PURIFY", L=L, p=p, T=T, seed=seed)
    q = QAState(2 * L)
    q.apply_ops(realization_for(spec, 0).ops)
    return spec, q


def windows(L, s, l, wrap):
    return [(s + j) % L for j in range(l)] if wrap else list(range(s, min(s + l, L)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([6, 10, 16]), st.floats(0, 0.5), st.booleans())
def test_window_profiles_match_direct_entropies(seed, L, p, wrap):
    spec, q = purified_state(L, p, 2 * L, seed)
    starts = [0, L // 3, L - 1]
    prof = codes.window_profiles(q, L, starts, purify=True, wrap=wrap)
    tab = q.to_tableau()
    tprof = codes.window_profiles(tab, L, starts, wrap=wrap)
    for si, s in enumerate(starts):
        for l in range(L + 1):
            if not wrap and s + l > L:
                assert prof["S"][si, l] == -1
                continue
            A = windows(L, s, l, wrap)
            assert prof["S"][si, l] == q.entropy(A) == tprof["S"][si, l]
            assert prof["I"][si, l] == stabilizer.mutual_information_AR(q, A, L)
            assert prof["I"][si, l] >= 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([8, 12]), st.floats(0, 0.6), st.booleans())
def test_rank_deficits_match_brute_force(seed, L, p, wrap):
    spec = CircuitSpec(family="PURIFY", L=L, p=p, T=3 * L, seed=seed, boundary="periodic" if wrap else "open")
    V = particles.evolved_identity(spec)
    H = dense_bits(V, L).T  # row i: evolved unit vector e_i
    k = dense_rank(H)
    dz = codes.z_error_deficits(V, L, L, wrap=wrap)
    dc = codes.clc_deficits(V, L, L, wrap=wrap)
    for s in range(L):
        for l in range(L + 1):
            if not wrap and s + l > L:
                continue
            W = windows(L, s, l, wrap)
            keep = [i for i in range(L) if i not in W]
            assert dz[s, l] == k - dense_rank(H[keep])
            Hc = H.copy()
            Hc[:, W] = 0
            assert dc[s, l] == k - dense_rank(Hc)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 0.6))
def test_deficits_monotone_in_window(seed, p):
    spec = CircuitSpec(family="PURIFY", L=20, p=p, T=60, seed=seed)
    V = particles.evolved_identity(spec)
    for d in (codes.z_error_deficits(V, 20, 20), codes.clc_deficits(V, 20, 20)):
        assert (d[:, 0] == 0).all()
        assert (np.diff(d, axis=1) >= 0).all()


def test_unitary_generator_loses_one_rank_per_zeroed_column():
    spec = CircuitSpec(family="PURIFY", L=32, p=0.0, T=128, seed=1)
    V = particles.evolved_identity(spec)
    d = codes.clc_deficits(V, 32, 32)
    assert np.array_equal(d, np.broadcast_to(np.arange(33), d.shape))


def test_first_crossing_rules():
    assert codes.first_crossing(np.array([0, 0.5, 1.0, 2.0]), 1.0, strict=True) == (1, False)
    assert codes.first_crossing(np.array([0, 0.5, 1.0, 2.0]), 1.0, strict=False) == (2, False)
    assert codes.first_crossing(np.array([0, 0.2]), 1.0, strict=False) == (1, True)


def test_scan_serialization_and_empty_ensemble():
    spec = CircuitSpec(family="PURIFY", L=16, p=0.04, T=48, seed=0)
    scan = codes.run_scan("rank_deficit_Z", spec, 3, 16)
    d = json.loads(scan.to_json())
    assert {"L", "p", "T", "epsilon", "criterion", "distance"} <= set(d)
    assert d["epsilon"] == 1.0 and len(d["criterion"]) == 17
    with pytest.raises(ConfigError):
        codes.make_scan(spec, "I_AR", np.zeros((0, 5)))


def test_fully_purified_code_is_degenerate():
    spec = CircuitSpec(family="PURIFY", L=8, p=0.9, T=40, seed=0)
    scan = codes.run_scan("I_AR", spec, 3, 8)
    assert scan.degenerate and scan.distance is None
    assert codes.run_scan("rank_deficit_c", spec, 3, 8).degenerate


def test_qecc_requires_purification_family():
    with pytest.raises(ConfigError):
        codes.qecc_trajectory(CircuitSpec(family="ENTANGLE", L=8, p=0.1, T=8), 0, 4)


def test_z_error_distance_exceeds_qecc_distance():
    spec = CircuitSpec(family="PURIFY", L=64, p=0.04, T=192, seed=0)
    dq = codes.run_scan("I_AR", spec, 20, 48)
    dz = codes.run_scan("rank_deficit_Z", spec, 20, 48)
    assert dz.distance > dq.distance


def test_um_u_profile_follows_subsystem_size():
    spec = CircuitSpec(family="UM_U", L=64, p=0.08, T1=128, T2=128, seed=1)
    prof = codes.um_u_profile(spec)
    lc = int(prof.L_c)
    assert np.array_equal(prof.S_A[: lc - 8], np.arange(lc - 8))
    assert prof.S_A[64] == prof.S_Q
    assert prof.neglog2P2[64] == prof.neglog2PQ
    assert (prof.I_AR >= 0).all()
