import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qa_volume import oracle, stabilizer
from qa_volume.circuit import CircuitSpec, ConfigError, realization_for
from qa_volume.stabilizer import QAState, Schedule, StabilizerTableau, init_plus_x, run_trajectory


def test_bell_pair_tableau():
    t = StabilizerTableau(2)
    t.h(0)
    t.cnot(0, 1)
    assert sorted(t.stabilizer_strings()) == ["+XX", "+ZZ"]
    assert t.entropy([0]) == 1
    assert t.is_valid()


def test_forced_and_deterministic_measurements():
    t = init_plus_x(1)
    out, rnd = t.measure_z(0, forced=1)
    assert (out, rnd) == (1, True)
    out, rnd = t.measure_z(0, forced=0)
    assert (out, rnd) == (1, False)
    assert t.stabilizer_strings() == ["-Z"]


def test_ghz_parity():
    t = StabilizerTableau(3)
    t.h(0)
    t.cnot(0, 1)
    t.cnot(1, 2)
    out, rnd = t.measure_pauli(xs=[0, 1, 2])
    assert (out, rnd) == (0, False)
    assert t.entropy([0]) == 1 and t.entropy([0, 1]) == 1


def test_graph_state_cz_toggles():
    q = QAState(3)
    assert q.entropy([0]) == 0
    q.cz(0, 1)
    assert q.entropy([0]) == 1
    q.cz(0, 1)
    assert q.entropy([0]) == 0


def test_gate_site_checks():
    q = QAState(3)
    with pytest.raises(ValueError):
        q.cnot(1, 1)
    with pytest.raises(IndexError):
        q.cz(0, 5)
    t = StabilizerTableau(2)
    with pytest.raises(ValueError):
        t.measure_pauli(xs=[0], zs=[0])


def _compare_engines(spec, index, regions):
    r = realization_for(spec, index)
    q = QAState(spec.n_qubits)
    tab = init_plus_x(spec.n_qubits)
    ph = oracle.PhaseState(spec.n_qubits)
    oracle.evolve_phase_state(ph, r.layers[: r.n_prefix])
    q.apply_ops(r.ops, 0, int(r.step_offsets[0]))
    tab.apply_ops(r.ops, 0, int(r.step_offsets[0]))
    for t in range(r.T):
        lo, hi = int(r.step_offsets[t]), int(r.step_offsets[t + 1])
        q.apply_ops(r.ops, lo, hi)
        tab.apply_ops(r.ops, lo, hi)
        oracle.evolve_phase_state(ph, r.step_layers(t))
        for a in regions:
            e = oracle.entropy_from_purity(oracle.purity_swap(ph, a))
            assert q.entropy(a) == e
            assert tab.entropy(a) == e
    assert np.array_equal((q.signs() < 0).astype(np.uint8), ph.signs)
    assert tab.is_valid()
    conv = q.to_tableau()
    assert conv.is_valid()
    assert all(conv.entropy(a) == q.entropy(a) for a in regions)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([4, 6, 8]), st.floats(0, 0.8), st.booleans())
def test_engines_agree_with_phase_state(seed, L, p, periodic):
    spec = CircuitSpec(family="ENTANGLE", L=L, p=p, T=4, seed=seed, boundary="periodic" if periodic else "open")
    regions = [list(range(k)) for k in range(1, L)] + [[0, L - 1], list(range(0, L, 2))]
    _compare_engines(spec, 0, regions)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 0.8))
def test_engines_agree_purification(seed, p):
    spec = CircuitSpec(family="PURIFY", L=4, p=p, T=4, seed=seed)
    regions = [list(range(k)) for k in range(1, 5)] + [[0, 5], [4, 5, 6, 7]]
    _compare_engines(spec, 0, regions)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 1))
def test_z2_tableau_matches_phase_state(seed, p):
    L = 6
    spec = CircuitSpec(family="Z2", L=L, p=p, T=3, seed=seed)
    r = realization_for(spec, 0)
    tab = stabilizer.make_state(spec)
    ph = oracle.PhaseState(L)
    ph.parity_project(range(L), 0)
    tab.apply_ops(r.ops)
    oracle.evolve_phase_state(ph, r)
    for k in range(1, L):
        assert tab.entropy(range(k)) == oracle.entropy_from_purity(oracle.purity_swap(ph, range(k)))
    assert stabilizer.parity_is_stabilizer(tab, L)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 0.5))
def test_z2_parity_conserved_every_step(seed, p):
    spec = CircuitSpec(family="Z2", L=12, p=p, T=8, seed=seed)
    res = run_trajectory(spec, 0, Schedule(times=tuple(range(9)), observables=("parity",)))
    assert res["parity"].all()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([8, 16, 24]), st.floats(0, 0.5))
def test_entropy_properties(seed, L, p):
    spec = CircuitSpec(family="ENTANGLE", L=L, p=p, T=6, seed=seed)
    q = QAState(L)
    q.apply_ops(realization_for(spec, 0).ops)
    rng = np.random.default_rng(seed)
    A = [i for i in range(L) if rng.random() < 0.4]
    B = [i for i in range(L) if i not in A and rng.random() < 0.5]
    comp = [i for i in range(L) if i not in A]
    sA, sB = q.entropy(A), q.entropy(B)
    assert sA == q.entropy(comp)  # pure state
    assert 0 <= sA <= min(len(A), L - len(A))
    assert q.entropy(A + B) <= sA + sB  # subadditivity


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 0.6))
def test_purification_entropy_never_increases(seed, p):
    spec = CircuitSpec(family="PURIFY", L=16, p=p, T=24, seed=seed)
    res = run_trajectory(spec, 0, Schedule(times=tuple(range(25)), observables=("S_Q",)))
    sq = res["S_Q"]
    assert sq[0] == 16
    assert (np.diff(sq) <= 0).all()


def test_mutual_information_nonnegative_and_bounded():
    spec = CircuitSpec(family="PURIFY", L=12, p=0.1, T=24, seed=4)
    q = QAState(24)
    q.apply_ops(realization_for(spec, 0).ops)
    for k in range(13):
        i = stabilizer.mutual_information_AR(q, range(k), 12)
        assert 0 <= i <= 2 * k


def test_run_trajectory_errors():
    spec = CircuitSpec(family="ENTANGLE", L=8, p=0.1, T=4, seed=0)
    with pytest.raises(ConfigError):
        run_trajectory(spec, 0, Schedule(observables=("energy",)))
    with pytest.raises(ConfigError):
        run_trajectory(spec, 0, Schedule(observables=("S_Q",)))
    with pytest.raises(ConfigError):
        run_trajectory(spec, 0, Schedule(times=(9,)))
    with pytest.raises(ConfigError):
        stabilizer.make_state(CircuitSpec(family="Z2", L=6, p=0.1, T=1), engine="qa")


def test_run_trajectory_profiles_match_direct_entropies():
    spec = CircuitSpec(family="PURIFY", L=10, p=0.1, T=20, seed=3)
    res = run_trajectory(spec, 0, Schedule(observables=("S_profile", "I_AR_profile"), starts=(0, 7)))
    st_ = res["final_state"]
    for si, s in enumerate((0, 7)):
        for k in range(11):
            A = [(s + j) % 10 for j in range(k)]
            assert res["S_profile"][si, k] == st_.entropy(A)
            assert res["I_AR_profile"][si, k] == stabilizer.mutual_information_AR(st_, A, 10)


def test_engines_on_tableau_and_graph_agree_for_long_runs():
    spec = CircuitSpec(family="ENTANGLE", L=40, p=0.1, T=30, seed=9)
    a = run_trajectory(spec, 0, Schedule(times=tuple(range(0, 31, 5))), engine="qa")
    b = run_trajectory(spec, 0, Schedule(times=tuple(range(0, 31, 5))), engine="tableau")
    assert np.array_equal(a["S_half"], b["S_half"])
