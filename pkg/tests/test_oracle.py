from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qa_volume import oracle
from qa_volume.circuit import CircuitSpec, realization_for

# Outputs of the literal phase-state evolution for one fixed realization,
# frozen when the oracle was written (ENTANGLE, L=6, p=0.3, seed=11, index 0).
FROZEN_SPEC = dict(family="ENTANGLE", L=6, p=0.3, T=6, seed=11)
FROZEN_ENTROPY_A012 = [0, 2, 2, 3, 1, 3, 2]
FROZEN_PURITY_A012 = ["1", "1/4", "1/4", "1/8", "1/2", "1/8", "1/4"]
FROZEN_FINAL_SIGNS = "0000001100001100000011001111110001010110010110010101100110101001"
FROZEN_PAIR_COUNTS = [(64, 8, 8, 8, 1)] + [(30, 24, 24, 18, 12)] * 6


def test_frozen_phase_state_trajectory():
    r = realization_for(CircuitSpec(**FROZEN_SPEC), 0)
    st_ = oracle.PhaseState(6)
    ent, pur = [], []
    for t in range(7):
        if t:
            oracle.evolve_phase_state(st_, r.step_layers(t - 1))
        p = oracle.purity_swap(st_, [0, 1, 2])
        pur.append(str(p))
        ent.append(oracle.entropy_from_purity(p))
    assert ent == FROZEN_ENTROPY_A012
    assert pur == FROZEN_PURITY_A012
    assert "".join(map(str, st_.signs)) == FROZEN_FINAL_SIGNS
    assert st_.norm2() == 64


def test_frozen_pair_counts():
    r = realization_for(CircuitSpec(**FROZEN_SPEC), 0)
    counts = oracle.exhaustive_pair_count(r, [0, 1, 2])
    assert [(c.N, c.N1, c.N_X, c.N_Y, c.N_XY) for c in counts] == FROZEN_PAIR_COUNTS
    assert counts[0].fraction == 1


def test_bell_like_pair():
    s = oracle.PhaseState(2)
    s.cz(0, 1)
    assert s.signs.tolist() == [0, 0, 0, 1]
    assert oracle.purity_swap(s, [0]) == Fraction(1, 2)
    assert oracle.purity_double_sum(s, [0]) == Fraction(1, 2)


def test_composite_measurement_restores_product_state():
    s = oracle.PhaseState(3)
    s.cz(0, 1)
    s.cz(1, 2)
    s.composite_measure(1, 0)
    assert s.norm2() == 8
    assert oracle.purity_swap(s, [0]) == 1


def test_projection_to_empty_support_raises():
    s = oracle.PhaseState(2)
    s.project(0, 1)
    with pytest.raises(ValueError):
        s.project(0, 0)


def test_size_limits():
    with pytest.raises(ValueError):
        oracle.PhaseState(15)
    with pytest.raises(ValueError):
        oracle.purity_double_sum(oracle.PhaseState(8), [0])


def test_entropy_from_purity_requires_power_of_half():
    assert oracle.entropy_from_purity(Fraction(1, 8)) == 3
    with pytest.raises(ValueError):
        oracle.entropy_from_purity(Fraction(3, 8))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 4, 6]), st.floats(0, 0.6))
def test_swap_purity_equals_double_sum(seed, L, p):
    r = realization_for(CircuitSpec(family="ENTANGLE", L=L, p=p, T=3, seed=seed), 0)
    s = oracle.state_at(r, 3)
    rng = np.random.default_rng(seed)
    region = [q for q in range(L) if rng.random() < 0.5]
    assert oracle.purity_swap(s, region) == oracle.purity_double_sum(s, region)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 0.6))
def test_pair_count_identities(seed, p):
    r = realization_for(CircuitSpec(family="ENTANGLE", L=6, p=p, T=4, seed=seed), 0)
    for c in oracle.exhaustive_pair_count(r, [0, 1, 2]):
        assert c.N1 == c.N_X  # X extinct while alive is the same as alive without X
        assert c.N_X + c.N_Y - c.N_XY <= c.N
        assert 0 <= c.N <= c.total == 64


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_purity_complement_symmetry(seed):
    r = realization_for(CircuitSpec(family="ENTANGLE", L=8, p=0.2, T=3, seed=seed), 0)
    s = oracle.state_at(r, 3)
    assert oracle.purity_swap(s, [0, 1, 2]) == oracle.purity_swap(s, [3, 4, 5, 6, 7])
