"""Exact small-system references.

``PhaseState`` stores a QA state as integer amplitudes in {-1, 0, +1} and
applies every gate literally, including the Hadamard inside a composite
measurement, so it shares no code with the stabilizer or particle engines.
``exhaustive_pair_count`` enumerates every bit-string difference pair with
dense numpy arrays and the layer objects of a realization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circuit import MeasureLayer, Realization, UnitaryLayer

MAX_L = 14


class PhaseState:
    """Equal-weight state ``sum_n s(n) |n>`` with ``s(n)`` in {-1, 0, +1}.

    Basis index bit ``j`` is qubit ``j``.  ``signs`` holds 1 for a minus sign
    and ``support`` marks the nonzero amplitudes.
    """

    def __init__(self, n: int):
        if not 1 <= n <= MAX_L:
            raise ValueError(f"PhaseState supports 1..{MAX_L} qubits")
        self.n = n
        self.amp = np.ones(2**n, dtype=np.int64)
        self._idx = np.arange(2**n, dtype=np.int64)

    @property
    def signs(self) -> np.ndarray:
        return (self.amp < 0).astype(np.uint8)

    @property
    def support(self) -> np.ndarray:
        return self.amp != 0

    def bit(self, q: int) -> np.ndarray:
        return (self._idx >> q) & 1

    def _normalize(self):
        mag = np.abs(self.amp)
        nz = mag[mag > 0]
        if nz.size == 0:
            raise ValueError("projection onto empty support")
        if np.any(nz != nz[0]):
            raise AssertionError("amplitudes lost equal weight")
        self.amp //= nz[0]

    def cnot(self, c: int, t: int) -> None:
        src = self._idx ^ (self.bit(c) << t)
        self.amp = self.amp[src]

    def cz(self, a: int, b: int) -> None:
        self.amp = np.where(self.bit(a) & self.bit(b), -self.amp, self.amp)

    def z(self, a: int) -> None:
        self.amp = np.where(self.bit(a), -self.amp, self.amp)

    def h(self, a: int) -> None:
        b = self.bit(a)
        partner = self.amp[self._idx ^ (1 << a)]
        # |0> -> |0> + |1>, |1> -> |0> - |1>
        self.amp = np.where(b == 0, self.amp + partner, partner - self.amp)
        self._normalize()

    def project(self, a: int, sigma: int) -> None:
        self.amp = np.where(self.bit(a) == sigma, self.amp, 0)
        self._normalize()

    def composite_measure(self, a: int, sigma: int = 0) -> None:
        self.project(a, sigma)
        self.h(a)

    def pair_measure(self, left: int, right: int, side: int, sigma: int = 0) -> None:
        self.project(right if side else left, sigma)
        self.cnot(left, right)
        self.h(left)
        self.cnot(left, right)

    def parity_project(self, sites, sigma: int = 0) -> None:
        par = np.zeros_like(self._idx)
        for q in sites:
            par ^= self.bit(q)
        self.amp = np.where(par == sigma, self.amp, 0)
        self._normalize()

    def norm2(self) -> int:
        return int(np.count_nonzero(self.amp))


def evolve_phase_state(state: PhaseState, layers) -> None:
    """Apply layers (or a :class:`Realization`) to ``state`` in order."""
    if isinstance(layers, Realization):
        layers = layers.layers
    for layer in layers:
        if isinstance(layer, UnitaryLayer):
            for row in layer.sites:
                if layer.kind == "CNOT":
                    state.cnot(int(row[0]), int(row[1]))
                elif layer.kind == "CZ":
                    state.cz(int(row[0]), int(row[1]))
                elif layer.kind == "CNN":
                    state.cnot(int(row[0]), int(row[1]))
                    state.cnot(int(row[0]), int(row[2]))
                else:
                    raise ValueError(f"unknown gate {layer.kind}")
        elif isinstance(layer, MeasureLayer):
            for a, b, side in layer.events:
                if b < 0:
                    state.composite_measure(int(a), layer.outcome)
                else:
                    state.pair_measure(int(a), int(b), int(side), layer.outcome)
        else:
            raise TypeError("expected a circuit layer")


def _split_matrix(state: PhaseState, region):
    a = sorted(set(int(q) for q in region))
    b = [q for q in range(state.n) if q not in a]
    ia = np.zeros_like(state._idx)
    for k, q in enumerate(a):
        ia |= state.bit(q) << k
    ib = np.zeros_like(state._idx)
    for k, q in enumerate(b):
        ib |= state.bit(q) << k
    M = np.zeros((2 ** len(a), 2 ** len(b)), dtype=np.int64)
    M[ia, ib] = state.amp
    return M


def purity_swap(state: PhaseState, region) -> Fraction:
    """``Tr rho_A^2`` as an exact fraction."""
    M = _split_matrix(state, region)
    G = M @ M.T
    num = int(np.sum(G * G))
    den = state.norm2() ** 2
    return Fraction(num, den)


def purity_double_sum(state: PhaseState, region) -> Fraction:
    """Literal sum over bit-string pairs with swapped ``A`` parts (tiny ``L`` only).

    ``sum_{n1,n2} psi(n1) psi(n2) psi*(n1') psi*(n2')`` where ``n1'`` takes
    the ``A`` bits of ``n2`` and ``n2'`` the ``A`` bits of ``n1``.
    """
    if state.n > 7:
        raise ValueError("double sum limited to n <= 7")
    mask = 0
    for q in region:
        mask |= 1 << int(q)
    amp = [int(v) for v in state.amp]
    tot = 0
    for n1, n2 in itertools.product(range(2**state.n), repeat=2):
        if amp[n1] == 0 or amp[n2] == 0:
            continue
        p1 = (n1 & ~mask) | (n2 & mask)
        p2 = (n2 & ~mask) | (n1 & mask)
        tot += amp[n1] * amp[n2] * amp[p1] * amp[p2]
    return Fraction(tot, state.norm2() ** 2)


def entropy_from_purity(pur: Fraction) -> int:
    """``-log2`` of a purity that must be a power of 1/2."""
    if pur.numerator != 1 or pur.denominator & (pur.denominator - 1):
        raise ValueError(f"purity {pur} is not a power of 1/2")
    return pur.denominator.bit_length() - 1


# ---------------------------------------------------------------- pair counting


@dataclass
class PairCounts:
    """Configuration tallies at one time.

    ``N`` never met; ``N1`` never met and no X left; ``N_X`` X went extinct
    before meeting; ``N_Y`` likewise for Y; ``N_XY`` both extinct before
    meeting.  ``total = 2**L``.
    """

    t: int
    N: int
    N1: int
    N_X: int
    N_Y: int
    N_XY: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.N, self.total)


def _apply_dense(bits, layer):
    """Particle rule on dense ``(configs, L)`` uint8 occupancies."""
    if isinstance(layer, UnitaryLayer):
        for row in layer.sites:
            c = int(row[0])
            if layer.kind in ("CNOT", "CNN"):
                for tgt in row[1:]:
                    bits[:, int(tgt)] ^= bits[:, c]
    else:
        for s in layer.sites:
            bits[:, int(s)] = 0


def _meet_dense(X, Y, layer):
    hit = np.zeros(X.shape[0], dtype=bool)
    if isinstance(layer, UnitaryLayer):
        for row in layer.sites:
            cols = [int(v) for v in row]
            hit |= X[:, cols].any(axis=1) & Y[:, cols].any(axis=1)
    return hit


def exhaustive_pair_count(real: Realization, region, t: int | None = None, reverse: bool = True) -> list[PairCounts]:
    """Tallies for every step ``0..t`` over all ``2**L`` (hX on A, hY on B) splits.

    Each configuration is a bit string on ``L`` sites; its ``A`` bits seed X
    particles and the rest Y particles.  ``reverse`` runs the time-step
    layers in reverse order, which is the orientation in which the counts
    pair up with the purity of the forward-evolved state.
    """
    L = real.spec.L
    if L > 12:
        raise ValueError("exhaustive_pair_count limited to L <= 12")
    t = real.T if t is None else t
    inA = np.zeros(L, dtype=bool)
    inA[list(region)] = True
    idx = np.arange(2**L, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(L)[None, :]) & 1).astype(np.uint8)
    X = bits * inA
    Y = bits * ~inA
    alive = np.ones(2**L, dtype=bool)
    x_ext = alive & ~X.any(axis=1)
    y_ext = alive & ~Y.any(axis=1)
    steps = [real.step_layers(s) for s in range(real.T)]
    if reverse:
        steps = [tuple(reversed(st)) for st in reversed(steps)]
    out = [_tally(0, alive, X, Y, x_ext, y_ext)]
    for s in range(t):
        for layer in steps[s]:
            alive &= ~_meet_dense(X, Y, layer)
            _apply_dense(X, layer)
            _apply_dense(Y, layer)
        x_ext |= alive & ~X.any(axis=1)
        y_ext |= alive & ~Y.any(axis=1)
        out.append(_tally(s + 1, alive, X, Y, x_ext, y_ext))
    return out


def _tally(t, alive, X, Y, x_ext, y_ext):
    no_x = ~X.any(axis=1)
    return PairCounts(
        t=t,
        N=int(alive.sum()),
        N1=int((alive & no_x).sum()),
        N_X=int(x_ext.sum()),
        N_Y=int(y_ext.sum()),
        N_XY=int((x_ext & y_ext).sum()),
        total=int(alive.size),
    )


def state_at(real: Realization, t: int, n: int | None = None) -> PhaseState:
    """Phase state after the prefix and ``t`` time steps of ``real``."""
    st = PhaseState(real.spec.n_qubits if n is None else n)
    evolve_phase_state(st, real.layers[: real.n_prefix])
    for s in range(t):
        evolve_phase_state(st, real.step_layers(s))
    return st


@dataclass
class MappingReport:
    """Comparison of ``N(t)/2**L`` with the exact purity over many realizations."""

    checked: int
    entropy_mismatches: int
    mapping_mismatches: list

    def summary(self) -> str:
        return (
            f"{self.checked} comparisons, {self.entropy_mismatches} entropy mismatches, "
            f"{len(self.mapping_mismatches)} particle-count mismatches"
        )
