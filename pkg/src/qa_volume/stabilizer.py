"""Stabilizer simulation of hybrid QA circuits.

Two engines share the compiled op stream of :class:`~qa_volume.circuit.Realization`:

``StabilizerTableau``
    Aaronson-Gottesman tableau (destabilizers, stabilizers, sign bits) with
    rows bit-packed into 64-bit words.  Handles every gate in the package,
    including the Z2 family's CNN gates and two-site composite measurements.

``QAState``
    Specialised engine for circuits built from CNOT, CZ and single-site
    composite measurements acting on ``|+x>``.  Such states stay an
    equal-weight superposition whose signs are a quadratic form
    ``(-1)^(sum_{i<j} G_ij n_i n_j + sum_i l_i n_i)``, i.e. a graph state with
    adjacency ``G`` up to local Z.  A gate costs O(n) instead of O(n^2) for a
    tableau measurement, and the entropy of a region ``A`` is the GF(2) rank
    of the cut block ``G[A, not A]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from . import gf2
from .circuit import (
    OP_CNN,
    OP_CNOT,
    OP_CZ,
    OP_MEAS,
    OP_MEAS_PAIR,
    ConfigError,
    Family,
    Realization,
    CircuitSpec,
    realization_for,
    rng_stream,
)
from .gf2 import get_bit, nwords, popcount64, rank_inplace, submatrix

# ---------------------------------------------------------------- QA graph engine


@nb.njit(cache=True)
def _qa_cnot(adj, lin, c, t):
    gtc = get_bit(adj[t], c)
    lin[c] ^= lin[t] ^ np.uint8(gtc)
    row = adj[t]
    for w in range(row.shape[0]):
        word = row[w]
        while word:
            low = word & (~word + np.uint64(1))
            j = w * 64 + int(popcount64(low - np.uint64(1)))
            if j != c:
                adj[j, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
            word ^= low
    for w in range(row.shape[0]):
        adj[c, w] ^= row[w]
    adj[c, c >> 6] &= ~(np.uint64(1) << np.uint64(c & 63))


@nb.njit(cache=True)
def _qa_measure(adj, lin, i, outcome):
    row = adj[i]
    for w in range(row.shape[0]):
        word = row[w]
        while word:
            low = word & (~word + np.uint64(1))
            j = w * 64 + int(popcount64(low - np.uint64(1)))
            adj[j, i >> 6] &= ~(np.uint64(1) << np.uint64(i & 63))
            if outcome:
                lin[j] ^= np.uint8(1)
            word ^= low
        row[w] = 0
    lin[i] = np.uint8(outcome)


@nb.njit(cache=True)
def qa_apply(adj, lin, ops, lo, hi):
    for k in range(lo, hi):
        op = ops[k, 0]
        a = ops[k, 1]
        b = ops[k, 2]
        if op == OP_CNOT:
            _qa_cnot(adj, lin, a, b)
        elif op == OP_CZ:
            adj[a, b >> 6] ^= np.uint64(1) << np.uint64(b & 63)
            adj[b, a >> 6] ^= np.uint64(1) << np.uint64(a & 63)
        elif op == OP_CNN:
            _qa_cnot(adj, lin, a, b)
            _qa_cnot(adj, lin, a, ops[k, 3])
        elif op == OP_MEAS:
            _qa_measure(adj, lin, a, ops[k, 3])
        else:
            return k
    return -1


class QAState:
    """Graph-state form of a QA stabilizer state on ``n`` qubits."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.adj = np.zeros((n, nwords(n)), dtype=np.uint64)
        self.lin = np.zeros(n, dtype=np.uint8)

    def copy(self) -> "QAState":
        out = QAState(self.n)
        out.adj[:] = self.adj
        out.lin[:] = self.lin
        return out

    def apply_ops(self, ops: np.ndarray, lo: int = 0, hi: int | None = None) -> None:
        hi = ops.shape[0] if hi is None else hi
        bad = qa_apply(self.adj, self.lin, ops, lo, hi)
        if bad >= 0:
            raise ConfigError("QAState supports CNOT, CZ, CNN and single-site composite measurement only")

    def cnot(self, c: int, t: int) -> None:
        _check_sites(self.n, (c, t))
        _qa_cnot(self.adj, self.lin, c, t)

    def cz(self, a: int, b: int) -> None:
        _check_sites(self.n, (a, b))
        gf2.flip_bit(self.adj[a], b)
        gf2.flip_bit(self.adj[b], a)

    def composite_measure(self, i: int, outcome: int = 0) -> None:
        _check_sites(self.n, (i,))
        _qa_measure(self.adj, self.lin, i, int(outcome))

    def adjacency(self) -> np.ndarray:
        return gf2.BitMatrix(self.n, self.adj).to_dense()

    def entropy(self, region) -> int:
        a, b = _split(self.n, region)
        if a.size == 0 or b.size == 0:
            return 0
        return int(rank_inplace(submatrix(self.adj, a, b), b.size))

    def signs(self) -> np.ndarray:
        """Amplitude signs over all ``2**n`` basis states (bit ``j`` of the index is qubit ``j``)."""
        if self.n > 20:
            raise ValueError("state too large to expand")
        idx = np.arange(2**self.n, dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(self.n)) & 1).astype(np.int64)
        g = np.triu(self.adjacency().astype(np.int64), 1)
        phase = (np.einsum("ki,ij,kj->k", bits, g, bits) + bits @ self.lin.astype(np.int64)) & 1
        return 1 - 2 * phase

    def to_tableau(self) -> "StabilizerTableau":
        """Equivalent tableau: stabilizers ``(-1)^l_v X_v Z_N(v)``."""
        tab = StabilizerTableau(self.n)
        n, w = self.n, nwords(self.n)
        tab.x[:] = 0
        tab.z[:] = 0
        for v in range(n):
            gf2.set_bit(tab.z[v], v, 1)  # destabilizer Z_v
            gf2.set_bit(tab.x[n + v], v, 1)
            tab.z[n + v, :w] = self.adj[v]
            tab.r[n + v] = self.lin[v]
            tab.r[v] = 0
        return tab


def init_qa_state(spec: CircuitSpec) -> QAState:
    return QAState(spec.n_qubits)


# ---------------------------------------------------------------- tableau kernels


@nb.njit(cache=True)
def _row_product_phase(x1, z1, x2, z2):
    """Sum of the AG ``g`` function over all qubits, for row 1 times row 2."""
    pos = 0
    neg = 0
    for w in range(x1.shape[0]):
        a = x1[w]
        b = z1[w]
        c = x2[w]
        d = z2[w]
        y = a & b
        xo = a & ~b
        zo = ~a & b
        p = (y & d & ~c) | (xo & d & c) | (zo & c & ~d)
        q = (y & c & ~d) | (xo & d & ~c) | (zo & c & d)
        pos += popcount64(p)
        neg += popcount64(q)
    return int(pos) - int(neg)


@nb.njit(cache=True)
def _rowsum(x, z, r, h, i):
    s = 2 * int(r[h]) + 2 * int(r[i]) + _row_product_phase(x[i], z[i], x[h], z[h])
    r[h] = np.uint8((s % 4) // 2)
    for w in range(x.shape[1]):
        x[h, w] ^= x[i, w]
        z[h, w] ^= z[i, w]


@nb.njit(cache=True)
def _rowsum_into(sx, sz, sr, x, z, r, i):
    s = 2 * int(sr[0]) + 2 * int(r[i]) + _row_product_phase(x[i], z[i], sx, sz)
    sr[0] = np.uint8((s % 4) // 2)
    for w in range(sx.shape[0]):
        sx[w] ^= x[i, w]
        sz[w] ^= z[i, w]


@nb.njit(cache=True)
def _tab_h(x, z, r, a):
    wa = a >> 6
    ba = np.uint64(a & 63)
    one = np.uint64(1)
    for i in range(x.shape[0]):
        xa = (x[i, wa] >> ba) & one
        za = (z[i, wa] >> ba) & one
        r[i] ^= np.uint8(xa & za)
        if xa != za:
            x[i, wa] ^= one << ba
            z[i, wa] ^= one << ba


@nb.njit(cache=True)
def _tab_s(x, z, r, a):
    wa = a >> 6
    ba = np.uint64(a & 63)
    one = np.uint64(1)
    for i in range(x.shape[0]):
        xa = (x[i, wa] >> ba) & one
        za = (z[i, wa] >> ba) & one
        r[i] ^= np.uint8(xa & za)
        z[i, wa] ^= xa << ba


@nb.njit(cache=True)
def _tab_cnot(x, z, r, c, t):
    wc = c >> 6
    bc = np.uint64(c & 63)
    wt = t >> 6
    bt = np.uint64(t & 63)
    one = np.uint64(1)
    for i in range(x.shape[0]):
        xc = (x[i, wc] >> bc) & one
        zc = (z[i, wc] >> bc) & one
        xt = (x[i, wt] >> bt) & one
        zt = (z[i, wt] >> bt) & one
        r[i] ^= np.uint8(xc & zt & (xt ^ zc ^ one))
        x[i, wt] ^= xc << bt
        z[i, wc] ^= zt << bc


@nb.njit(cache=True)
def _tab_cz(x, z, r, a, b):
    wa = a >> 6
    ba = np.uint64(a & 63)
    wb = b >> 6
    bb = np.uint64(b & 63)
    one = np.uint64(1)
    for i in range(x.shape[0]):
        xa = (x[i, wa] >> ba) & one
        za = (z[i, wa] >> ba) & one
        xb = (x[i, wb] >> bb) & one
        zb = (z[i, wb] >> bb) & one
        r[i] ^= np.uint8(xa & xb & (za ^ zb))
        z[i, wa] ^= xb << ba
        z[i, wb] ^= xa << bb


@nb.njit(cache=True)
def _tab_measure_pauli(x, z, r, px, pz, forced):
    """Measure the Pauli ``(px, pz)`` (sign +) on a 2n-row tableau.

    A random outcome is set to ``forced``; a determined outcome is returned
    as is.  Returns ``outcome + 2 * random``.
    """
    n = x.shape[0] // 2
    nw = x.shape[1]
    p = -1
    for i in range(n, 2 * n):
        acc = np.uint64(0)
        for w in range(nw):
            acc ^= (x[i, w] & pz[w]) ^ (z[i, w] & px[w])
        if popcount64(acc) & np.uint64(1):
            p = i
            break
    if p >= 0:
        for i in range(2 * n):
            if i == p:
                continue
            acc = np.uint64(0)
            for w in range(nw):
                acc ^= (x[i, w] & pz[w]) ^ (z[i, w] & px[w])
            if popcount64(acc) & np.uint64(1):
                _rowsum(x, z, r, i, p)
        x[p - n] = x[p]
        z[p - n] = z[p]
        r[p - n] = r[p]
        x[p] = px
        z[p] = pz
        # the sign of a Y-containing product is tracked via the row-phase rule
        # in _rowsum; a bare Pauli string of X/Z letters carries r = outcome.
        r[p] = np.uint8(forced)
        return forced + 2
    sx = np.zeros(nw, dtype=np.uint64)
    sz = np.zeros(nw, dtype=np.uint64)
    sr = np.zeros(1, dtype=np.uint8)
    for i in range(n):
        acc = np.uint64(0)
        for w in range(nw):
            acc ^= (x[i, w] & pz[w]) ^ (z[i, w] & px[w])
        if popcount64(acc) & np.uint64(1):
            _rowsum_into(sx, sz, sr, x, z, r, i + n)
    return int(sr[0])


@nb.njit(cache=True)
def tab_apply(x, z, r, ops, lo, hi):
    nw = x.shape[1]
    px = np.zeros(nw, dtype=np.uint64)
    pz = np.zeros(nw, dtype=np.uint64)
    for k in range(lo, hi):
        op = ops[k, 0]
        a = ops[k, 1]
        b = ops[k, 2]
        c = ops[k, 3]
        if op == OP_CNOT:
            _tab_cnot(x, z, r, a, b)
        elif op == OP_CZ:
            _tab_cz(x, z, r, a, b)
        elif op == OP_CNN:
            _tab_cnot(x, z, r, a, b)
            _tab_cnot(x, z, r, a, c)
        elif op == OP_MEAS:
            px[:] = 0
            pz[:] = 0
            pz[a >> 6] = np.uint64(1) << np.uint64(a & 63)
            _tab_measure_pauli(x, z, r, px, pz, c)
            _tab_h(x, z, r, a)
        elif op == OP_MEAS_PAIR:
            s = b if c == 1 else a
            px[:] = 0
            pz[:] = 0
            pz[s >> 6] = np.uint64(1) << np.uint64(s & 63)
            _tab_measure_pauli(x, z, r, px, pz, 0)
            # R = CNOT(l->r) H(l) CNOT(l->r)
            _tab_cnot(x, z, r, a, b)
            _tab_h(x, z, r, a)
            _tab_cnot(x, z, r, a, b)


class StabilizerTableau:
    """Aaronson-Gottesman tableau on ``n`` qubits, initialised to ``|0...0>``.

    Rows ``0..n-1`` are destabilizers and ``n..2n-1`` stabilizers; ``r`` holds
    sign bits (1 means a ``-`` sign).
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        w = nwords(n)
        self.x = np.zeros((2 * n, w), dtype=np.uint64)
        self.z = np.zeros((2 * n, w), dtype=np.uint64)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        for i in range(n):
            gf2.set_bit(self.x[i], i, 1)
            gf2.set_bit(self.z[n + i], i, 1)

    @classmethod
    def plus_x(cls, n: int) -> "StabilizerTableau":
        return init_plus_x(n)

    def copy(self) -> "StabilizerTableau":
        out = StabilizerTableau.__new__(StabilizerTableau)
        out.n = self.n
        out.x, out.z, out.r = self.x.copy(), self.z.copy(), self.r.copy()
        return out

    # gates ------------------------------------------------------------

    def h(self, a: int) -> None:
        _check_sites(self.n, (a,))
        _tab_h(self.x, self.z, self.r, a)

    def s(self, a: int) -> None:
        _check_sites(self.n, (a,))
        _tab_s(self.x, self.z, self.r, a)

    def cnot(self, c: int, t: int) -> None:
        _check_sites(self.n, (c, t))
        _tab_cnot(self.x, self.z, self.r, c, t)

    def cz(self, a: int, b: int) -> None:
        _check_sites(self.n, (a, b))
        _tab_cz(self.x, self.z, self.r, a, b)

    def cnn(self, c: int, t1: int, t2: int) -> None:
        _check_sites(self.n, (c, t1, t2))
        _tab_cnot(self.x, self.z, self.r, c, t1)
        _tab_cnot(self.x, self.z, self.r, c, t2)

    def apply_gate(self, gate: str, sites) -> None:
        sites = tuple(int(s) for s in sites)
        g = gate.upper()
        if g == "H":
            self.h(*sites)
        elif g == "S":
            self.s(*sites)
        elif g in ("CNOT", "CX"):
            self.cnot(*sites)
        elif g == "CZ":
            self.cz(*sites)
        elif g == "CNN":
            self.cnn(*sites)
        else:
            raise ValueError(f"unsupported gate {gate!r}")

    def apply_ops(self, ops: np.ndarray, lo: int = 0, hi: int | None = None) -> None:
        hi = ops.shape[0] if hi is None else hi
        tab_apply(self.x, self.z, self.r, ops, lo, hi)

    # measurement -----------------------------------------------------------

    def measure_pauli(self, xs=(), zs=(), forced: int = 0) -> tuple[int, bool]:
        """Measure ``prod X_xs prod Z_zs`` (qubits in both sets give Y up to phase).

        Returns ``(outcome, was_random)``; a random outcome is set to ``forced``.
        """
        px = np.zeros(self.x.shape[1], dtype=np.uint64)
        pz = np.zeros(self.x.shape[1], dtype=np.uint64)
        for q in xs:
            gf2.flip_bit(px, q)
        for q in zs:
            gf2.flip_bit(pz, q)
        if np.any(px & pz):
            raise ValueError("measure_pauli takes X-type and Z-type supports without overlap")
        res = _tab_measure_pauli(self.x, self.z, self.r, px, pz, int(forced))
        return res & 1, bool(res >> 1)

    def measure_z(self, a: int, forced: int = 0) -> tuple[int, bool]:
        _check_sites(self.n, (a,))
        return self.measure_pauli(zs=(a,), forced=forced)

    def composite_measure(self, site: int, outcome: int = 0) -> int:
        """Project ``Z_site`` (random outcomes set to ``outcome``) then apply ``H_site``."""
        res, _ = self.measure_z(site, forced=outcome)
        self.h(site)
        return res

    # observables -----------------------------------------------------------

    def stabilizer_matrix(self) -> gf2.BitMatrix:
        """Stabilizer rows as ``[x | z]`` over ``2n`` columns (signs dropped)."""
        dense = np.concatenate(
            [gf2.BitMatrix(self.n, self.x[self.n :]).to_dense(), gf2.BitMatrix(self.n, self.z[self.n :]).to_dense()],
            axis=1,
        )
        return gf2.BitMatrix.from_dense(dense)

    def stabilizer_strings(self) -> list[str]:
        out = []
        for i in range(self.n, 2 * self.n):
            s = "-" if self.r[i] else "+"
            for q in range(self.n):
                xb, zb = gf2.get_bit(self.x[i], q), gf2.get_bit(self.z[i], q)
                s += "IXZY"[int(xb) + 2 * int(zb)]
            out.append(s)
        return out

    def entropy(self, region) -> int:
        a, _ = _split(self.n, region)
        if a.size == 0 or a.size == self.n:
            return 0
        rows = np.arange(self.n, 2 * self.n)
        sub = np.concatenate([submatrix(self.x, rows, a), submatrix(self.z, rows, a)], axis=1)
        return int(rank_inplace(sub, 64 * sub.shape[1])) - a.size

    def is_valid(self) -> bool:
        """Stabilizers commute pairwise and the full tableau has rank 2n."""
        n = self.n
        m = np.concatenate([self.x, self.z], axis=1)
        if gf2.rank_words(m, 64 * m.shape[1]) != 2 * n:
            return False
        for i in range(n, 2 * n):
            for j in range(i + 1, 2 * n):
                acc = np.bitwise_xor.reduce((self.x[i] & self.z[j]) ^ (self.z[i] & self.x[j]))
                if int(acc).bit_count() & 1:
                    return False
        return True


def init_plus_x(n: int) -> StabilizerTableau:
    """Tableau of ``|+x>^n``: stabilizers ``X_i``, destabilizers ``Z_i``."""
    tab = StabilizerTableau(n)
    tab.x, tab.z = tab.z, tab.x
    return tab


def apply_gate(tab: StabilizerTableau, gate: str, sites) -> None:
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ValueError("gate sites overlap")
    tab.apply_gate(gate, sites)


def composite_measure(tab: StabilizerTableau, site: int, sigma: int = 0) -> int:
    return tab.composite_measure(site, sigma)


def entropy(state, region) -> int:
    """Entanglement entropy in bits of ``region`` for either engine."""
    return state.entropy(region)


def mutual_information_AR(state, region, L: int) -> int:
    """``I_{A,R} = S_A + S_Q - S_B`` for a purification state on ``Q = [0, L)``, ``R = [L, 2L)``."""
    a = np.asarray(sorted(set(int(q) for q in region)), dtype=np.int64)
    if a.size and (a.min() < 0 or a.max() >= L):
        raise ValueError("region must lie inside the system Q")
    if state.n != 2 * L:
        raise ValueError("state is not a purification state of 2L qubits")
    if a.size == 0:
        return 0
    b = np.setdiff1d(np.arange(L), a)
    q = np.arange(L)
    return state.entropy(a) + state.entropy(q) - state.entropy(b)


def _check_sites(n, sites):
    if len(set(sites)) != len(sites):
        raise ValueError("gate sites overlap")
    for s in sites:
        if not 0 <= s < n:
            raise IndexError(f"site {s} outside 0..{n - 1}")


def _split(n, region):
    a = np.asarray(sorted(set(int(q) for q in region)), dtype=np.int64)
    if a.size and (a.min() < 0 or a.max() >= n):
        raise ValueError("region is not a subset of the qubits")
    return a, np.setdiff1d(np.arange(n, dtype=np.int64), a)


# ---------------------------------------------------------------- trajectories


@dataclass(frozen=True)
class Schedule:
    """What :func:`run_trajectory` records.

    ``times`` are step counts at which the time-series observables
    (``S_half``, ``S_Q``, ``parity``) are sampled.  ``profile`` requests the
    final-time ``S_A`` and ``I_AR`` profiles over contiguous ``A = [s, s+L_A)``
    for the start positions in ``starts``.
    """

    times: tuple[int, ...] = ()
    observables: tuple[str, ...] = ("S_half",)
    starts: tuple[int, ...] = (0,)
    cut: int | None = None


TIME_OBSERVABLES = {"S_half", "S_Q", "parity"}
PROFILE_OBSERVABLES = {"S_profile", "I_AR_profile"}


def make_state(spec: CircuitSpec, engine: str = "auto"):
    """Initial state for ``spec`` in the requested engine.

    Coupling layers are part of the realization prefix, so this only prepares
    ``|+x>`` (or its even-parity projection for Z2).
    """
    fam = Family(spec.family)
    if engine == "auto":
        engine = "tableau" if fam is Family.Z2 else "qa"
    if engine == "qa":
        if fam is Family.Z2:
            raise ConfigError("the QA graph engine cannot run the Z2 family")
        return QAState(spec.n_qubits)
    if engine == "tableau":
        tab = init_plus_x(spec.n_qubits)
        if fam is Family.Z2:
            tab.measure_pauli(zs=range(spec.L), forced=0)
        return tab
    raise ConfigError(f"unknown engine {engine!r}")


def parity_is_stabilizer(tab: StabilizerTableau, L: int) -> bool:
    """Whether ``+Z_0 ... Z_{L-1}`` is in the stabilizer group (checked by a trial measurement)."""
    trial = tab.copy()
    out, rnd = trial.measure_pauli(zs=range(L), forced=1)
    return (not rnd) and out == 0


def _region_in(spec, region):
    n = spec.L
    for q in region:
        if not 0 <= q < n:
            raise ConfigError(f"region site {q} lies outside the system")


def run_trajectory(spec: CircuitSpec, index: int, schedule: Schedule, engine: str = "auto",
                   realization: Realization | None = None) -> dict[str, np.ndarray]:
    """Evolve one trajectory and record the scheduled observables.

    Returns a dict mapping observable name to an array: time series have one
    entry per ``schedule.times``; profiles have shape ``(len(starts), L + 1)``
    indexed by ``L_A``.
    """
    unknown = set(schedule.observables) - TIME_OBSERVABLES - PROFILE_OBSERVABLES
    if unknown:
        raise ConfigError(f"unknown observables {sorted(unknown)}")
    fam = Family(spec.family)
    L = spec.L
    purify = fam in (Family.PURIFY, Family.UM_U)
    if ("S_Q" in schedule.observables or "I_AR_profile" in schedule.observables) and not purify:
        raise ConfigError("S_Q and I_AR need a purification family")
    cut = L // 2 if schedule.cut is None else schedule.cut
    half = np.arange(cut)
    _region_in(spec, half)
    for s in schedule.starts:
        if not 0 <= s < L:
            raise ConfigError("profile start outside the system")
    times = sorted(set(int(t) for t in schedule.times))
    if times and (times[0] < 0 or times[-1] > spec.depth):
        raise ConfigError("requested times outside [0, depth]")

    real = realization if realization is not None else realization_for(spec, index)
    state = make_state(spec, engine)
    ops, offs = real.ops, real.step_offsets
    state.apply_ops(ops, 0, int(offs[0]))

    out: dict[str, list] = {k: [] for k in schedule.observables if k in TIME_OBSERVABLES}
    q_all = np.arange(L)
    t_now = 0

    def record():
        for k in out:
            if k == "S_half":
                out[k].append(state.entropy(half))
            elif k == "S_Q":
                out[k].append(state.entropy(q_all))
            elif k == "parity":
                out[k].append(parity_is_stabilizer(state, L))

    for t in times:
        state.apply_ops(ops, int(offs[t_now]), int(offs[t]))
        t_now = t
        record()
    state.apply_ops(ops, int(offs[t_now]), int(offs[real.T]))

    result = {k: np.asarray(v) for k, v in out.items()}
    if "S_profile" in schedule.observables or "I_AR_profile" in schedule.observables:
        from .codes import window_profiles

        prof = window_profiles(state, L, schedule.starts, purify=purify)
        if "S_profile" in schedule.observables:
            result["S_profile"] = prof["S"]
        if "I_AR_profile" in schedule.observables:
            result["I_AR_profile"] = prof["I"]
    result["final_state"] = state
    return result
