"""Classical particle models dual to the QA circuit.

Particles live on the bits where two bit strings differ.  Under CNOT the
target bit picks up the control bit, CNN does this for two targets, and a
composite measurement clears the bit.  CZ gates do not move particles.

Everything here works on *bit-sliced* arrays: ``X[site]`` is a packed word
row whose bit ``k`` is the occupancy of configuration (or basis vector)
``k`` at ``site``.  A CNOT is then ``X[t] ^= X[c]`` for 64 configurations per
word, and all configurations of a trajectory see the same quenched layers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .circuit import (
    OP_CNN,
    OP_CNOT,
    OP_CZ,
    OP_MEAS,
    ConfigError,
    Family,
    CircuitSpec,
    Realization,
    realization_for,
    rng_stream,
)
from .gf2 import left_kernel, nwords, popcount64, rank_words, tail_mask, transpose_words

# ---------------------------------------------------------------- kernels


@nb.njit(cache=True)
def _lin_apply(S, ops, lo, hi):
    """Linear particle update of one bit-sliced set over ``ops[lo:hi]``."""
    nw = S.shape[1]
    for k in range(lo, hi):
        op = ops[k, 0]
        a = ops[k, 1]
        b = ops[k, 2]
        if op == OP_CNOT:
            for w in range(nw):
                S[b, w] ^= S[a, w]
        elif op == OP_CNN:
            c = ops[k, 3]
            for w in range(nw):
                S[b, w] ^= S[a, w]
                S[c, w] ^= S[a, w]
        elif op == OP_MEAS:
            for w in range(nw):
                S[a, w] = 0
        elif op == OP_CZ:
            pass
        else:
            return k
    return -1


@nb.njit(cache=True)
def _pair_apply(X, Y, dead, ops, lo, hi):
    """Two-species update with the meeting check ahead of every multi-site gate."""
    nw = X.shape[1]
    for k in range(lo, hi):
        op = ops[k, 0]
        a = ops[k, 1]
        b = ops[k, 2]
        if op == OP_CNOT or op == OP_CZ:
            for w in range(nw):
                dead[w] |= (X[a, w] | X[b, w]) & (Y[a, w] | Y[b, w])
            if op == OP_CNOT:
                for w in range(nw):
                    X[b, w] ^= X[a, w]
                    Y[b, w] ^= Y[a, w]
        elif op == OP_CNN:
            c = ops[k, 3]
            for w in range(nw):
                dead[w] |= (X[a, w] | X[b, w] | X[c, w]) & (Y[a, w] | Y[b, w] | Y[c, w])
                X[b, w] ^= X[a, w]
                X[c, w] ^= X[a, w]
                Y[b, w] ^= Y[a, w]
                Y[c, w] ^= Y[a, w]
        elif op == OP_MEAS:
            for w in range(nw):
                X[a, w] = 0
                Y[a, w] = 0
        else:
            return k
    return -1


@nb.njit(cache=True)
def _count(mask, valid):
    c = 0
    for w in range(mask.shape[0]):
        c += popcount64(mask[w] & valid[w])
    return int(c)


@nb.njit(cache=True)
def _any_rows(S):
    """Word mask of columns (configurations) with any occupied site."""
    out = np.zeros(S.shape[1], dtype=np.uint64)
    for s in range(S.shape[0]):
        for w in range(S.shape[1]):
            out[w] |= S[s, w]
    return out


@nb.njit(cache=True)
def _eliminate_sites(S, live, sites):
    """Remove from the live basis every direction with support on ``sites``.

    ``S`` is site-major: bit ``r`` of ``S[s]`` is entry ``s`` of basis row ``r``.
    For each listed site a live pivot row carrying the site is xored into the
    other carriers and then retired.  Returns the number of retired rows.
    """
    nsites = S.shape[0]
    nw = S.shape[1]
    count = 0
    K = np.empty(nw, dtype=np.uint64)
    for s in sites:
        pw = -1
        for w in range(nw):
            if S[s, w] & live[w]:
                pw = w
                break
        if pw < 0:
            continue
        word = S[s, pw] & live[pw]
        low = word & (~word + np.uint64(1))
        for w in range(nw):
            K[w] = S[s, w] & live[w]
        K[pw] ^= low
        for u in range(nsites):
            if S[u, pw] & low:
                for w in range(nw):
                    S[u, w] ^= K[w]
                S[u, pw] &= ~low
        live[pw] &= ~low
        count += 1
    return count


@nb.njit(cache=True)
def _live_support(S, live, lo, hi):
    """Whether any live row is occupied on a site in ``[lo, hi)``."""
    for s in range(lo, hi):
        for w in range(S.shape[1]):
            if S[s, w] & live[w]:
                return True
    return False


@nb.njit(cache=True)
def _leftmost(S):
    for s in range(S.shape[0]):
        for w in range(S.shape[1]):
            if S[s, w]:
                return s
    return -1


# ---------------------------------------------------------------- helpers


def unit_rows(L: int, sites) -> np.ndarray:
    """Site-major set whose basis row ``r`` is the unit vector on ``sites[r]``."""
    sites = np.asarray(sites, dtype=np.int64)
    S = np.zeros((L, nwords(max(len(sites), 1))), dtype=np.uint64)
    for r, s in enumerate(sites):
        S[s, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    return S


def step_ops(real: Realization, reverse: bool = False):
    """Op array restricted to the time steps (prefix dropped) and its step offsets.

    With ``reverse`` the layers run in the opposite order; gate orientation is
    kept.  Step ``t`` of the result is then original step ``T - 1 - t``.
    """
    offs = real.layer_offsets
    first = real.n_prefix
    if not reverse:
        lo = int(offs[first])
        return real.ops[lo:], real.step_offsets - lo
    nl = len(real.layer_kinds)
    blocks = [real.ops[offs[j] : offs[j + 1]] for j in range(nl - 1, first - 1, -1)]
    ops = np.ascontiguousarray(np.concatenate(blocks)) if blocks else np.zeros((0, 4), dtype=np.int64)
    sizes = np.array([offs[j + 1] - offs[j] for j in range(nl - 1, first - 1, -1)], dtype=np.int64)
    lay = np.concatenate([[0], np.cumsum(sizes)])
    return ops, lay[:: real.layers_per_step].copy()


def _check_lin(bad):
    if bad >= 0:
        raise ConfigError("particle engines handle CNOT, CZ, CNN and single-site measurement only")


def evolve_particle_layer(S: np.ndarray, layer) -> None:
    """Apply one layer (:class:`UnitaryLayer`/:class:`MeasureLayer`) to a site-major set in place."""
    from .circuit import MeasureLayer, UnitaryLayer

    if isinstance(layer, UnitaryLayer):
        code = {"CNOT": OP_CNOT, "CZ": OP_CZ, "CNN": OP_CNN}[layer.kind]
        s = layer.sites
        ops = np.full((len(s), 4), -1, dtype=np.int64)
        ops[:, 0] = code
        ops[:, 1 : 1 + s.shape[1]] = s
    elif isinstance(layer, MeasureLayer):
        if layer.events.size and np.any(layer.events[:, 1] >= 0):
            raise ConfigError("two-site measurements have no single-species particle rule")
        ops = np.full((len(layer), 4), -1, dtype=np.int64)
        ops[:, 0] = OP_MEAS
        ops[:, 1] = layer.sites
    else:
        raise TypeError("expected a circuit layer")
    _check_lin(_lin_apply(S, ops, 0, len(ops)))


def evolve_bits(bits, ops: np.ndarray) -> np.ndarray:
    """Evolve one configuration given as a 0/1 array (convenience for tests)."""
    bits = np.asarray(bits, dtype=np.uint8)
    S = (bits.astype(np.uint64)[:, None]).copy()
    _check_lin(_lin_apply(S, ops, 0, len(ops)))
    return S[:, 0].astype(np.uint8)


@dataclass
class TwoSpeciesState:
    """One configuration pair followed step by step (reference implementation)."""

    hX: np.ndarray
    hY: np.ndarray
    alive: bool = True
    died_at: int | None = None
    x_extinct_at: int | None = None
    t: int = field(default=0)

    def __post_init__(self):
        self.hX = np.asarray(self.hX, dtype=np.uint8).copy()
        self.hY = np.asarray(self.hY, dtype=np.uint8).copy()
        if not self.hX.any():
            self.x_extinct_at = 0


def meeting_check(state: TwoSpeciesState, layer) -> bool:
    """Kill ``state`` if a gate of ``layer`` touches both species (pre-gate occupancies).

    Returns the alive flag.  Measurement layers never kill.
    """
    from .circuit import UnitaryLayer

    if state.alive and isinstance(layer, UnitaryLayer):
        for g in layer.sites:
            if state.hX[g].any() and state.hY[g].any():
                state.alive = False
                state.died_at = state.t
                break
    return state.alive


def step_two_species(state: TwoSpeciesState, layers) -> None:
    """Advance a :class:`TwoSpeciesState` through the layers of one time step."""
    for layer in layers:
        meeting_check(state, layer)
        X = state.hX[:, None].astype(np.uint64)
        Y = state.hY[:, None].astype(np.uint64)
        evolve_particle_layer(X, layer)
        evolve_particle_layer(Y, layer)
        state.hX, state.hY = X[:, 0].astype(np.uint8), Y[:, 0].astype(np.uint8)
    state.t += 1
    if state.x_extinct_at is None and not state.hX.any():
        state.x_extinct_at = state.t


# ---------------------------------------------------------------- two-species sampler


@dataclass
class PSeries:
    """Alive fraction ``P(t)`` for ``t = 0..horizon`` in one realization."""

    P: np.ndarray
    alive: np.ndarray
    n_configs: int
    exhausted_at: int | None

    @property
    def entropy(self) -> np.ndarray:
        """``-log2 P(t)``; ``nan`` once the sample is exhausted."""
        with np.errstate(divide="ignore"):
            out = -np.log2(self.P)
        out[self.alive == 0] = np.nan
        return out


def random_configs(rng: np.random.Generator, L: int, sites, n_configs: int) -> np.ndarray:
    """Site-major random configurations, each bit on ``sites`` drawn uniformly."""
    W = nwords(n_configs)
    S = np.zeros((L, W), dtype=np.uint64)
    sites = np.asarray(sites, dtype=np.int64)
    if len(sites):
        S[sites] = rng.integers(0, 2**64, size=(len(sites), W), dtype=np.uint64, endpoint=False)
        S[:, -1] &= tail_mask(n_configs)
    return S


def _region(L, L_A, start=0):
    a = (start + np.arange(L_A)) % L
    b = np.setdiff1d(np.arange(L), a)
    return a, b


def sample_P(spec: CircuitSpec, n_configs: int, horizon: int, index: int = 0, L_A: int | None = None,
             reverse: bool = False, realization: Realization | None = None) -> PSeries:
    """Fraction of random (X, Y) configurations that have not met, per step.

    X bits are drawn on ``A = [0, L_A)`` and Y bits on the rest of the
    system; all configurations share the realization of trajectory ``index``.
    """
    if horizon <= 0:
        raise ConfigError("horizon must be positive")
    if n_configs < 1:
        raise ConfigError("n_configs must be >= 1")
    L = spec.L
    L_A = L // 2 if L_A is None else L_A
    if realization is None:
        realization = realization_for(spec.replace(**_depth_kw(spec, horizon)), index)
    if realization.T < horizon:
        raise ConfigError("realization shorter than horizon")
    ops, offs = step_ops(realization, reverse)
    rng = rng_stream(spec.seed ^ 0x5A5A5A5A, index)
    a, b = _region(L, L_A)
    X = random_configs(rng, L, a, n_configs)
    Y = random_configs(rng, L, b, n_configs)
    valid = np.full(X.shape[1], np.uint64(0xFFFFFFFFFFFFFFFF))
    valid[-1] = tail_mask(n_configs)
    dead = np.zeros(X.shape[1], dtype=np.uint64)
    alive = np.zeros(horizon + 1, dtype=np.int64)
    alive[0] = n_configs
    exhausted = None
    for t in range(horizon):
        _check_lin(_pair_apply(X, Y, dead, ops, int(offs[t]), int(offs[t + 1])))
        alive[t + 1] = n_configs - _count(dead, valid)
        if alive[t + 1] == 0:
            exhausted = t + 1
            break
    if exhausted is not None:
        alive[exhausted:] = 0
    return PSeries(alive / n_configs, alive, n_configs, exhausted)


def exhaustive_P(realization: Realization, L_A: int, horizon: int | None = None, reverse: bool = False) -> PSeries:
    """``N(t)/2^L`` over every split of an ``L``-bit string into X on ``[0, L_A)`` and Y elsewhere.

    Runs the same bit-sliced kernel as :func:`sample_P` on the complete
    enumeration of :func:`exhaustive_pair_arrays` (``L <= 16``).
    """
    L = realization.spec.L
    horizon = realization.T if horizon is None else horizon
    if horizon > realization.T:
        raise ConfigError("realization shorter than horizon")
    X, Y, n = exhaustive_pair_arrays(L, L_A)
    ops, offs = step_ops(realization, reverse)
    valid = np.full(X.shape[1], np.uint64(0xFFFFFFFFFFFFFFFF))
    valid[-1] = tail_mask(n)
    dead = np.zeros(X.shape[1], dtype=np.uint64)
    alive = np.zeros(horizon + 1, dtype=np.int64)
    alive[0] = n
    for t in range(horizon):
        _check_lin(_pair_apply(X, Y, dead, ops, int(offs[t]), int(offs[t + 1])))
        alive[t + 1] = n - _count(dead, valid)
    return PSeries(alive / n, alive, n, None)


def _depth_kw(spec, horizon):
    if spec.family is Family.UM_U:
        return {}
    return {"T": max(int(horizon), spec.T or 0)}


def exhaustive_pair_arrays(L: int, L_A: int):
    """All ``2**L`` splits (hX on A, hY on B) as site-major sets (``L <= 16``)."""
    if L > 16:
        raise ValueError("exhaustive enumeration limited to L <= 16")
    n = 2**L
    idx = np.arange(n, dtype=np.int64)
    bits = ((idx[None, :] >> np.arange(L)[:, None]) & 1).astype(np.uint8)
    inA = np.zeros(L, dtype=bool)
    inA[:L_A] = True
    packed = np.packbits(bits, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    packed = np.pad(packed, ((0, 0), (0, pad)))
    S = packed.view("<u8").astype(np.uint64)
    X = np.where(inA[:, None], S, 0).astype(np.uint64)
    Y = np.where(~inA[:, None], S, 0).astype(np.uint64)
    return X, Y, n


# ---------------------------------------------------------------- single species


@dataclass
class KSeries:
    """``-log2 K(t)`` for ``t = 0..horizon`` plus the steady-state value."""

    neglog2K: np.ndarray
    steady: int
    steady_at: int | None


def single_species_K(spec: CircuitSpec, L_A: int, horizon: int, index: int = 0,
                     realization: Realization | None = None, reverse: bool = False) -> KSeries:
    """Basis-decomposition estimate of the entanglement of ``A = [0, L_A)``.

    Starts from the unit vectors on ``A``; after every layer, basis directions
    with support in ``B`` are eliminated (window-restricted rank).  The
    cumulative eliminated count is ``-log2 K``.
    """
    L = spec.L
    if not 0 < L_A < L:
        raise ConfigError("need 0 < L_A < L")
    if realization is None:
        realization = realization_for(spec.replace(**_depth_kw(spec, horizon)), index)
    ops, _ = step_ops(realization, reverse)
    lay = _layer_bounds(realization, reverse)
    S = unit_rows(L, np.arange(L_A))
    live = np.zeros(S.shape[1], dtype=np.uint64)
    for r in range(L_A):
        live[r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    bsites = np.arange(L_A, L, dtype=np.int64)
    out = np.zeros(horizon + 1, dtype=np.int64)
    elim = 0
    steady_at = None
    per = realization.layers_per_step
    for t in range(horizon):
        if steady_at is None:
            for j in range(t * per, (t + 1) * per):
                _check_lin(_lin_apply(S, ops, int(lay[j]), int(lay[j + 1])))
                elim += _eliminate_sites(S, live, bsites)
            if not _live_support(S, live, 0, L):
                steady_at = t + 1
        out[t + 1] = elim
    return KSeries(out, elim, steady_at)


def _layer_bounds(real: Realization, reverse: bool) -> np.ndarray:
    offs = real.layer_offsets
    first = real.n_prefix
    sizes = np.diff(offs)[first:]
    if reverse:
        sizes = sizes[::-1]
    return np.concatenate([[0], np.cumsum(sizes)])


# ---------------------------------------------------------------- approximate two species


@dataclass
class MSeries:
    neglog2M: np.ndarray
    boundary: np.ndarray  # leftmost Y site per step, -1 once H_Y is extinct
    frozen_at: int | None


def approx_two_species_M(spec: CircuitSpec, L_A: int, horizon: int, index: int = 0,
                         realization: Realization | None = None) -> MSeries:
    """``-log2 M(t) = L_A - |H_X(t)|`` with the boundary set by the leftmost Y particle.

    Needs open boundaries so that "leftmost" is defined.  ``H_X`` starts as the
    unit vectors on ``[0, L_A)`` and ``H_Y`` on ``[L_A, L)``; after every
    layer ``H_X`` is eliminated against the window ``[b(t), L)``.
    """
    if spec.periodic:
        raise ConfigError("approx_two_species_M needs open boundaries")
    L = spec.L
    if not 0 < L_A < L:
        raise ConfigError("need 0 < L_A < L")
    if realization is None:
        realization = realization_for(spec.replace(**_depth_kw(spec, horizon)), index)
    ops, _ = step_ops(realization)
    lay = _layer_bounds(realization, False)
    X = unit_rows(L, np.arange(L_A))
    Y = unit_rows(L, np.arange(L_A, L))
    live = np.zeros(X.shape[1], dtype=np.uint64)
    for r in range(L_A):
        live[r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    out = np.zeros(horizon + 1, dtype=np.int64)
    bnd = np.full(horizon + 1, L_A, dtype=np.int64)
    elim = 0
    frozen = None
    b = L_A
    per = realization.layers_per_step
    for t in range(horizon):
        for j in range(t * per, (t + 1) * per):
            _check_lin(_lin_apply(X, ops, int(lay[j]), int(lay[j + 1])))
            if b >= 0:
                _check_lin(_lin_apply(Y, ops, int(lay[j]), int(lay[j + 1])))
                b = _leftmost(Y)
                if b < 0:
                    frozen = t + 1
            if b >= 0:
                elim += _eliminate_sites(X, live, np.arange(b, L, dtype=np.int64))
        out[t + 1] = elim
        bnd[t + 1] = b
    return MSeries(out, bnd, frozen)


# ---------------------------------------------------------------- purification


def evolved_identity(spec: CircuitSpec, index: int = 0, t: int | None = None,
                     realization: Realization | None = None, reverse: bool = False) -> np.ndarray:
    """Site-major evolution of the ``L x L`` identity through ``t`` steps.

    Row ``j`` of the result packs column ``j`` of the evolved matrix ``V``:
    bit ``i`` is entry ``j`` of the evolved unit vector ``e_i``.
    """
    if realization is None:
        realization = realization_for(spec, index)
    t = realization.T if t is None else t
    ops, offs = step_ops(realization, reverse)
    S = unit_rows(spec.L, np.arange(spec.L))
    _check_lin(_lin_apply(S, ops, 0, int(offs[t])))
    return S


@dataclass
class RankSeries:
    times: np.ndarray
    rank_H: np.ndarray
    rank_Hp: np.ndarray


def purification_ranks(spec: CircuitSpec, times, L_A: int, start: int = 0, index: int = 0,
                       realization: Realization | None = None) -> RankSeries:
    """``rank H(t)`` and ``rank H'(t)`` at the requested steps.

    ``H(0)`` is the identity on ``Q`` and ``H'(0)`` the same with the
    contiguous columns ``[start, start + L_A)`` (periodic) set to zero.
    """
    L = spec.L
    if not 0 <= L_A <= L:
        raise ConfigError("need 0 <= L_A <= L")
    if realization is None:
        realization = realization_for(spec, index)
    ops, offs = step_ops(realization)
    H = unit_rows(L, np.arange(L))
    Hp = H.copy()
    Hp[(start + np.arange(L_A)) % L] = 0
    times = np.asarray(sorted(int(t) for t in times), dtype=np.int64)
    if times.size and (times[0] < 0 or times[-1] > realization.T):
        raise ConfigError("times outside the realization")
    rH = np.zeros(len(times), dtype=np.int64)
    rP = np.zeros(len(times), dtype=np.int64)
    now = 0
    for k, t in enumerate(times):
        _check_lin(_lin_apply(H, ops, int(offs[now]), int(offs[t])))
        _check_lin(_lin_apply(Hp, ops, int(offs[now]), int(offs[t])))
        now = t
        rH[k] = rank_words(H, 64 * H.shape[1])
        rP[k] = rank_words(Hp, 64 * Hp.shape[1])
    return RankSeries(times, rH, rP)


@dataclass
class P1Profile:
    """Per-cut estimates at the final time (``L_A = 0..L``)."""

    neglog2P1: np.ndarray
    neglog2PX: np.ndarray
    neglog2PY: np.ndarray
    neglog2PQ: int
    undersampled: np.ndarray


def sample_P1(spec: CircuitSpec, n_configs: int, index: int = 0, realization: Realization | None = None,
              cuts=None) -> P1Profile:
    """Sampled ``-log2 P_1`` over cut positions for a purification trajectory.

    For each cut ``A = [0, L_A)`` of ``Q``: ``P_1`` is the fraction of
    configurations that never met and have no X particle left at the final
    step; ``P_X`` counts X extinction before any meeting at any step up to
    the horizon; ``P_Y`` the same for Y; ``P_Q = 2^{-rank H(T)}``.  Zero
    fractions are flagged as undersampled and reported as ``nan``.
    """
    L = spec.L
    if realization is None:
        realization = realization_for(spec, index)
    ops, offs = step_ops(realization)
    T = realization.T
    cuts = np.arange(L + 1) if cuts is None else np.asarray(cuts, dtype=np.int64)
    rng = rng_stream(spec.seed ^ 0xA5A5A5A5, index)
    P1 = np.full(len(cuts), np.nan)
    PX = np.full(len(cuts), np.nan)
    PY = np.full(len(cuts), np.nan)
    under = np.zeros(len(cuts), dtype=bool)
    valid = np.full(nwords(n_configs), np.uint64(0xFFFFFFFFFFFFFFFF))
    valid[-1] = tail_mask(n_configs)
    for k, la in enumerate(cuts):
        a, b = _region(L, int(la))
        X = random_configs(rng, L, a, n_configs)
        Y = random_configs(rng, L, b, n_configs)
        dead = np.zeros_like(valid)
        x_ok = ~_any_rows(X) & valid  # X gone while alive
        y_ok = ~_any_rows(Y) & valid
        for t in range(T):
            _check_lin(_pair_apply(X, Y, dead, ops, int(offs[t]), int(offs[t + 1])))
            x_ok |= ~_any_rows(X) & ~dead & valid
            y_ok |= ~_any_rows(Y) & ~dead & valid
        n1 = _count(~dead & ~_any_rows(X), valid)
        nx = _count(x_ok, valid)
        ny = _count(y_ok, valid)
        for arr, n in ((P1, n1), (PX, nx), (PY, ny)):
            if n:
                arr[k] = -np.log2(n / n_configs)
        under[k] = n1 == 0
    H = evolved_identity(spec, realization=realization)
    pq = int(rank_words(H, 64 * H.shape[1]))
    if under.any():
        warnings.warn(f"{int(under.sum())} cuts undersampled (no surviving configuration)", stacklevel=2)
    return P1Profile(P1, PX, PY, pq, under)


# ---------------------------------------------------------------- RWRE


@nb.njit(cache=True)
def _rwre_kernel(L_A, horizon, seed, omega_all_one, ordered):
    np.random.seed(seed)
    pos = np.arange(L_A).astype(np.int64)
    arrived = np.zeros(L_A, dtype=np.bool_)
    arrival_count = 0
    span = L_A + horizon + 2
    omega = np.empty(span, dtype=np.float64)
    stamp = np.full(span, -1, dtype=np.int64)
    N = np.zeros(horizon + 1, dtype=np.int64)
    front = L_A  # walkers L_A-1 .. front are all arrived; front counts down
    for t in range(horizon):
        for i in range(L_A):
            if arrived[i]:
                continue
            x = pos[i]
            cell = x + horizon + 1
            if stamp[cell] != t:
                stamp[cell] = t
                omega[cell] = 1.0 if omega_all_one else np.random.random()
            if np.random.random() < omega[cell]:
                pos[i] = x + 1
            else:
                pos[i] = x - 1
            if pos[i] >= L_A:
                arrived[i] = True
                arrival_count += 1
        if ordered:
            while front > 0 and arrived[front - 1]:
                front -= 1
            N[t + 1] = L_A - front
        else:
            lo = L_A
            for i in range(L_A):
                if arrived[i]:
                    lo = i
                    break
            N[t + 1] = L_A - lo
    return N


def rwre_run(L_A: int, horizon: int, rng: np.random.Generator | int = 0, *, ballistic: bool = False,
             count: str = "ordered") -> np.ndarray:
    """End-point walkers in a dynamic random environment; returns ``N(t)``, ``t = 0..horizon``.

    One walker starts on each site ``0..L_A-1`` and the boundary sits at
    ``L_A``.  Every step, each occupied site draws a fresh ``omega`` from
    ``U(0, 1)`` and every walker there steps right with probability ``omega``
    (left otherwise).  A walker that reaches the boundary stays counted.

    ``count="ordered"`` reports the largest ``n`` such that the ``n``
    rightmost-starting walkers have all arrived; ``count="leftmost"``
    reports ``L_A`` minus the smallest start among arrived walkers.
    ``ballistic`` forces ``omega = 1``.
    """
    if L_A < 1:
        raise ConfigError("L_A must be >= 1")
    if horizon < 0:
        raise ConfigError("horizon must be non-negative")
    if count not in ("ordered", "leftmost"):
        raise ConfigError("count must be 'ordered' or 'leftmost'")
    if not isinstance(rng, np.random.Generator):
        rng = rng_stream(int(rng), 0)
    seed = int(rng.integers(0, 2**31 - 1))
    return _rwre_kernel(int(L_A), int(horizon), seed, bool(ballistic), count == "ordered")
