"""Contiguous code distances and entropy profiles over windows.

All window quantities reduce to ranks of column sets restricted to a
contiguous window ``W = [s, s + l)``.  For each start ``s`` the window grows
one site at a time and the new columns are inserted into an echelon basis,
so every length ``l <= lmax`` costs one insertion.

* ``S_A`` of a pure stabilizer state: ``rank(F|_A) - |A|`` with ``F`` the
  stabilizer matrix.  For the graph form the columns of site ``v`` are the
  unit vector ``e_v`` and row ``v`` of the adjacency matrix.
* ``I_{A,R} = rank(F|_A) - rank(F_Q|_A)`` where ``F_Q`` generates the
  stabilizer group of ``rho_Q``: rows ``(k, k G_QQ)`` for ``k`` in the left
  kernel of the system/reference block ``G_QR``.
* Z-error deficit ``rank H - rank H' = l - rank(K|_W)`` with ``K`` the left
  kernel of the evolved identity ``V`` (rows of ``V`` on ``W`` removed).
* Classical-code deficit, columns of ``V`` on ``W`` removed: the same with
  the right kernel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .circuit import CircuitSpec, ConfigError, Family, realization_for
from .gf2 import left_kernel, nwords, submatrix, transpose_words
from .stats import EnsembleSeries

EPSILON = 1.0


@nb.njit(cache=True)
def interval_ranks(cols, starts, lmax, wrap):
    """``out[i, l]`` = rank of the columns of sites ``starts[i] .. starts[i]+l-1``.

    ``cols[v, c]`` is the ``c``-th packed column vector of site ``v``.
    Without ``wrap`` windows past the last site are marked ``-1``.
    """
    L = cols.shape[0]
    m = cols.shape[1]
    W = cols.shape[2]
    out = np.full((starts.shape[0], lmax + 1), -1, dtype=np.int64)
    basis = np.zeros((m * lmax + 1, W), dtype=np.uint64)
    piv = np.zeros(m * lmax + 1, dtype=np.int64)
    vec = np.empty(W, dtype=np.uint64)
    for si in range(starts.shape[0]):
        s = starts[si]
        r = 0
        out[si, 0] = 0
        for l in range(1, lmax + 1):
            v = s + l - 1
            if v >= L:
                if not wrap:
                    break
                v -= L
            for c in range(m):
                for w in range(W):
                    vec[w] = cols[v, c, w]
                for b in range(r):
                    p = piv[b]
                    if (vec[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
                        for w in range(W):
                            vec[w] ^= basis[b, w]
                for w in range(W):
                    x = vec[w]
                    if x:
                        low = x & (~x + np.uint64(1))
                        bit = 0
                        while low > np.uint64(1):
                            low >>= np.uint64(1)
                            bit += 1
                        for u in range(W):
                            basis[r, u] = vec[u]
                        piv[r] = w * 64 + bit
                        r += 1
                        break
            out[si, l] = r
    return out


def _stack_cols(*mats) -> np.ndarray:
    """Stack per-site column sets ``(L, W)`` into ``(L, m, W)``."""
    W = max(m.shape[1] for m in mats)
    out = np.zeros((mats[0].shape[0], len(mats), W), dtype=np.uint64)
    for c, m in enumerate(mats):
        out[:, c, : m.shape[1]] = m
    return out


def _unit_cols(L, n):
    out = np.zeros((L, nwords(n)), dtype=np.uint64)
    for v in range(L):
        out[v, v >> 6] = np.uint64(1) << np.uint64(v & 63)
    return out


def _gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed product: row ``i`` of the result is the xor of ``b`` rows selected by ``a[i]``."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            if (int(a[i, j >> 6]) >> (j & 63)) & 1:
                out[i] ^= b[j]
    return out


def state_columns(state, L: int) -> np.ndarray:
    """Columns of the full stabilizer matrix for sites ``0..L-1``."""
    from .stabilizer import QAState

    if isinstance(state, QAState):
        return _stack_cols(_unit_cols(L, state.n), state.adj[:L])
    n = state.n
    xs = transpose_words(state.x[n:], n)[:L]
    zs = transpose_words(state.z[n:], n)[:L]
    return _stack_cols(xs, zs)


def reduced_columns(state, L: int) -> np.ndarray | None:
    """Columns of the ``rho_Q`` stabilizer matrix (graph engine only); ``None`` if trivial."""
    from .stabilizer import QAState

    if not isinstance(state, QAState):
        raise ConfigError("I_{A,R} profiles need the graph-state engine")
    q = np.arange(L)
    r = np.arange(L, 2 * L)
    C = submatrix(state.adj, q, r)
    K = left_kernel(C, L)
    if K.shape[0] == 0:
        return None
    GQQ = submatrix(state.adj, q, q)
    KG = _gf2_matmul(K, GQQ)
    return _stack_cols(transpose_words(K, L), transpose_words(KG, L))


def window_profiles(state, L: int, starts=(0,), purify: bool = False, lmax: int | None = None,
                    wrap: bool = True) -> dict[str, np.ndarray]:
    """``S_A`` (and ``I_{A,R}`` when ``purify``) for ``A = [s, s+l)``, ``l = 0..lmax``."""
    lmax = L if lmax is None else min(lmax, L)
    starts = np.asarray(starts, dtype=np.int64)
    F = interval_ranks(state_columns(state, L), starts, lmax, wrap)
    ls = np.arange(lmax + 1)
    S = np.where(F >= 0, F - ls, -1)
    out = {"S": S}
    if purify:
        red = reduced_columns(state, L)
        rA = np.zeros_like(F) if red is None else interval_ranks(red, starts, lmax, wrap)
        out["I"] = np.where(F >= 0, F - rA, -1)
    return out


# ---------------------------------------------------------------- distance scans


@dataclass
class DistanceScan:
    """Ensemble criterion over window lengths and the extracted distance.

    ``kind`` is ``"I_AR"`` (distance = largest ``l`` before the mean exceeds
    ``epsilon``) or a rank deficit (largest ``l`` before the mean reaches
    ``epsilon``).  ``censored`` means the criterion never crossed within the
    scanned lengths; ``degenerate`` means no information was encoded.
    """

    L: int
    p: float
    T: int
    epsilon: float
    kind: str
    criterion: np.ndarray
    stddev: np.ndarray
    n_samples: int
    distance: int | None
    censored: bool = False
    degenerate: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "p": self.p,
            "T": self.T,
            "epsilon": self.epsilon,
            "kind": self.kind,
            "criterion": [float(v) for v in self.criterion],
            "distance": self.distance,
            "n_samples": self.n_samples,
            "censored": self.censored,
            "degenerate": self.degenerate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def first_crossing(mean: np.ndarray, epsilon: float, strict: bool) -> tuple[int, bool]:
    """Largest ``l`` before the first crossing; ``strict`` crosses at ``>= epsilon``."""
    bad = mean >= epsilon if strict else mean > epsilon
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return len(mean) - 1, True
    return int(hits[0]) - 1, False


def make_scan(spec: CircuitSpec, kind: str, samples, epsilon: float = EPSILON, degenerate: bool = False,
              **extra) -> DistanceScan:
    """Aggregate per-trajectory criterion arrays (already averaged over starts)."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ConfigError("empty ensemble")
    ens = EnsembleSeries.from_samples(np.arange(samples.shape[1]), samples, kind="window-length")
    d, cens = first_crossing(ens.mean, epsilon, strict=kind != "I_AR")
    return DistanceScan(spec.L, float(spec.p), spec.depth, epsilon, kind, ens.mean, ens.std,
                        samples.shape[0], None if degenerate else d, cens, degenerate, dict(extra))


def qecc_trajectory(spec: CircuitSpec, index: int, lmax: int, starts=None) -> tuple[np.ndarray, int]:
    """Window-averaged ``I_{A,R}(l)`` and ``S_Q`` for one purification trajectory."""
    from .stabilizer import QAState

    if spec.family is not Family.PURIFY:
        raise ConfigError("qecc_distance needs a PURIFY spec")
    L = spec.L
    real = realization_for(spec, index)
    st = QAState(2 * L)
    st.apply_ops(real.ops)
    starts = np.arange(L) if starts is None else np.asarray(starts)
    prof = window_profiles(st, L, starts, purify=True, lmax=lmax, wrap=spec.periodic)
    I = prof["I"].astype(float)
    I[I < 0] = np.nan
    sq = st.entropy(np.arange(L))
    return np.nanmean(I, axis=0), sq


def qecc_distance(profiles, spec: CircuitSpec, S_Q=None, epsilon: float = EPSILON) -> DistanceScan:
    """Contiguous QECC distance from per-trajectory ``I_{A,R}(l)`` arrays."""
    degenerate = S_Q is not None and float(np.mean(S_Q)) == 0.0
    return make_scan(spec, "I_AR", profiles, epsilon, degenerate,
                     mean_S_Q=None if S_Q is None else float(np.mean(S_Q)))


def _kernel_deficits(K: np.ndarray, L: int, lmax: int, starts, wrap: bool) -> np.ndarray:
    ls = np.arange(lmax + 1)
    if K.shape[0] == 0:
        r = np.zeros((len(starts), lmax + 1), dtype=np.int64)
    else:
        cols = _stack_cols(transpose_words(K, L))
        r = interval_ranks(cols, np.asarray(starts, dtype=np.int64), lmax, wrap)
    d = (ls - r).astype(float)
    d[r < 0] = np.nan
    return d


def z_error_deficits(V_sites: np.ndarray, L: int, lmax: int, starts=None, wrap: bool = True) -> np.ndarray:
    """``rank H(t) - rank H'(t)`` per start and window length from a site-major evolved identity."""
    starts = np.arange(L) if starts is None else starts
    K = left_kernel(transpose_words(V_sites, L), L)  # rows a with a V = 0
    return _kernel_deficits(K, L, lmax, starts, wrap)


def clc_deficits(V_sites: np.ndarray, L: int, lmax: int, starts=None, wrap: bool = True) -> np.ndarray:
    """Rank lost by zeroing columns ``W`` of the evolved generator matrix."""
    starts = np.arange(L) if starts is None else starts
    K = left_kernel(V_sites.copy(), L)  # vectors b with V b = 0
    return _kernel_deficits(K, L, lmax, starts, wrap)


def z_error_trajectory(spec: CircuitSpec, index: int, lmax: int, starts=None) -> tuple[np.ndarray, int]:
    from .gf2 import rank_words
    from .particles import evolved_identity

    V = evolved_identity(spec, index)
    d = z_error_deficits(V, spec.L, lmax, starts, spec.periodic)
    return np.nanmean(d, axis=0), int(rank_words(V, spec.L))


def z_error_distance(deficits, spec: CircuitSpec, ranks=None, epsilon: float = EPSILON) -> DistanceScan:
    degenerate = ranks is not None and float(np.mean(ranks)) == 0.0
    return make_scan(spec, "rank_deficit_Z", deficits, epsilon, degenerate)


def clc_trajectory(spec: CircuitSpec, index: int, lmax: int, starts=None) -> tuple[np.ndarray, int]:
    from .gf2 import rank_words
    from .particles import evolved_identity

    V = evolved_identity(spec, index)
    k = int(rank_words(V, spec.L))
    d = clc_deficits(V, spec.L, lmax, starts, spec.periodic)
    return np.nanmean(d, axis=0), k


def clc_distance(deficits, spec: CircuitSpec, ranks=None, epsilon: float = EPSILON) -> DistanceScan:
    degenerate = ranks is not None and float(np.mean(ranks)) == 0.0
    return make_scan(spec, "rank_deficit_c", deficits, epsilon, degenerate)


def run_scan(kind: str, spec: CircuitSpec, samples: int, lmax: int, epsilon: float = EPSILON,
             starts=None) -> DistanceScan:
    """Sample ``samples`` trajectories serially and extract one distance."""
    fn = {"I_AR": qecc_trajectory, "rank_deficit_Z": z_error_trajectory, "rank_deficit_c": clc_trajectory}[kind]
    rows, aux = [], []
    for i in range(samples):
        c, a = fn(spec, i, lmax, starts)
        rows.append(c)
        aux.append(a)
    if kind == "I_AR":
        return qecc_distance(rows, spec, aux, epsilon)
    if kind == "rank_deficit_Z":
        return z_error_distance(rows, spec, aux, epsilon)
    return clc_distance(rows, spec, aux, epsilon)


# ---------------------------------------------------------------- U+M / U profile


@dataclass
class UMUProfile:
    L: int
    S_A: np.ndarray
    I_AR: np.ndarray
    neglog2P2: np.ndarray
    neglog2PQ: int
    S_Q: int

    @property
    def L_c(self) -> float:
        return (self.L + self.S_Q) / 2


def um_u_profile(spec: CircuitSpec, index: int = 0) -> UMUProfile:
    """Clifford ``S_A``, ``I_{A,R}`` and particle ``-log2 P_2`` over ``A = [0, L_A)``."""
    from .gf2 import rank_words
    from .particles import evolved_identity
    from .stabilizer import QAState

    if spec.family is not Family.UM_U:
        raise ConfigError("um_u_profile needs a UM_U spec")
    L = spec.L
    real = realization_for(spec, index)
    st = QAState(2 * L)
    st.apply_ops(real.ops)
    prof = window_profiles(st, L, [0], purify=True, lmax=L, wrap=False)
    V = evolved_identity(spec, realization=real)
    rows = transpose_words(V, L)  # row i = evolved e_i
    p2 = interval_ranks(_stack_cols(rows), np.array([0]), L, False)[0]
    return UMUProfile(L, prof["S"][0], prof["I"][0], p2, int(rank_words(V, L)), st.entropy(np.arange(L)))
