"""Circuit families and quenched realizations.

A realization is an immutable list of layers.  Each time step of the plain
hybrid circuit is::

    CNOT(even bonds)  M  CNOT(odd bonds)  M  CZ(even bonds)  M  CZ(odd bonds)  M

where every ``M`` layer measures each site independently.  By default the
per-layer probability is ``p / 4`` so that ``p`` is the expected number of
composite measurements per site per time step (see :func:`layer_rate`).
CNOT orientation is drawn uniformly per gate.  The purification
families prepend one CZ layer that couples system qubit ``i`` to reference
qubit ``L + i``.

For the Z2-symmetric family a step is::

    CNN(shift 0)  CZ(even)  MM  CNN(shift 1)  CZ(odd)  MM  CNN(shift 2)  MM

``MM`` holds two rows of two-site composite measurements, first on even
bonds then on odd bonds, each present with probability ``p`` (the family
default is the ``per_layer`` convention) and projecting the left or right
site with equal probability.

Compiled form
-------------
Realizations are sampled directly in compiled form: :attr:`Realization.ops`
is an ``(n, 4)`` int64 array of ``(opcode, a, b, c)`` rows, with layer and
step offsets.  Layer objects are rebuilt on demand for inspection.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np

OP_CNOT = 0  # a controls b
OP_CZ = 1
OP_CNN = 2  # a controls b and c
OP_MEAS = 3  # composite measurement of a
OP_MEAS_PAIR = 4  # two-site composite measurement on (a, b); c = 0 projects a, 1 projects b


class ConfigError(ValueError):
    pass


class Family(str, Enum):
    ENTANGLE = "ENTANGLE"
    PURIFY = "PURIFY"
    UM_U = "UM_U"
    Z2 = "Z2"


BOUNDARIES = ("periodic", "open")


@dataclass(frozen=True)
class CircuitSpec:
    family: Family
    L: int
    p: float
    boundary: str = "periodic"
    T: int | None = None
    T1: int | None = None
    T2: int | None = None
    seed: int = 0

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ConfigError(f"unknown circuit family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        if not 0.0 <= float(self.p) <= 1.0:
            raise ConfigError("p must lie in [0, 1]")
        if self.L < 2 or self.L % 2:
            raise ConfigError("L must be an even integer >= 2")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}")
        if fam is Family.UM_U:
            if self.T1 is None or self.T2 is None:
                raise ConfigError("UM_U needs both T1 and T2")
        elif self.T is None:
            raise ConfigError(f"{fam.value} needs T")
        for name in ("T", "T1", "T2"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned value")

    @property
    def depth(self) -> int:
        if self.family is Family.UM_U:
            return self.T1 + self.T2
        return self.T

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def n_qubits(self) -> int:
        """Qubits in the simulated pure state (system plus reference)."""
        return 2 * self.L if self.family in (Family.PURIFY, Family.UM_U) else self.L

    def replace(self, **changes) -> "CircuitSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "L": self.L,
            "p": self.p,
            "boundary": self.boundary,
            "T": self.T,
            "T1": self.T1,
            "T2": self.T2,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CircuitSpec":
        expected = {"family", "L", "p", "boundary", "T", "T1", "T2", "seed"}
        extra = set(d) - expected
        if extra:
            raise ConfigError(f"unknown CircuitSpec fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- layers


def _frozen(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class UnitaryLayer:
    """Disjoint gates of one kind.

    ``sites`` rows are ``(control, target)`` for CNOT, ``(a, b)`` for CZ and
    ``(control, target, target)`` for CNN.
    """

    kind: str
    sites: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sites", _frozen(self.sites).reshape(-1, 3 if self.kind == "CNN" else 2))


@dataclass(frozen=True, eq=False)
class MeasureLayer:
    """Composite measurements; rows are ``(projected site, partner, side)``.

    Single-site measurements have ``partner == -1``.  For two-site
    measurements the pair is stored as ``(left, right)`` with ``side`` 0 when
    the left site is projected and 1 for the right.
    """

    events: np.ndarray
    outcome: int = 0

    def __post_init__(self):
        object.__setattr__(self, "events", _frozen(self.events).reshape(-1, 3))

    @property
    def sites(self) -> np.ndarray:
        """Projected site of every event."""
        ev = self.events
        if ev.size == 0:
            return ev[:, 0]
        pair = ev[:, 1] >= 0
        out = ev[:, 0].copy()
        right = pair & (ev[:, 2] == 1)
        out[right] = ev[right, 1]
        return out

    def __len__(self) -> int:
        return self.events.shape[0]


@dataclass(frozen=True)
class _Slot:
    """One layer of the per-step template with its fixed candidate geometry."""

    kind: str  # CNOT, CZ, CNN, M, MM
    rows: np.ndarray  # (k, 4) candidate op rows


@dataclass(frozen=True, eq=False)
class Realization:
    """A sampled circuit in compiled form.

    ``ops`` is an ``(n, 4)`` array of ``(opcode, a, b, c)`` rows.  Layer
    ``j`` occupies ``ops[layer_offsets[j]:layer_offsets[j+1]]`` and has kind
    ``layer_kinds[j]``.  The first ``n_prefix`` layers precede time step 0;
    afterwards every step has ``layers_per_step`` layers.
    """

    spec: CircuitSpec
    ops: np.ndarray
    layer_offsets: np.ndarray
    layer_kinds: tuple
    n_prefix: int
    layers_per_step: int

    @property
    def T(self) -> int:
        return (len(self.layer_kinds) - self.n_prefix) // self.layers_per_step

    @cached_property
    def step_offsets(self) -> np.ndarray:
        """``ops[step_offsets[t]:step_offsets[t+1]]`` is time step ``t``.

        ``step_offsets[0]`` marks the end of the prefix.
        """
        out = self.layer_offsets[self.n_prefix :: self.layers_per_step].copy()
        out.setflags(write=False)
        return out

    def layer(self, j: int):
        """Layer ``j`` as a :class:`UnitaryLayer` or :class:`MeasureLayer`."""
        kind = self.layer_kinds[j]
        rows = self.ops[self.layer_offsets[j] : self.layer_offsets[j + 1]]
        if kind == "M":
            ev = np.stack([rows[:, 1], np.full(len(rows), -1), np.zeros(len(rows), dtype=rows.dtype)], axis=1)
            return MeasureLayer(ev)
        if kind == "MM":
            return MeasureLayer(rows[:, 1:4])
        if kind == "CNN":
            return UnitaryLayer(kind, rows[:, 1:4])
        return UnitaryLayer(kind, rows[:, 1:3])

    @cached_property
    def layers(self) -> tuple:
        return tuple(self.layer(j) for j in range(len(self.layer_kinds)))

    def step_layers(self, t: int) -> tuple:
        """Layers of time step ``t`` (0-based)."""
        a = self.n_prefix + t * self.layers_per_step
        return tuple(self.layer(j) for j in range(a, a + self.layers_per_step))

    def measured_fraction(self) -> float:
        """Measured events per site per measure layer over the time steps."""
        tot = cnt = 0
        for j in range(self.n_prefix, len(self.layer_kinds)):
            if self.layer_kinds[j] in ("M", "MM"):
                tot += self.spec.L
                cnt += int(self.layer_offsets[j + 1] - self.layer_offsets[j])
        return cnt / tot if tot else 0.0


# ---------------------------------------------------------------- sampling


def rng_stream(seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible generator for trajectory ``index``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def bonds(L: int, parity: int, periodic: bool) -> np.ndarray:
    left = np.arange(parity, L, 2)
    right = left + 1
    keep = right < L if not periodic else np.ones_like(left, dtype=bool)
    return np.stack([left[keep], right[keep] % L], axis=1)


def triples(L: int, shift: int, periodic: bool) -> np.ndarray:
    start = shift + 3 * np.arange(L // 3)
    tri = np.stack([start, start + 1, start + 2], axis=1)
    if periodic:
        return tri % L
    return tri[tri[:, 2] < L]


def _rows(op, cols) -> np.ndarray:
    cols = [np.asarray(c, dtype=np.int64) for c in cols]
    k = len(cols[0])
    out = np.full((k, 4), -1, dtype=np.int64)
    out[:, 0] = op
    for j, c in enumerate(cols):
        out[:, 1 + j] = c
    return out


def _slot(kind: str, L: int, arg: int, periodic: bool) -> _Slot:
    if kind in ("CNOT", "CZ"):
        b = bonds(L, arg, periodic)
        return _Slot(kind, _rows(OP_CNOT if kind == "CNOT" else OP_CZ, (b[:, 0], b[:, 1])))
    if kind == "CNN":
        t = triples(L, arg, periodic)
        return _Slot(kind, _rows(OP_CNN, (t[:, 0], t[:, 1], t[:, 2])))
    if kind == "M":
        s = np.arange(L)
        return _Slot(kind, _rows(OP_MEAS, (s, np.full(L, -1), np.zeros(L))))
    if kind == "MM":
        b = np.concatenate([bonds(L, 0, periodic), bonds(L, 1, periodic)])
        return _Slot(kind, _rows(OP_MEAS_PAIR, (b[:, 0], b[:, 1], np.zeros(len(b)))))
    raise ConfigError(f"unknown layer kind {kind!r}")


def hybrid_template(L: int, periodic: bool) -> tuple[_Slot, ...]:
    return (
        _slot("CNOT", L, 0, periodic),
        _slot("M", L, 0, periodic),
        _slot("CNOT", L, 1, periodic),
        _slot("M", L, 0, periodic),
        _slot("CZ", L, 0, periodic),
        _slot("M", L, 0, periodic),
        _slot("CZ", L, 1, periodic),
        _slot("M", L, 0, periodic),
    )


def z2_template(L: int, periodic: bool) -> tuple[_Slot, ...]:
    return (
        _slot("CNN", L, 0, periodic),
        _slot("CZ", L, 0, periodic),
        _slot("MM", L, 0, periodic),
        _slot("CNN", L, 1, periodic),
        _slot("CZ", L, 1, periodic),
        _slot("MM", L, 0, periodic),
        _slot("CNN", L, 2, periodic),
        _slot("MM", L, 0, periodic),
    )


RATE_CONVENTIONS = ("per_step", "per_layer")


def default_convention(family) -> str:
    """``per_layer`` for the Z2-symmetric family, ``per_step`` otherwise."""
    return "per_layer" if Family(family) is Family.Z2 else "per_step"


def layer_rate(p: float, n_measure_layers: int, convention: str = "per_step") -> float:
    """Probability that a site (or bond) is measured in one measure layer.

    ``per_step`` spreads ``p`` evenly over the measure layers of a time step,
    so ``p`` is the expected number of measurements per site per step.
    ``per_layer`` uses ``p`` in every measure layer.
    """
    if convention == "per_step":
        return p / n_measure_layers
    if convention == "per_layer":
        return p
    raise ConfigError(f"unknown rate convention {convention!r}")


CHUNK_STEPS = 32


def _sample_steps(rng, template, n_steps, q, out_ops, out_counts):
    """Append ``n_steps`` sampled steps of ``template`` at per-layer rate ``q``."""
    done = 0
    while done < n_steps:
        s = min(CHUNK_STEPS, n_steps - done)
        blocks = []
        keeps = []
        for slot in template:
            rows = np.broadcast_to(slot.rows, (s,) + slot.rows.shape).copy()
            k = slot.rows.shape[0]
            if slot.kind == "CNOT":
                flip = rng.random((s, k)) < 0.5
                a = rows[..., 1].copy()
                rows[..., 1] = np.where(flip, rows[..., 2], a)
                rows[..., 2] = np.where(flip, a, rows[..., 2])
                keep = np.ones((s, k), dtype=bool)
            elif slot.kind == "CNN":
                # right control: (r; l, m) instead of (l; m, r)
                right = rng.random((s, k)) < 0.5
                rot = rows[..., [0, 3, 1, 2]]
                rows = np.where(right[..., None], rot, rows)
                keep = np.ones((s, k), dtype=bool)
            elif slot.kind == "CZ":
                keep = np.ones((s, k), dtype=bool)
            elif slot.kind == "M":
                keep = rng.random((s, k)) < q
            else:  # MM
                keep = rng.random((s, k)) < q
                rows[..., 3] = rng.random((s, k)) < 0.5
            blocks.append(rows)
            keeps.append(keep)
        rows = np.concatenate(blocks, axis=1)
        keep = np.concatenate(keeps, axis=1)
        out_ops.append(rows[keep])
        out_counts.append(np.stack([kp.sum(axis=1) for kp in keeps], axis=1).ravel())
        done += s


def sample_realization(spec: CircuitSpec, rng: np.random.Generator, convention: str | None = None) -> Realization:
    """Draw the gates and measurement positions of one trajectory.

    ``convention`` fixes how ``spec.p`` maps to the per-layer measurement
    probability (see :func:`layer_rate`); ``None`` picks the family default
    from :func:`default_convention`.
    """
    fam = Family(spec.family)
    if convention is None:
        convention = default_convention(fam)
    L, p, periodic = spec.L, float(spec.p), spec.periodic
    ops: list = []
    counts: list = []
    kinds: list = []
    n_prefix = 0
    if fam in (Family.PURIFY, Family.UM_U):
        c = coupling_layer(L)
        ops.append(_rows(OP_CZ, (c.sites[:, 0], c.sites[:, 1])))
        counts.append(np.array([L]))
        kinds.append("CZ")
        n_prefix = 1
    if fam is Family.Z2:
        template = z2_template(L, periodic)
        phases = [(spec.T, p)]
    elif fam is Family.UM_U:
        template = hybrid_template(L, periodic)
        phases = [(spec.T1, p), (spec.T2, 0.0)]
    else:
        template = hybrid_template(L, periodic)
        phases = [(spec.T, p)]
    n_meas = sum(s.kind in ("M", "MM") for s in template)
    for steps, prob in phases:
        _sample_steps(rng, template, steps, layer_rate(prob, n_meas, convention), ops, counts)
        kinds += [s.kind for s in template] * steps
    all_ops = np.ascontiguousarray(np.concatenate(ops) if ops else np.zeros((0, 4), dtype=np.int64))
    offsets = np.zeros(len(kinds) + 1, dtype=np.int64)
    if counts:
        np.cumsum(np.concatenate(counts), out=offsets[1:])
    for a in (all_ops, offsets):
        a.setflags(write=False)
    return Realization(spec, all_ops, offsets, tuple(kinds), n_prefix, len(template))


def coupling_layer(L: int) -> UnitaryLayer:
    i = np.arange(L)
    return UnitaryLayer("CZ", np.stack([i, i + L], axis=1))


def realization_for(spec: CircuitSpec, index: int, convention: str | None = None) -> Realization:
    """The realization of trajectory ``index``: ``sample_realization`` on its stream."""
    return sample_realization(spec, rng_stream(spec.seed, index), convention)
