"""Classical stand-ins for quantum enumeration and extremum finding.

The simulators always return the exact answer and charge the model cost to a
:class:`CostLedger`:

* enumeration over a space of size N with t solutions: ``ceil(sqrt(N (t+1)))``
* extremum finding over N items: ``ceil(sqrt(N))``

Polylog factors are dropped, so charges are exact integers.  Search spaces are
vectorized: ``SearchSpace.item`` takes an int array of 0-based indices and
returns the corresponding items (an array or a tuple of arrays).
"""
from __future__ import annotations

import math
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping

import numpy as np

ENGINES = ("quantum-sim", "classical", "brute")

CHUNK = 1 << 20

PREDICATE_COST_NOTE = (
    "item access and predicate evaluation inside a search are charged one "
    "step each; polylog factors are dropped"
)


def ceil_sqrt(x: int) -> int:
    x = int(x)
    if x <= 0:
        return 0
    r = math.isqrt(x)
    return r + (r * r < x)


def enumeration_charge(N: int, t: int) -> int:
    return ceil_sqrt(int(N) * (int(t) + 1))


def extremum_charge(N: int) -> int:
    return ceil_sqrt(N)


@dataclass
class PhaseCost:
    classical_steps: int = 0
    quantum_steps: int = 0
    model_multiply_cost: float = 0.0
    sim_evaluations: int = 0
    calls: Counter = field(default_factory=Counter)


class CostLedger:
    """Per-phase step accumulator.  Owns the PRNG driving search orders.

    ``failure_rate`` > 0 makes every found solution independently go missing
    with that probability; it exists only for robustness tests.
    """

    def __init__(self, seed: int = 0, failure_rate: float = 0.0):
        self.seed = int(seed)
        self.failure_rate = float(failure_rate)
        self.rng = np.random.default_rng(self.seed)
        self.phases: dict[str, PhaseCost] = {}
        self._prefix: list[str] = []

    def _phase(self, label) -> PhaseCost:
        full = ".".join(self._prefix + [label]) if label else ".".join(self._prefix)
        full = full or "main"
        if full not in self.phases:
            self.phases[full] = PhaseCost()
        return self.phases[full]

    @contextmanager
    def scope(self, prefix: str):
        self._prefix.append(prefix)
        try:
            yield self
        finally:
            self._prefix.pop()

    def charge_classical(self, phase, steps):
        if steps < 0:
            raise ValueError("ledger never decreases")
        self._phase(phase).classical_steps += int(steps)

    def charge_model_multiply(self, phase, cost):
        if cost < 0:
            raise ValueError("ledger never decreases")
        self._phase(phase).model_multiply_cost += float(cost)

    def record_enumeration(self, phase, N, t, count=1):
        p = self._phase(phase)
        p.quantum_steps += enumeration_charge(N, t) * count
        p.calls[("enumerate", int(N), int(t))] += count

    def record_extremum(self, phase, N, count=1):
        p = self._phase(phase)
        p.quantum_steps += extremum_charge(N) * count
        p.calls[("extremum", int(N), 0)] += count

    def record_evaluations(self, phase, count):
        self._phase(phase).sim_evaluations += int(count)

    def report(self) -> "LedgerReport":
        return ledger_report(self)


@dataclass(frozen=True)
class LedgerReport:
    seed: int
    phases: Mapping[str, Mapping[str, Any]]
    classical_steps: int
    quantum_steps: int
    model_multiply_cost: float
    notes: str = PREDICATE_COST_NOTE

    def total_model_cost(self) -> float:
        return self.quantum_steps + self.model_multiply_cost

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "phases": {k: dict(v, calls=[list(c) for c in v["calls"]])
                       for k, v in self.phases.items()},
            "totals": {
                "classical_steps": self.classical_steps,
                "quantum_steps": self.quantum_steps,
                "model_multiply_cost": self.model_multiply_cost,
            },
            "notes": self.notes,
        }


def ledger_report(ledger: CostLedger) -> LedgerReport:
    phases = {}
    for label in sorted(ledger.phases):
        p = ledger.phases[label]
        calls = tuple(sorted((k, N, t, c) for (k, N, t), c in p.calls.items()))
        phases[label] = MappingProxyType({
            "classical_steps": p.classical_steps,
            "quantum_steps": p.quantum_steps,
            "model_multiply_cost": p.model_multiply_cost,
            "sim_evaluations": p.sim_evaluations,
            "calls": calls,
        })
    return LedgerReport(
        seed=ledger.seed,
        phases=MappingProxyType(phases),
        classical_steps=sum(p["classical_steps"] for p in phases.values()),
        quantum_steps=sum(p["quantum_steps"] for p in phases.values()),
        model_multiply_cost=sum(p["model_multiply_cost"] for p in phases.values()),
    )


@dataclass(frozen=True)
class SearchSpace:
    size: int
    item: Callable[[np.ndarray], Any]

    @classmethod
    def of(cls, seq) -> "SearchSpace":
        arr = np.asarray(seq)
        return cls(len(arr), lambda idx: arr[idx])


def _affine_order(N, rng):
    """A seeded permutation of range(N) as ``z -> (a z + b) mod N``."""
    if N <= 1:
        return 1, 0
    while True:
        a = int(rng.integers(1, N))
        if math.gcd(a, N) == 1:
            break
    b = int(rng.integers(0, N))
    return a, b


def _scan(space, pred, ledger, phase, key, key_size, order, chunk):
    N = int(space.size)
    found = []
    seen = np.zeros(key_size, dtype=bool) if key is not None and key_size is not None else set()
    fail = ledger.failure_rate if ledger is not None else 0.0
    for start in range(0, N, chunk):
        pos = np.arange(start, min(N, start + chunk), dtype=np.int64)
        idx = pos if order is None else (order[0] * pos + order[1]) % N
        items = space.item(idx)
        mask = np.asarray(pred(items), dtype=bool)
        if not mask.any():
            continue
        cand = idx[mask]
        if key is not None:
            keys = np.asarray(key(items), dtype=np.int64)[mask]
            _, first = np.unique(keys, return_index=True)
            first.sort()
            cand, keys = cand[first], keys[first]
            if isinstance(seen, set):
                fresh = np.array([k not in seen for k in keys.tolist()], dtype=bool)
            else:
                fresh = ~seen[keys]
            cand, keys = cand[fresh], keys[fresh]
            if fail > 0 and len(cand):
                keep = ledger.rng.random(len(cand)) >= fail
                cand, keys = cand[keep], keys[keep]
            if isinstance(seen, set):
                seen.update(keys.tolist())
            else:
                seen[keys] = True
        elif fail > 0:
            cand = cand[ledger.rng.random(len(cand)) >= fail]
        found.append(cand)
    if found:
        return np.concatenate(found)
    return np.zeros(0, dtype=np.int64)


def q_enumerate(space: SearchSpace, pred, ledger: CostLedger, phase: str, *,
                key=None, key_size=None, chunk=CHUNK, return_indices=False):
    """Find every solution of ``pred`` over ``space`` (simulated quantum enumeration).

    With ``key`` given, solutions are struck out by key as they are found, so
    at most one solution per key is returned (the first in search order).
    The search order is a seeded permutation drawn from ``ledger``.
    """
    N = int(space.size)
    order = _affine_order(N, ledger.rng)
    idx = _scan(space, pred, ledger, phase, key, key_size, order, chunk)
    ledger.record_enumeration(phase, N, len(idx))
    ledger.record_evaluations(phase, 2 * N)
    return idx if return_indices else space.item(idx)


def c_enumerate(space: SearchSpace, pred, ledger: CostLedger, phase: str, *,
                key=None, key_size=None, chunk=CHUNK, return_indices=False):
    """Classical exhaustive counterpart of :func:`q_enumerate` (natural order)."""
    N = int(space.size)
    saved = ledger.failure_rate
    ledger.failure_rate = 0.0
    try:
        idx = _scan(space, pred, ledger, phase, key, key_size, None, chunk)
    finally:
        ledger.failure_rate = saved
    ledger.charge_classical(phase, N)
    return idx if return_indices else space.item(idx)


def enumerate_solutions(engine, space, pred, ledger, phase, **kw):
    if engine == "quantum-sim":
        return q_enumerate(space, pred, ledger, phase, **kw)
    if engine == "classical":
        return c_enumerate(space, pred, ledger, phase, **kw)
    raise ValueError(f"unknown engine {engine!r}")


def q_extremum(space: SearchSpace, key, mode: str, ledger: CostLedger, phase: str):
    """Index of an item with maximal (or minimal) key; ``None`` when empty.

    Ties go to the smallest index.
    """
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    N = int(space.size)
    ledger.record_extremum(phase, N)
    if N == 0:
        return None
    ledger.record_evaluations(phase, 2 * N)
    keys = np.asarray(key(space.item(np.arange(N))))
    return int(np.argmax(keys) if mode == "max" else np.argmin(keys))


def extremum_batch(keys, sizes, mode, ledger, phase, engine="quantum-sim"):
    """Run one extremum search per row of ``keys``.

    Row ``c`` is a space of ``sizes[c]`` items stored in its first
    ``sizes[c]`` columns; the remaining columns are ignored.  Returns the
    column of the extremum per row (-1 for empty rows).  Each row is charged
    as a separate call.
    """
    keys = np.asarray(keys)
    sizes = np.asarray(sizes, dtype=np.int64)
    if keys.ndim != 2 or keys.shape[0] != len(sizes):
        raise ValueError("shape: keys must be (rows, width) matching sizes")
    width = keys.shape[1]
    valid = np.arange(width)[None, :] < sizes[:, None]
    if mode == "max":
        fill = np.iinfo(np.int64).min if keys.dtype.kind in "iu" else -np.inf
        masked = np.where(valid, keys, fill)
        arg = np.argmax(masked, axis=1) if width else np.zeros(len(sizes), np.int64)
    elif mode == "min":
        fill = np.iinfo(np.int64).max if keys.dtype.kind in "iu" else np.inf
        masked = np.where(valid, keys, fill)
        arg = np.argmin(masked, axis=1) if width else np.zeros(len(sizes), np.int64)
    else:
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    arg = np.where(sizes > 0, arg, -1)
    if engine == "quantum-sim":
        for N, c in Counter(sizes.tolist()).items():
            ledger.record_extremum(phase, N, c)
        ledger.record_evaluations(phase, 2 * int(sizes.sum()))
    elif engine == "classical":
        ledger.charge_classical(phase, int(sizes.sum()))
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return arg
