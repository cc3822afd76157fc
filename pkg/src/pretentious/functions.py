"""Finitely generated completely multiplicative / additive functions.

A function is a list of prime classes, each carrying one value.  Explicit
prime sets take precedence over residue classes; the (at most one) default
class collects every prime not claimed by another class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from . import arith
from .arith import ALL_PRIMES, Default, Explicit, PrimeSet, Residue
from .errors import PartitionError, SchemaError
from .phase import (
    HALF,
    ZERO,
    Irrational,
    Phase,
    Rational,
    _check_keys,
    _is_int,
    phase_from_json,
    phase_to_json,
)


def units(m: int) -> list[int]:
    if m == 1:
        return [0]
    return [r for r in range(1, m) if math.gcd(r, m) == 1]


class _Partition:
    """Shared partition logic; subclasses hold ``classes`` = tuple of (PrimeSet, value)."""

    classes: tuple

    def _validate(self) -> None:
        cls = self.classes
        if not cls:
            raise PartitionError("a finitely generated function needs at least one class")
        defaults = [i for i, (s, _) in enumerate(cls) if isinstance(s, Default)]
        if len(defaults) > 1:
            raise PartitionError(f"classes {defaults} are all default-complement classes")
        seen: dict[int, int] = {}
        for i, (s, _) in enumerate(cls):
            if isinstance(s, Explicit):
                for p in s.primes:
                    if p in seen:
                        raise PartitionError(
                            f"classes {seen[p]} and {i} overlap: both contain prime {p}"
                        )
                    seen[p] = i
        res = [(i, s) for i, (s, _) in enumerate(cls) if isinstance(s, Residue)]
        for a in range(len(res)):
            for b in range(a + 1, len(res)):
                (i, s), (j, t) = res[a], res[b]
                g = math.gcd(s.modulus, t.modulus)
                for r1 in s.residues:
                    for r2 in t.residues:
                        if (r1 - r2) % g == 0:
                            raise PartitionError(
                                f"classes {i} and {j} overlap: residue {r1} mod {s.modulus} "
                                f"meets residue {r2} mod {t.modulus}"
                            )
        if not defaults:
            M = self.modulus
            if not res:
                raise PartitionError("explicit classes alone cannot cover all primes; add a default class")
            for r in units(M):
                if self._generic_index(r, M) is None:
                    raise PartitionError(f"primes congruent to {r} mod {M} belong to no class")
            for p, _ in arith.factorize(M).factors:
                if p not in seen:
                    raise PartitionError(f"prime {p} belongs to no class")

    @property
    def modulus(self) -> int:
        return arith.lcm(*(s.modulus for s, _ in self.classes if isinstance(s, Residue)))

    @property
    def explicit_primes(self) -> frozenset:
        out: set[int] = set()
        for s, _ in self.classes:
            if isinstance(s, Explicit):
                out |= s.primes
        return frozenset(out)

    def _default_index(self):
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Default):
                return i
        return None

    def _generic_index(self, r: int, M: int):
        """Class of a prime p = r mod M (M a multiple of every residue modulus)
        that lies in no explicit class."""
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Residue) and (r % s.modulus) in s.residues:
                return i
        return self._default_index()

    def class_index(self, p: int) -> int:
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Explicit) and p in s.primes:
                return i
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Residue) and s.contains(p):
                return i
        i = self._default_index()
        if i is None:
            raise PartitionError(f"prime {p} belongs to no class")
        return i

    def index_at_primes(self, primes: np.ndarray) -> np.ndarray:
        idx = np.full(len(primes), -1, dtype=np.int64)
        d = self._default_index()
        if d is not None:
            idx[:] = d
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Residue):
                idx[s.mask(primes)] = i
        for i, (s, _) in enumerate(self.classes):
            if isinstance(s, Explicit):
                idx[s.mask(primes)] = i
        return idx

    def value_at_prime(self, p: int):
        return self.classes[self.class_index(p)][1]

    def cells(self, other: "_Partition | None" = None) -> Iterator[tuple[PrimeSet, object, object]]:
        """Common refinement with ``other``: yields (cell, value_self, value_other).

        Cells are single explicit primes (all explicit primes of both functions
        plus primes dividing the common modulus) and one residue cell per unit
        mod the common modulus (a single default cell when the modulus is 1).
        """
        other = other if other is not None else self
        M = arith.lcm(self.modulus, other.modulus)
        E = set(self.explicit_primes) | set(other.explicit_primes)
        E |= {p for p, _ in arith.factorize(M).factors}
        for p in sorted(E):
            yield Explicit([p]), self.value_at_prime(p), other.value_at_prime(p)
        for r in units(M):
            i, j = self._generic_index(r, M), other._generic_index(r, M)
            cell = Default() if M == 1 else Residue(M, [r])
            yield cell, self.classes[i][1], other.classes[j][1]


def _regroup(cells: list[tuple[PrimeSet, object]]) -> tuple:
    """Group refinement cells sharing a value back into classes."""
    by_val_explicit: dict = {}
    by_val_res: dict = {}
    default_val = None
    M = None
    for cell, v in cells:
        if isinstance(cell, Explicit):
            by_val_explicit.setdefault(v, set()).update(cell.primes)
        elif isinstance(cell, Residue):
            M = cell.modulus
            by_val_res.setdefault(v, set()).update(cell.residues)
        else:
            default_val = v
    out = [(Explicit(sorted(ps)), v) for v, ps in by_val_explicit.items()]
    out.sort(key=lambda c: min(c[0].primes))
    out += [(Residue(M, sorted(rs)), v) for v, rs in by_val_res.items()]
    if default_val is not None:
        out.append((Default(), default_val))
    return tuple(out)


# ---------------------------------------------------------------------------


def _prime_set_to_json(s: PrimeSet) -> dict:
    if isinstance(s, Explicit):
        return {"type": "explicit", "primes": s.sorted()}
    if isinstance(s, Residue):
        return {"type": "residue", "mod": s.modulus, "residues": sorted(s.residues)}
    return {"type": "default"}


def _prime_set_from_json(doc, path: str) -> PrimeSet:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError(f"{path}: expected an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "explicit":
            _check_keys(doc, {"type", "primes"}, path)
            if not isinstance(doc["primes"], list) or not all(_is_int(p) for p in doc["primes"]):
                raise SchemaError(f"{path}.primes: expected a list of integers")
            return Explicit(doc["primes"])
        if kind == "residue":
            _check_keys(doc, {"type", "mod", "residues"}, path)
            if not _is_int(doc["mod"]) or not isinstance(doc["residues"], list) or not all(
                _is_int(r) for r in doc["residues"]
            ):
                raise SchemaError(f"{path}: residue class needs integer 'mod' and 'residues'")
            return Residue(doc["mod"], doc["residues"])
        if kind == "default":
            _check_keys(doc, {"type"}, path)
            return Default()
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    raise SchemaError(f"{path}: unknown prime set type {kind!r}")


def _classes_from_json(doc, value_key: str, parse_value, path: str) -> tuple:
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object")
    _check_keys(doc, {"classes"}, path)
    if not isinstance(doc["classes"], list):
        raise SchemaError(f"{path}.classes: expected a list")
    out = []
    for i, c in enumerate(doc["classes"]):
        cpath = f"{path}.classes[{i}]"
        if not isinstance(c, dict):
            raise SchemaError(f"{cpath}: expected an object")
        _check_keys(c, {"spec", value_key}, cpath)
        out.append((_prime_set_from_json(c["spec"], cpath + ".spec"), parse_value(c[value_key], f"{cpath}.{value_key}")))
    return tuple(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FgMultFunction(_Partition):
    """Completely multiplicative f with f(p) = e(phase of p's class)."""

    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple((s, v) for s, v in self.classes))
        for s, v in self.classes:
            if not isinstance(v, (Rational, Irrational)):
                raise PartitionError(f"class value {v!r} is not a phase")
        self._validate()

    # constructors
    @classmethod
    def one(cls) -> "FgMultFunction":
        return cls(((Default(), ZERO),))

    @classmethod
    def liouville(cls, P: PrimeSet = ALL_PRIMES) -> "FgMultFunction":
        if isinstance(P, Default):
            return cls(((Default(), HALF),))
        return cls(((P, HALF), (Default(), ZERO)))

    @classmethod
    def from_prime_values(cls, values: dict, default: Phase = ZERO) -> "FgMultFunction":
        """Explicit primes with given phases, everything else ``default``."""
        return cls(tuple((Explicit([p]), v) for p, v in sorted(values.items())) + ((Default(), default),))

    # evaluation
    def prime_phase(self, p: int) -> Phase:
        return self.value_at_prime(p)

    def phase_at(self, n: int) -> Phase:
        acc: Phase = ZERO
        for p, e in arith.factorize(n).factors:
            acc = acc + self.prime_phase(p) * e
        return acc

    def __call__(self, n: int) -> complex:
        return self.phase_at(n).value()

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, Rational) for _, v in self.classes)

    @property
    def order(self) -> int | None:
        """Order of the cyclic group generated by the prime values, if finite."""
        if not self.is_rational:
            return None
        return arith.lcm(*(v.den for _, v in self.classes))

    # algebra
    def conj(self) -> "FgMultFunction":
        return FgMultFunction(tuple((s, -v) for s, v in self.classes))

    def __pow__(self, j: int) -> "FgMultFunction":
        return FgMultFunction(tuple((s, v * j) for s, v in self.classes))

    def __mul__(self, other: "FgMultFunction") -> "FgMultFunction":
        if not isinstance(other, FgMultFunction):
            return NotImplemented
        return FgMultFunction(_regroup([(c, a + b) for c, a, b in self.cells(other)]))

    # tables
    def table(self, N: int) -> np.ndarray:
        """Complex values over n in [0, N] (entry 0 is 0)."""
        out = phase_tables(self, N).values(np.arange(N + 1))
        out[0] = 0.0
        return out

    # serialization
    def to_json(self) -> dict:
        return {"classes": [{"spec": _prime_set_to_json(s), "phase": phase_to_json(v)} for s, v in self.classes]}

    @classmethod
    def from_json(cls, doc, path: str = "fn") -> "FgMultFunction":
        return cls(_classes_from_json(doc, "phase", phase_from_json, path))


@dataclass(frozen=True)
class FgAddFunction(_Partition):
    """Completely additive a: N -> Z with a(p) = value of p's class."""

    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple((s, v) for s, v in self.classes))
        for s, v in self.classes:
            if not _is_int(v):
                raise PartitionError(f"class value {v!r} is not an integer")
        self._validate()

    @classmethod
    def big_omega(cls, P: PrimeSet = ALL_PRIMES) -> "FgAddFunction":
        if isinstance(P, Default):
            return cls(((Default(), 1),))
        return cls(((P, 1), (Default(), 0)))

    @classmethod
    def zero(cls) -> "FgAddFunction":
        return cls(((Default(), 0),))

    def __call__(self, n: int) -> int:
        return sum(e * self.value_at_prime(p) for p, e in arith.factorize(n).factors)

    def table(self, N: int) -> np.ndarray:
        ps = arith.primes_up_to(N)
        vals = np.array([v for _, v in self.classes], dtype=np.int64)
        return arith.additive_table(N, ps, vals[self.index_at_primes(ps)])

    def exp_phase(self, beta: Phase, j: int = 1) -> FgMultFunction:
        """The multiplicative function n -> e(j * a(n) * beta)."""
        return FgMultFunction(tuple((s, beta * (j * v)) for s, v in self.classes))

    def to_json(self) -> dict:
        return {"classes": [{"spec": _prime_set_to_json(s), "value": v} for s, v in self.classes]}

    @classmethod
    def from_json(cls, doc, path: str = "fn") -> "FgAddFunction":
        def parse(v, p):
            if not _is_int(v):
                raise SchemaError(f"{p}: expected an integer")
            return v

        return cls(_classes_from_json(doc, "value", parse, path))


def eval_mult(f: FgMultFunction, n: int) -> complex:
    return f(n)


def eval_add(a: FgAddFunction, n: int) -> int:
    return a(n)


FgFunction = Union[FgMultFunction, FgAddFunction]


# ---------------------------------------------------------------------------
# phase tables


class PhaseTable:
    """Exact phase data of f over [0, N]: f(n) = e(k[n]/L + sum_c cnt_c[n] * alpha_c)."""

    def __init__(self, f: FgMultFunction, N: int):
        self.N = N
        ps = arith.primes_up_to(N)
        idx = f.index_at_primes(ps)
        rat = [v for _, v in f.classes if isinstance(v, Rational)]
        self.L = arith.lcm(*(v.den for v in rat)) if rat else 1
        kv = np.array(
            [v.num * (self.L // v.den) if isinstance(v, Rational) else 0 for _, v in f.classes],
            dtype=np.int64,
        )
        k = arith.additive_table(N, ps, kv[idx]) if len(ps) else np.zeros(N + 1, dtype=np.int64)
        self.k = (k % self.L).astype(np.int64)
        alphas: dict[float, list[int]] = {}
        for i, (_, v) in enumerate(f.classes):
            if isinstance(v, Irrational):
                alphas.setdefault(v.alpha, []).append(i)
        self.alphas = list(alphas)
        self.counts = []
        for a in self.alphas:
            mark = np.isin(idx, alphas[a]).astype(np.int64)
            self.counts.append(arith.additive_table(N, ps, mark, dtype=np.int32))
        self.radix = [int(c.max()) + 1 if len(c) else 1 for c in self.counts]

    @property
    def code_space(self) -> int:
        return self.L * math.prod(self.radix)

    def codes(self, pos) -> np.ndarray:
        code = self.k[pos].copy()
        scale = self.L
        for c, r in zip(self.counts, self.radix):
            code += scale * c[pos].astype(np.int64)
            scale *= r
        return code

    def code_values(self) -> np.ndarray:
        """Complex value of every code (for code spaces small enough to tabulate)."""
        turns = np.arange(self.L, dtype=np.float64) / self.L
        for a, r in zip(self.alphas, self.radix):
            turns = (turns[None, :] + (np.arange(r)[:, None] * a)).ravel()
        return _e(turns)

    def values(self, pos) -> np.ndarray:
        turns = self.k[pos] / self.L
        for a, c in zip(self.alphas, self.counts):
            turns = turns + c[pos] * a
        return _e(turns)


def _e(turns: np.ndarray) -> np.ndarray:
    t = np.asarray(turns, dtype=np.float64)
    t = t - np.floor(t)
    return np.exp(2j * np.pi * t)


@lru_cache(maxsize=6)
def _phase_tables_cached(f: FgMultFunction, N: int) -> PhaseTable:
    return PhaseTable(f, N)


def phase_tables(f: FgMultFunction, N: int) -> PhaseTable:
    return _phase_tables_cached(f, int(N))
