"""Joint ergodicity of an additive rotation with a multiplicative system:
the spectral decision, joint correlation averages, recurrence averages and
counts of {m, m+n, m+a(n)} configurations in integer sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import PreconditionError, SchemaError
from .functions import FgAddFunction
from .kernels import twisted_sums
from .phase import Rational, _check_keys, _is_int
from .systems import (
    DEFAULT_SCHEDULE,
    AddSystem,
    ModeFunction,
    MultSystem,
    classify_system,
    sigma_pr_rat_tilde,
    sigma_rat,
)


class JointVerdict(NamedTuple):
    jointly_ergodic: bool
    sigma_rat_T: frozenset
    sigma_tilde_S: frozenset
    intersection: frozenset


def decide_joint(T: AddSystem, S: MultSystem) -> JointVerdict:
    """T and S are jointly ergodic iff their rational spectra meet only at 0.
    Requires T ergodic and S pretentiously ergodic."""
    if not T.is_ergodic:
        raise PreconditionError("the additive rotation must be ergodic (beta irrational, or r/q with q > 1)")
    if not classify_system(S).pretentiously_ergodic:
        raise PreconditionError("the multiplicative system must be pretentiously ergodic")
    a, b = sigma_rat(T), sigma_pr_rat_tilde(S)
    inter = a & b
    return JointVerdict(inter == {Fraction(0)}, a, b, inter)


class JointTracePoint(NamedTuple):
    N: int
    error: float


def joint_average(
    T: AddSystem,
    S: MultSystem,
    F: ModeFunction,
    G: ModeFunction,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    workers: int = 1,
) -> list[JointTracePoint]:
    """|| (1/N) sum_{n <= N} T^n F * S_n G - int F int G ||_2 along the schedule.

    On the product space mode (j, l) carries c_j d_l (1/N) sum e(j n beta) g_l(n).
    """
    if F.space != T.space:
        raise PreconditionError(f"F lives on {F.space}, T acts on {T.space}")
    if G.space != S.space:
        raise PreconditionError(f"G lives on {G.space}, S acts on {S.space}")
    stops = list(schedule)
    sq = [[] for _ in stops]
    for j, c in F.coeffs:
        twist = T.beta * j
        twist = None if twist == Rational(0) else twist
        for l, d in G.coeffs:
            sums = twisted_sums(S.multiplier(l), stops, twist=twist, workers=workers)
            for i, (s, N) in enumerate(zip(sums, stops)):
                v = c * d * s / N
                if j == 0 and l == 0:
                    v -= c * d
                sq[i].append(abs(v) ** 2)
    return [JointTracePoint(N, math.sqrt(math.fsum(x))) for N, x in zip(stops, sq)]


# ---------------------------------------------------------------------------
# multiple recurrence


def _shift_of(T: AddSystem, k: int) -> int:
    if not isinstance(T.beta, Rational) or k % T.beta.den:
        raise PreconditionError(f"rotation {T.beta} does not act on Z_{k}")
    return T.beta.num * (k // T.beta.den)


def recurrence_average(
    T1: AddSystem,
    a: FgAddFunction,
    A: Iterable[int],
    k: int,
    N: int,
    T2: AddSystem | None = None,
) -> Fraction:
    """(1/N) sum_{n <= N} mu(A cap T1^{-n} A cap T2^{-a(n)} A) on Z_k with the
    uniform measure, exactly.  T2 defaults to T1."""
    A = sorted({int(x) % k for x in A})
    if not A:
        raise PreconditionError("recurrence needs a nonempty set A")
    if N < 1:
        raise PreconditionError("recurrence_average needs N >= 1")
    s1 = _shift_of(T1, k)
    s2 = _shift_of(T2 if T2 is not None else T1, k)
    ind = np.zeros(k, dtype=np.int64)
    ind[A] = 1
    # W[s, t] = |A cap (A - s) cap (A - t)|
    shifted = np.stack([np.roll(ind, -s) for s in range(k)])
    W = np.einsum("i,si,ti->st", ind, shifted, shifted)
    n = np.arange(1, N + 1, dtype=np.int64)
    s = n * s1 % k
    t = a.table(N)[1:] * s2 % k
    hist = np.bincount(s * k + t, minlength=k * k)
    return Fraction(int(hist @ W.ravel()), k * N)


# ---------------------------------------------------------------------------
# configurations in integer sets


@dataclass(frozen=True)
class IntegerSetSpec:
    """A set E of positive integers known up to ``horizon``.

    kinds:
      * ``residue``:   n in E iff n mod modulus lies in residues
      * ``bitmask``:   n in E iff bits[n - 1] (bits has length horizon)
      * ``threshold``: n in E iff frac(n * theta) < delta
    """

    kind: str
    horizon: int
    modulus: int = 1
    residues: tuple = ()
    bits: tuple = ()
    theta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.horizon < 1:
            raise PreconditionError("horizon must be >= 1")
        if self.kind == "residue":
            if self.modulus < 1 or any(not 0 <= r < self.modulus for r in self.residues):
                raise PreconditionError("residues must be reduced mod a positive modulus")
        elif self.kind == "bitmask":
            if len(self.bits) != self.horizon:
                raise PreconditionError("bitmask length must equal the horizon")
        elif self.kind == "threshold":
            if not 0.0 <= self.delta <= 1.0:
                raise PreconditionError("threshold delta must lie in [0, 1]")
        else:
            raise PreconditionError(f"unknown integer set kind {self.kind!r}")

    @classmethod
    def residue_union(cls, modulus: int, residues: Iterable[int], horizon: int) -> "IntegerSetSpec":
        return cls("residue", horizon, modulus=modulus, residues=tuple(sorted(set(residues))))

    @classmethod
    def bitmask(cls, bits: Sequence[bool]) -> "IntegerSetSpec":
        return cls("bitmask", len(bits), bits=tuple(bool(b) for b in bits))

    @classmethod
    def threshold(cls, theta: float, delta: float, horizon: int) -> "IntegerSetSpec":
        return cls("threshold", horizon, theta=float(theta), delta=float(delta))

    def mask(self, upto: int) -> np.ndarray:
        """Membership over [0, upto]; 0 and points beyond the horizon are non-members."""
        out = np.zeros(upto + 1, dtype=bool)
        top = min(upto, self.horizon)
        n = np.arange(1, top + 1, dtype=np.int64)
        if self.kind == "residue":
            member = np.isin(n % self.modulus, np.array(self.residues, dtype=np.int64))
        elif self.kind == "bitmask":
            member = np.array(self.bits[:top], dtype=bool)
        else:
            member = np.modf(n * self.theta)[0] < self.delta
        out[1 : top + 1] = member
        return out

    def contains(self, n: int) -> bool:
        return 1 <= n <= self.horizon and bool(self.mask(n)[n])

    def upper_density(self) -> float:
        """Largest relative density over the dyadic prefixes [1, 2^i] in the
        upper half of the scale range up to the horizon (the horizon itself
        included)."""
        counts = np.cumsum(self.mask(self.horizon))
        stops = [2**i for i in range(self.horizon.bit_length()) if 2**i < self.horizon] + [self.horizon]
        tail = stops[len(stops) // 2 :]
        return float(max(counts[s] / s for s in tail))

    def to_json(self) -> dict:
        if self.kind == "residue":
            return {"kind": "residue", "horizon": self.horizon, "modulus": self.modulus, "residues": list(self.residues)}
        if self.kind == "bitmask":
            return {"kind": "bitmask", "bits": "".join("1" if b else "0" for b in self.bits)}
        return {"kind": "threshold", "horizon": self.horizon, "theta": self.theta, "delta": self.delta}

    @classmethod
    def from_json(cls, doc, path: str = "E") -> "IntegerSetSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise SchemaError(f"{path}: expected an object with a 'kind' field")
        kind = doc["kind"]
        try:
            if kind == "residue":
                _check_keys(doc, {"kind", "horizon", "modulus", "residues"}, path)
                if not (_is_int(doc["horizon"]) and _is_int(doc["modulus"])):
                    raise SchemaError(f"{path}: horizon and modulus must be integers")
                if not isinstance(doc["residues"], list) or not all(_is_int(r) for r in doc["residues"]):
                    raise SchemaError(f"{path}.residues: expected a list of integers")
                return cls.residue_union(doc["modulus"], doc["residues"], doc["horizon"])
            if kind == "bitmask":
                _check_keys(doc, {"kind", "bits"}, path)
                bits = doc["bits"]
                if not isinstance(bits, str) or set(bits) - {"0", "1"}:
                    raise SchemaError(f"{path}.bits: expected a string of 0/1 characters")
                return cls.bitmask([c == "1" for c in bits])
            if kind == "threshold":
                _check_keys(doc, {"kind", "horizon", "theta", "delta"}, path)
                if not _is_int(doc["horizon"]):
                    raise SchemaError(f"{path}.horizon: expected an integer")
                for key in ("theta", "delta"):
                    if isinstance(doc[key], bool) or not isinstance(doc[key], (int, float)):
                        raise SchemaError(f"{path}.{key}: expected a number")
                return cls.threshold(doc["theta"], doc["delta"], doc["horizon"])
        except PreconditionError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"{path}: {exc}") from exc
        raise SchemaError(f"{path}: unknown integer set kind {kind!r}")


class ConfigCount(NamedTuple):
    N: int
    M: int
    count: int
    density: float
    delta_cubed: float


def count_configurations(
    E: IntegerSetSpec, N: int, M: int, a: FgAddFunction | None = None
) -> ConfigCount:
    """|{(n, m) in [1,N] x [1,M] : m, m+n, m+a(n) in E}| / (NM); a defaults to Omega."""
    if not 1 <= N <= M:
        raise PreconditionError("count_configurations needs 1 <= N <= M")
    a = a if a is not None else FgAddFunction.big_omega()
    av = a.table(N)
    if av[1:].min(initial=0) < 0:
        raise PreconditionError("the additive function must be nonnegative on [1, N]")
    top = M + max(N, int(av.max(initial=0)))
    e = E.mask(top)
    base = e[1 : M + 1]
    count = 0
    for n in range(1, N + 1):
        w = int(av[n])
        count += int(np.count_nonzero(base & e[1 + n : M + 1 + n] & e[1 + w : M + 1 + w]))
    return ConfigCount(N, M, count, count / (N * M), E.upper_density() ** 3)


def configuration_sweep(E: IntegerSetSpec, Ns: Sequence[int], Ms: Sequence[int]) -> list[ConfigCount]:
    """Counts over the grid, N in the outer loop and M in the inner loop."""
    return [count_configurations(E, N, M) for N in Ns for M in Ms if M >= N]
