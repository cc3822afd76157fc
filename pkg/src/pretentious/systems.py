"""Mode-based multiplicative systems.

Observables are finite Fourier-mode vectors on a finite cyclic group or on the
circle.  A system is described by its generator g_1 (a finitely generated
completely multiplicative function); mode j is multiplied by g_j = g_1^j, so
every mode is an exact eigenfunction of every S_n and all Haar integrals are
coefficient reads.  The only approximation axis is the length N of averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import arith
from .characters import characters_mod
from .errors import PreconditionError, SchemaError
from .functions import FgAddFunction, FgMultFunction
from .kernels import code_histograms, twisted_sums
from .phase import Irrational, Phase, Rational, _check_keys, _is_int, phase_from_json, phase_to_json
from .pretend import (
    distance_is_finite,
    halasz_mean,
    is_aperiodic_fn,
    pretends_character,
)

DEFAULT_SCHEDULE = (10**3, 10**4, 10**5, 10**6, 10**7)


# ---------------------------------------------------------------------------
# spaces and observables


@dataclass(frozen=True)
class ModeSpace:
    """``cyclic`` of order ``size`` (modes 0..size-1) or ``torus`` with band
    ``size`` (modes -size..size)."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("cyclic", "torus"):
            raise PreconditionError(f"unknown mode space kind {self.kind!r}")
        if self.kind == "cyclic" and self.size < 1:
            raise PreconditionError("cyclic space needs order >= 1")
        if self.kind == "torus" and self.size < 0:
            raise PreconditionError("torus band must be >= 0")

    @classmethod
    def cyclic(cls, k: int) -> "ModeSpace":
        return cls("cyclic", k)

    @classmethod
    def torus(cls, band: int) -> "ModeSpace":
        return cls("torus", band)

    def modes(self) -> list[int]:
        if self.kind == "cyclic":
            return list(range(self.size))
        return list(range(-self.size, self.size + 1))

    def nonzero_modes(self) -> list[int]:
        return [j for j in self.modes() if j != 0]

    def contains(self, j: int) -> bool:
        if self.kind == "cyclic":
            return 0 <= j < self.size
        return abs(j) <= self.size

    @property
    def is_trivial(self) -> bool:
        return self.kind == "cyclic" and self.size == 1

    def to_json(self) -> dict:
        if self.kind == "cyclic":
            return {"kind": "cyclic", "order": self.size}
        return {"kind": "torus", "band": self.size}

    @classmethod
    def from_json(cls, doc, path: str = "space") -> "ModeSpace":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise SchemaError(f"{path}: expected an object with a 'kind' field")
        key = {"cyclic": "order", "torus": "band"}.get(doc["kind"])
        if key is None:
            raise SchemaError(f"{path}: unknown space kind {doc['kind']!r}")
        _check_keys(doc, {"kind", key}, path)
        if not _is_int(doc[key]):
            raise SchemaError(f"{path}.{key}: expected an integer")
        try:
            return cls(doc["kind"], doc[key])
        except PreconditionError as exc:
            raise SchemaError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class ModeFunction:
    """F = sum_j c_j * (mode j).  ``coeffs`` is a sorted tuple of (j, c_j)
    with the zero coefficients dropped."""

    space: ModeSpace
    coeffs: tuple = ()

    def __post_init__(self):
        items = self.coeffs.items() if isinstance(self.coeffs, dict) else self.coeffs
        merged: dict[int, complex] = {}
        for j, c in items:
            j = int(j)
            if not self.space.contains(j):
                raise PreconditionError(f"mode {j} is outside the space {self.space}")
            merged[j] = merged.get(j, 0j) + complex(c)
        object.__setattr__(self, "coeffs", tuple(sorted((j, c) for j, c in merged.items() if c != 0)))

    @classmethod
    def mode(cls, space: ModeSpace, j: int, c: complex = 1.0) -> "ModeFunction":
        return cls(space, ((j, c),))

    def as_dict(self) -> dict[int, complex]:
        return dict(self.coeffs)

    def coeff(self, j: int) -> complex:
        return self.as_dict().get(j, 0j)

    @property
    def modes(self) -> list[int]:
        return [j for j, _ in self.coeffs]

    @property
    def mean(self) -> complex:
        """The Haar integral of F (its mode-0 coefficient)."""
        return self.coeff(0)

    @property
    def norm2(self) -> float:
        return math.sqrt(math.fsum(abs(c) ** 2 for _, c in self.coeffs))

    def map(self, fn) -> "ModeFunction":
        return ModeFunction(self.space, tuple((j, fn(j, c)) for j, c in self.coeffs))

    def __add__(self, other: "ModeFunction") -> "ModeFunction":
        if self.space != other.space:
            raise PreconditionError("mode functions live on different spaces")
        return ModeFunction(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "ModeFunction") -> "ModeFunction":
        return self + other.map(lambda j, c: -c)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "coeffs": [{"mode": j, "re": c.real, "im": c.imag} for j, c in self.coeffs],
        }

    @classmethod
    def from_json(cls, doc, path: str = "F") -> "ModeFunction":
        if not isinstance(doc, dict):
            raise SchemaError(f"{path}: expected an object")
        _check_keys(doc, {"space", "coeffs"}, path)
        space = ModeSpace.from_json(doc["space"], f"{path}.space")
        if not isinstance(doc["coeffs"], list):
            raise SchemaError(f"{path}.coeffs: expected a list")
        out = []
        for i, c in enumerate(doc["coeffs"]):
            cpath = f"{path}.coeffs[{i}]"
            if not isinstance(c, dict):
                raise SchemaError(f"{cpath}: expected an object")
            _check_keys(c, {"mode", "re", "im"}, cpath)
            if not _is_int(c["mode"]):
                raise SchemaError(f"{cpath}.mode: expected an integer")
            for key in ("re", "im"):
                if isinstance(c[key], bool) or not isinstance(c[key], (int, float)):
                    raise SchemaError(f"{cpath}.{key}: expected a number")
            out.append((c["mode"], complex(c["re"], c["im"])))
        try:
            return cls(space, tuple(out))
        except PreconditionError as exc:
            raise SchemaError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# systems


def _phase_space(beta: Phase, band: int | None, what: str) -> ModeSpace:
    if isinstance(beta, Rational):
        return ModeSpace.cyclic(beta.den)
    if band is None:
        raise PreconditionError(f"{what} has an irrational phase; declare a mode band")
    return ModeSpace.torus(band)


@dataclass(frozen=True)
class AddSystem:
    """Rotation x -> x + beta; T^n multiplies mode j by e(j n beta)."""

    beta: Phase
    band: int | None = None

    @property
    def is_ergodic(self) -> bool:
        return isinstance(self.beta, Irrational) or self.beta.den > 1

    @property
    def space(self) -> ModeSpace:
        return _phase_space(self.beta, self.band, "additive rotation")

    def eigenphase(self, j: int) -> Phase:
        return self.beta * j

    def to_json(self) -> dict:
        doc = {"beta": phase_to_json(self.beta)}
        if self.band is not None:
            doc["band"] = self.band
        return doc

    @classmethod
    def from_json(cls, doc, path: str = "T") -> "AddSystem":
        if not isinstance(doc, dict) or "beta" not in doc:
            raise SchemaError(f"{path}: expected an object with a 'beta' field")
        _check_keys(doc, {"beta", "band"} if "band" in doc else {"beta"}, path)
        band = doc.get("band")
        if band is not None and (not _is_int(band) or band < 0):
            raise SchemaError(f"{path}.band: expected a nonnegative integer")
        return cls(phase_from_json(doc["beta"], f"{path}.beta"), band)


@dataclass(frozen=True)
class Rotation:
    """Multiplicative rotation x -> f(n) x on the closure of f(N)."""

    f: FgMultFunction
    band: int | None = None

    @property
    def space(self) -> ModeSpace:
        if self.f.is_rational:
            return ModeSpace.cyclic(self.f.order)
        if self.band is None:
            raise PreconditionError("rotation by a function with irrational values needs a mode band")
        return ModeSpace.torus(self.band)

    @property
    def generator(self) -> FgMultFunction:
        return self.f

    def multiplier(self, j: int) -> FgMultFunction:
        return self.f**j

    def to_json(self) -> dict:
        doc = {"type": "rotation", "fn": self.f.to_json()}
        if self.band is not None:
            doc["band"] = self.band
        return doc


@dataclass(frozen=True)
class Skew:
    """The action n -> T^{a(n)} for an additive rotation T and a completely
    additive a; mode j is multiplied by e(j a(n) beta)."""

    base: AddSystem
    a: FgAddFunction

    @property
    def space(self) -> ModeSpace:
        return self.base.space

    @property
    def generator(self) -> FgMultFunction:
        return self.a.exp_phase(self.base.beta)

    def multiplier(self, j: int) -> FgMultFunction:
        return self.a.exp_phase(self.base.beta, j)

    def to_json(self) -> dict:
        return {"type": "skew", "base": self.base.to_json(), "a": self.a.to_json()}


MultSystem = Union[Rotation, Skew]


def system_from_json(doc, path: str = "system") -> MultSystem:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError(f"{path}: expected an object with a 'type' field")
    if doc["type"] == "rotation":
        _check_keys(doc, {"type", "fn", "band"} if "band" in doc else {"type", "fn"}, path)
        band = doc.get("band")
        if band is not None and (not _is_int(band) or band < 0):
            raise SchemaError(f"{path}.band: expected a nonnegative integer")
        return Rotation(FgMultFunction.from_json(doc["fn"], f"{path}.fn"), band)
    if doc["type"] == "skew":
        _check_keys(doc, {"type", "base", "a"}, path)
        return Skew(AddSystem.from_json(doc["base"], f"{path}.base"), FgAddFunction.from_json(doc["a"], f"{path}.a"))
    raise SchemaError(f"{path}: unknown system type {doc['type']!r}")


def _check_on(S, F: ModeFunction) -> None:
    if F.space != S.space:
        raise PreconditionError(f"observable lives on {F.space}, system acts on {S.space}")


# ---------------------------------------------------------------------------
# Koopman action and averages


def koopman_apply(S: MultSystem, n: int, F: ModeFunction) -> ModeFunction:
    """S_n F: mode j picks up the factor g_j(n)."""
    if n < 1:
        raise PreconditionError("koopman_apply needs n >= 1")
    _check_on(S, F)
    return F.map(lambda j, c: c * S.multiplier(j)(n))


class TracePoint(NamedTuple):
    N: int
    average: ModeFunction
    l2_err: float


def _mode_function_distance(A: ModeFunction, B: ModeFunction) -> float:
    return (A - B).norm2


def predicted_limit(S: MultSystem, F: ModeFunction, weight: FgMultFunction | None = None) -> ModeFunction:
    """Limit of (1/N) sum conj(f(n)) S_n F: mode j keeps c_j times the mean of
    conj(f) g_j, which vanishes unless g_j is at finite distance from f."""
    _check_on(S, F)
    fbar = weight.conj() if weight is not None else None

    def limit(j, c):
        g = S.multiplier(j)
        return c * halasz_mean(g if fbar is None else g * fbar)

    return F.map(limit)


def ergodic_average(
    S: MultSystem,
    F: ModeFunction,
    weight: FgMultFunction | None = None,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    workers: int = 1,
) -> list[TracePoint]:
    """(1/N) sum_{n <= N} conj(f(n)) S_n F for every N in the schedule, with its
    L^2 distance to the predicted limit."""
    _check_on(S, F)
    stops = list(schedule)
    fbar = weight.conj() if weight is not None else None
    per_mode = {}
    for j, c in F.coeffs:
        g = S.multiplier(j)
        sums = twisted_sums(g if fbar is None else g * fbar, stops, workers=workers)
        per_mode[j] = [c * s / N for s, N in zip(sums, stops)]
    target = predicted_limit(S, F, weight)
    out = []
    for i, N in enumerate(stops):
        avg = ModeFunction(F.space, tuple((j, v[i]) for j, v in per_mode.items()))
        out.append(TracePoint(N, avg, _mode_function_distance(avg, target)))
    return out


# ---------------------------------------------------------------------------
# projections and distances


def project_pretentious(S: MultSystem, F: ModeFunction, f: FgMultFunction) -> ModeFunction:
    """Keep the modes whose multiplier is at finite distance from f."""
    _check_on(S, F)
    return ModeFunction(F.space, tuple((j, c) for j, c in F.coeffs if distance_is_finite(S.multiplier(j), f).finite))


def _pr_rat_modes(S: MultSystem, F: ModeFunction) -> set[int]:
    return {j for j in F.modes if pretends_character(S.multiplier(j)) is not None}


def project_pr_rat(S: MultSystem, F: ModeFunction) -> ModeFunction:
    _check_on(S, F)
    keep = _pr_rat_modes(S, F)
    return ModeFunction(F.space, tuple((j, c) for j, c in F.coeffs if j in keep))


def project_aperiodic(S: MultSystem, F: ModeFunction) -> ModeFunction:
    _check_on(S, F)
    keep = _pr_rat_modes(S, F)
    return ModeFunction(F.space, tuple((j, c) for j, c in F.coeffs if j not in keep))


def _prime_values(f: FgMultFunction, ps: np.ndarray) -> np.ndarray:
    vals = np.array([v.value() for _, v in f.classes])
    return vals[f.index_at_primes(ps)]


def distance_system(S: MultSystem, F: ModeFunction, f: FgMultFunction, N: int) -> float:
    """(sum_{p <= N} (|F|^2 - Re sum_j |c_j|^2 g_j(p) conj f(p)) / p)^(1/2)."""
    _check_on(S, F)
    if F.norm2 == 0:
        raise PreconditionError("distance between a system and a function needs a nonzero observable")
    if N < 2:
        raise PreconditionError("distance_system needs N >= 2")
    ps = arith.primes_up_to(N)
    corr = np.zeros(len(ps), dtype=np.complex128)
    for j, c in F.coeffs:
        corr += abs(c) ** 2 * _prime_values(S.multiplier(j), ps)
    corr *= np.conj(_prime_values(f, ps))
    terms = (F.norm2**2 - corr.real) / ps
    return math.sqrt(max(math.fsum(terms.tolist()), 0.0))


def wm_average(S: MultSystem, F: ModeFunction, N: int) -> float:
    """(1/N) sum_{n <= N} |<S_n F, F> - |int F|^2|.

    Since g_j = g_1^j, the correlation at n depends only on g_1(n); the sum runs
    over a histogram of g_1's exact phase codes."""
    _check_on(S, F)
    weights = [(j, abs(c) ** 2) for j, c in F.coeffs if j != 0]
    if not weights:
        return 0.0
    (hist,), vals = code_histograms(S.generator, [N])
    corr = np.zeros(len(vals), dtype=np.complex128)
    for j, w in weights:
        corr += w * vals**j
    nz = np.flatnonzero(hist)
    return math.fsum((hist[nz] * np.abs(corr[nz])).tolist()) / N


# ---------------------------------------------------------------------------
# classification and spectra


class Classification(NamedTuple):
    pretentiously_ergodic: bool
    aperiodic: bool
    pretentiously_weak_mixing: bool
    band: int | None


def classify_system(S: MultSystem) -> Classification:
    """Ergodic: no nonzero mode multiplier pretends 1.  Aperiodic: no nonzero
    mode multiplier pretends a character.  Weak mixing: every mode is an exact
    eigenfunction, so only the one-point space qualifies."""
    space = S.space
    one = FgMultFunction.one()
    modes = space.nonzero_modes()
    mults = [S.multiplier(j) for j in modes]
    erg = all(not distance_is_finite(g, one).finite for g in mults)
    aper = all(is_aperiodic_fn(g) for g in mults)
    band = space.size if space.kind == "torus" else None
    return Classification(erg, aper, space.is_trivial, band)


def sigma_rat(T: AddSystem) -> frozenset:
    """Rational eigenvalues of the additive rotation, as fractions in [0, 1)."""
    if isinstance(T.beta, Irrational):
        return frozenset({Fraction(0)})
    q = T.beta.den
    return frozenset(Fraction(j * T.beta.num % q, q) for j in range(q))


def _primitive_fractions(q: int) -> set:
    if q == 1:
        return {Fraction(0)}
    return {Fraction(r, q) for r in range(1, q) if math.gcd(r, q) == 1}


def sigma_pr_rat_tilde(S: MultSystem, band: int | None = None) -> frozenset:
    """{0} together with r/q, (r, q) = 1, whenever some mode multiplier pretends
    a character of conductor q."""
    modes = S.space.modes() if band is None else list(range(-band, band + 1))
    out = {Fraction(0)}
    for j in modes:
        pret = pretends_character(S.multiplier(j))
        if pret is not None:
            out |= _primitive_fractions(pret.character.conductor())
    return frozenset(out)


# ---------------------------------------------------------------------------
# aperiodicity along progressions and twists


class AperiodicityQuantities(NamedTuple):
    N: int
    q: int
    progression: float
    exponential: float
    character: float


def aperiodicity_quantities(
    S: MultSystem, F: ModeFunction, q: int, schedule: Sequence[int] = (10**4, 10**5, 10**6)
) -> list[AperiodicityQuantities]:
    """Three ways of testing that F - int F averages to zero against period-q data:

    * progression: max_r |(1/N) sum_{m <= N} S_{qm+r} F - int F|
    * exponential: max_{0 < r < q} |(1/N) sum_{n <= N} e(rn/q) S_n F0|
    * character:   max_chi |(1/N) sum_{n <= N} chi(n) S_n F0|

    with F0 = F - int F, chi over the characters mod q and norms in L^2.
    """
    _check_on(S, F)
    if q < 1:
        raise PreconditionError("q must be >= 1")
    stops = list(schedule)
    coeffs = [(j, c) for j, c in F.coeffs if j != 0]
    mults = {j: S.multiplier(j) for j, _ in coeffs}

    def l2(per_mode_sums):
        return [
            math.sqrt(math.fsum(abs(c * s[i] / N) ** 2 for (j, c), s in zip(coeffs, per_mode_sums)))
            for i, N in enumerate(stops)
        ]

    prog = [0.0] * len(stops)
    for r in range(q):
        vals = l2([twisted_sums(mults[j], stops, progression=(q, r)) for j, _ in coeffs])
        prog = [max(a, b) for a, b in zip(prog, vals)]
    expo = [0.0] * len(stops)
    for r in range(1, q):
        vals = l2([twisted_sums(mults[j], stops, twist=Rational(r, q)) for j, _ in coeffs])
        expo = [max(a, b) for a, b in zip(expo, vals)]
    char = [0.0] * len(stops)
    for chi in characters_mod(q):
        vals = l2([twisted_sums(mults[j], stops, twist=chi) for j, _ in coeffs])
        char = [max(a, b) for a, b in zip(char, vals)]
    return [AperiodicityQuantities(N, q, a, b, c) for N, a, b, c in zip(stops, prog, expo, char)]
