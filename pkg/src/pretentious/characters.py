"""Dirichlet characters as exact value tables.

A character mod q stores, for every residue a in [0, q), either -1 (a not
coprime to q) or an exponent k with chi(a) = e(k / L), where L = lambda(q) is
the exponent of the unit group (Z/qZ)^*.  Values are exact; complex numbers
only appear at evaluation time.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from . import arith
from .arith import Explicit, Residue
from .errors import PreconditionError, ResourceError, SchemaError
from .functions import FgMultFunction
from .phase import ZERO, Rational, _check_keys, _is_int, unit

DEFAULT_MODULUS_BOUND = 10**4
_modulus_bound = DEFAULT_MODULUS_BOUND


def set_modulus_bound(bound: int) -> None:
    global _modulus_bound
    _modulus_bound = int(bound)


def carmichael(q: int) -> int:
    parts = []
    for p, e in arith.factorize(q).factors:
        if p == 2:
            parts.append(1 if e == 1 else 2 if e == 2 else 2 ** (e - 2))
        else:
            parts.append((p - 1) * p ** (e - 1))
    return arith.lcm(*parts)


class DirichletCharacter:
    __slots__ = ("modulus", "L", "k", "_values")

    def __init__(self, modulus: int, k, L: int | None = None):
        self.modulus = int(modulus)
        self.L = carmichael(self.modulus) if L is None else L
        k = np.asarray(k, dtype=np.int64).copy()
        if k.shape != (self.modulus,):
            raise PreconditionError(f"value table must have {self.modulus} entries")
        coprime = np.array([math.gcd(a, self.modulus) == 1 for a in range(self.modulus)])
        if np.any((k < 0) != ~coprime):
            raise PreconditionError("character must vanish exactly on residues not coprime to the modulus")
        k[coprime] %= self.L
        k.flags.writeable = False
        self.k = k
        self._values = None

    # basic evaluation
    def phase(self, n: int) -> Rational | None:
        k = int(self.k[n % self.modulus])
        return None if k < 0 else Rational(k, self.L)

    def __call__(self, n: int) -> complex:
        k = int(self.k[n % self.modulus])
        return 0j if k < 0 else unit(k, self.L)

    def residue_values(self) -> np.ndarray:
        if self._values is None:
            v = np.array([0j if k < 0 else unit(int(k), self.L) for k in self.k])
            v.flags.writeable = False
            self._values = v
        return self._values

    def table(self, N: int) -> np.ndarray:
        return self.residue_values()[np.arange(N + 1) % self.modulus]

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and np.array_equal(self.k, other.k)
        )

    def __hash__(self):
        return hash((self.modulus, self.k.tobytes()))

    def __repr__(self):
        vals = ", ".join("0" if k < 0 else f"{k}/{self.L}" for k in self.k[: min(self.modulus, 12)])
        return f"DirichletCharacter(mod {self.modulus}: [{vals}{', ...' if self.modulus > 12 else ''}])"

    def conj(self) -> "DirichletCharacter":
        k = np.where(self.k < 0, -1, (-self.k) % self.L)
        return DirichletCharacter(self.modulus, k, self.L)

    @property
    def is_principal(self) -> bool:
        return bool(np.all(self.k <= 0))

    @property
    def order(self) -> int:
        ks = [int(x) for x in self.k if x >= 0]
        return arith.lcm(*(self.L // math.gcd(x, self.L) for x in ks))

    def _units(self) -> np.ndarray:
        return np.flatnonzero(self.k >= 0)

    def conductor(self) -> int:
        units = self._units()
        for d in arith.divisors(self.modulus):
            sel = units[units % d == 1 % d]
            if np.all(self.k[sel] == 0):
                return d
        return self.modulus

    def is_primitive(self) -> bool:
        return self.conductor() == self.modulus

    def primitive(self) -> "DirichletCharacter":
        """The primitive character inducing this one."""
        q0 = self.conductor()
        L0 = carmichael(q0)
        k0 = np.full(q0, -1, dtype=np.int64)
        for a in self._units():
            b = int(a) % q0
            if k0[b] < 0:
                k = int(self.k[a])
                assert (k * L0) % self.L == 0
                k0[b] = k * L0 // self.L
        return DirichletCharacter(q0, k0, L0)

    def to_json(self) -> dict:
        vals = []
        for a in range(1, self.modulus + 1):
            ph = self.phase(a)
            vals.append(None if ph is None else {"num": ph.num, "den": ph.den})
        return {"modulus": self.modulus, "values": vals}

    @classmethod
    def from_json(cls, doc, path: str = "char") -> "DirichletCharacter":
        if not isinstance(doc, dict):
            raise SchemaError(f"{path}: expected an object")
        _check_keys(doc, {"modulus", "values"}, path)
        q = doc["modulus"]
        if not _is_int(q) or q < 1:
            raise SchemaError(f"{path}.modulus: expected a positive integer")
        vals = doc["values"]
        if not isinstance(vals, list) or len(vals) != q:
            raise SchemaError(f"{path}.values: expected a list of {q} entries")
        L = carmichael(q)
        k = np.full(q, -1, dtype=np.int64)
        for i, v in enumerate(vals):
            vpath = f"{path}.values[{i}]"
            if v is None:
                continue
            if not isinstance(v, dict):
                raise SchemaError(f"{vpath}: expected an object or null")
            _check_keys(v, {"num", "den"}, vpath)
            num, den = v["num"], v["den"]
            if not (_is_int(num) and _is_int(den)) or den <= 0:
                raise SchemaError(f"{vpath}: expected integer num and positive den")
            if (num * L) % den:
                raise SchemaError(f"{vpath}: {num}/{den} is not a power of an L-th root of unity (L={L})")
            k[(i + 1) % q] = (num * L // den) % L
        try:
            chi = cls(q, k, L)
        except PreconditionError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        _check_character(chi, path)
        return chi


def _check_character(chi: DirichletCharacter, path: str) -> None:
    q, L, k = chi.modulus, chi.L, chi.k
    if k[1 % q] != 0:
        raise SchemaError(f"{path}: chi(1) must be 1")
    units = chi._units()
    for a in units:
        for b in units:
            if k[(a * b) % q] != (k[a] + k[b]) % L:
                raise SchemaError(f"{path}: not multiplicative at residues {a}, {b}")


# ---------------------------------------------------------------------------
# construction


def _is_generator(g: int, m: int, order: int) -> bool:
    if math.gcd(g, m) != 1:
        return False
    return all(pow(g, order // p, m) != 1 for p, _ in arith.factorize(order).factors) if order > 1 else True


def _component_logs(p: int, e: int) -> list[tuple[int, np.ndarray]]:
    """Cyclic coordinates of (Z/p^e)^*: list of (order n_i, log table over residues mod p^e)."""
    m = p**e
    if p == 2:
        if e == 1:
            return []
        minus = np.full(m, -1, dtype=np.int64)
        five = np.full(m, -1, dtype=np.int64)
        n5 = 1 if e == 2 else 2 ** (e - 2)
        x = 1
        for v in range(n5):
            for u, s in ((0, x), (1, (-x) % m)):
                minus[s] = u
                five[s] = v
            x = x * 5 % m
        if e == 2:
            return [(2, minus)]
        return [(2, minus), (n5, five)]
    phi = (p - 1) * p ** (e - 1)
    g = next(g for g in range(2, m) if _is_generator(g, m, phi))
    log = np.full(m, -1, dtype=np.int64)
    x = 1
    for i in range(phi):
        log[x] = i
        x = x * g % m
    return [(phi, log)]


@lru_cache(maxsize=64)
def characters_mod(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q, principal first, in lexicographic order of
    their exponent vectors on the standard generators."""
    if q < 1:
        raise PreconditionError("modulus must be >= 1")
    if q > _modulus_bound:
        raise ResourceError(f"modulus {q} exceeds the configured bound {_modulus_bound}")
    L = carmichael(q)
    residues = np.arange(q)
    coprime = np.array([math.gcd(a, q) == 1 for a in range(q)])
    coords: list[tuple[int, np.ndarray]] = []
    for p, e in arith.factorize(q).factors:
        for n_i, log in _component_logs(p, e):
            coords.append((n_i, log[residues % p**e]))
    out = []
    for t in itertools.product(*(range(n_i) for n_i, _ in coords)):
        k = np.zeros(q, dtype=np.int64)
        for ti, (n_i, lc) in zip(t, coords):
            k += ti * (L // n_i) * np.where(coprime, lc, 0)
        k = np.where(coprime, k % L, -1)
        out.append(DirichletCharacter(q, k, L))
    return tuple(out)


def principal(q: int) -> DirichletCharacter:
    return characters_mod(q)[0]


def primitive_characters(q: int) -> list[DirichletCharacter]:
    return [chi for chi in characters_mod(q) if chi.is_primitive()]


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor()


def is_primitive(chi: DirichletCharacter) -> bool:
    return chi.is_primitive()


def gauss_sum(chi: DirichletCharacter) -> complex:
    q, L = chi.modulus, chi.L
    re, im = [], []
    for m in range(1, q + 1):
        k = int(chi.k[m % q])
        if k < 0:
            continue
        z = unit(m * L + k * q, q * L)
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def modified_character(chi: DirichletCharacter) -> FgMultFunction:
    """chi with its zeros at the primes dividing the modulus replaced by 1."""
    q = chi.modulus
    if q == 1:
        return FgMultFunction.one()
    groups: dict[int, list[int]] = {}
    for r in range(1, q):
        k = int(chi.k[r])
        if k >= 0:
            groups.setdefault(k, []).append(r)
    classes = [(Explicit([p for p, _ in arith.factorize(q).factors]), ZERO)]
    classes += [(Residue(q, rs), Rational(k, chi.L)) for k, rs in sorted(groups.items())]
    return FgMultFunction(tuple(classes))


# ---------------------------------------------------------------------------
# classical identities


def verify_fourier_expansion(chi: DirichletCharacter, n: int) -> float:
    """|chi(n) - tau(conj chi)^{-1} sum_m conj chi(m) e(mn/q)| for primitive chi."""
    if not chi.is_primitive():
        raise PreconditionError("the Fourier expansion of a character needs a primitive character")
    q, L = chi.modulus, chi.L
    cb = chi.conj()
    re, im = [], []
    for m in range(1, q + 1):
        k = int(cb.k[m % q])
        if k < 0:
            continue
        z = unit(m * n * L + k * q, q * L)
        re.append(z.real)
        im.append(z.imag)
    rhs = complex(math.fsum(re), math.fsum(im)) / gauss_sum(cb)
    return abs(chi(n) - rhs)


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in arith.divisors(n)[:-1]:
        num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    q, r = _poly_divmod(a, b)
    assert not any(r)
    return q


def _poly_divmod(a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [0], a
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return q, a[:db] if db else [0]


def root_sum_equals(counts: dict[int, int], L: int, target: int) -> bool:
    """Exactly decide sum_k counts[k] * zeta_L^k == target (zeta_L a primitive L-th root)."""
    poly = [0] * L
    for k, c in counts.items():
        poly[k % L] += c
    poly[0] -= target
    _, r = _poly_divmod(poly, list(cyclotomic_poly(L)))
    return not any(r)


def verify_orthogonality(q: int, r: int, n: int) -> bool:
    """Exact check of (1/phi(q)) sum_chi conj chi(r) chi(n) == 1_{n = r mod q}, (r, q) = 1."""
    if math.gcd(r, q) != 1:
        raise PreconditionError("orthogonality identity needs (r, q) = 1")
    chars = characters_mod(q)
    L = carmichael(q)
    counts: dict[int, int] = {}
    for chi in chars:
        kn, kr = int(chi.k[n % q]), int(chi.k[r % q])
        if kn < 0:
            continue
        key = (kn - kr) % L
        counts[key] = counts.get(key, 0) + 1
    target = len(chars) if (n - r) % q == 0 else 0
    return root_sum_equals(counts, L, target)


def verify_geometric_indicator(q: int, r: int, n: int) -> bool:
    """Exact check of (1/q) sum_{a=1}^q e(a(n - r)/q) == 1_{n = r mod q}."""
    counts: dict[int, int] = {}
    for a in range(1, q + 1):
        key = a * (n - r) % q
        counts[key] = counts.get(key, 0) + 1
    target = q if (n - r) % q == 0 else 0
    return root_sum_equals(counts, q, target)


def geometric_indicator_residual(q: int, r: int, n: int) -> float:
    zs = [unit(a * (n - r), q) for a in range(1, q + 1)]
    s = complex(math.fsum(z.real for z in zs), math.fsum(z.imag for z in zs)) / q
    return abs(s - (1.0 if (n - r) % q == 0 else 0.0))


def twisted_mean_limit(r: int, q: int, chi: DirichletCharacter) -> complex:
    """lim (1/N) sum_{n<=N} e(rn/q) chi(n) for primitive chi and (r, q) = 1:
    conj chi(r) tau(chi) / q when the conductor equals q, else 0.

    (conj chi(q - r) in place of conj chi(r) gives the limit for the opposite
    twist e(-rn/q); the two differ by chi(-1).)"""
    if math.gcd(r, q) != 1:
        raise PreconditionError(f"twisted mean limit needs (r, q) = 1, got r={r}, q={q}")
    if not chi.is_primitive():
        raise PreconditionError("twisted mean limit needs a primitive character")
    if chi.modulus != q:
        return 0j
    return gauss_sum(chi) * chi.conj()(r % q) / q


def twisted_mean_period(r: int, q: int, chi: DirichletCharacter) -> complex:
    """The same limit computed as an average over one full period lcm(q, modulus)."""
    P = arith.lcm(q, chi.modulus)
    L = chi.L
    re, im = [], []
    for n in range(1, P + 1):
        k = int(chi.k[n % chi.modulus])
        if k < 0:
            continue
        z = unit(r * n * L + k * q, q * L)
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im)) / P


def as_function(chi: DirichletCharacter):
    """Callable view used by the twisted partial means."""
    return chi
