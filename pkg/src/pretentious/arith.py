"""Integer arithmetic: smallest-prime-factor sieve, factorization, Omega and
Liouville (optionally restricted to a prime set), P-free numbers and
prime-reciprocal sums.

The sieve is built lazily and grows on demand up to a configurable limit
(default 10**8).  Requests beyond the limit raise :class:`ResourceError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Union

import numpy as np

from .errors import CardinalityError, DomainError, PreconditionError, ResourceError

DEFAULT_SIEVE_LIMIT = 10**8
_MIN_BUILD = 1 << 16

_sieve_limit = DEFAULT_SIEVE_LIMIT
_sieve: "Sieve | None" = None


def set_sieve_limit(limit: int) -> None:
    global _sieve_limit
    if limit < 2:
        raise PreconditionError("sieve limit must be at least 2")
    _sieve_limit = int(limit)


def get_sieve_limit() -> int:
    return _sieve_limit


class Sieve:
    """Smallest-prime-factor table over [0, limit]; immutable once built."""

    def __init__(self, limit: int):
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int32)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                seg = spf[p * p :: p]
                seg[seg == 0] = p
        idx = np.flatnonzero(spf == 0)
        spf[idx] = idx
        spf[0] = 0
        spf[1] = 1
        spf.flags.writeable = False
        self.spf = spf
        primes = np.flatnonzero(spf[2:] == np.arange(2, limit + 1)) + 2
        self.primes = primes.astype(np.int64)
        self.primes.flags.writeable = False


def get_sieve(n: int) -> Sieve:
    """Return a sieve covering [0, n], building or growing it if needed."""
    global _sieve
    n = int(n)
    if n > _sieve_limit:
        raise ResourceError(f"sieve request {n} exceeds configured limit {_sieve_limit}")
    if _sieve is None or _sieve.limit < n:
        size = max(n, _MIN_BUILD)
        if _sieve is not None:
            size = max(size, min(2 * _sieve.limit, _sieve_limit))
        _sieve = Sieve(min(size, _sieve_limit))
    return _sieve


def sieve_primes(limit: int) -> list[int]:
    if limit < 2:
        raise DomainError("sieve_primes needs limit >= 2")
    s = get_sieve(limit)
    return s.primes[: np.searchsorted(s.primes, limit, side="right")].tolist()


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    s = get_sieve(limit)
    return s.primes[: np.searchsorted(s.primes, limit, side="right")]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Factorization(NamedTuple):
    n: int
    factors: tuple[tuple[int, int], ...]


def factorize(n: int) -> Factorization:
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    spf = get_sieve(n).spf
    out: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return Factorization(n, tuple(out))


# ---------------------------------------------------------------------------
# prime sets


@dataclass(frozen=True)
class Explicit:
    primes: frozenset

    def __init__(self, primes: Iterable[int] = ()):
        ps = frozenset(int(p) for p in primes)
        bad = sorted(p for p in ps if not is_prime(p))
        if bad:
            raise PreconditionError(f"explicit prime set contains non-primes {bad[:5]}")
        object.__setattr__(self, "primes", ps)

    def contains(self, p: int) -> bool:
        return p in self.primes

    def mask(self, primes: np.ndarray) -> np.ndarray:
        if not self.primes:
            return np.zeros(len(primes), dtype=bool)
        return np.isin(primes, np.fromiter(self.primes, dtype=np.int64))

    def sorted(self) -> list[int]:
        return sorted(self.primes)

    def __repr__(self):
        return f"Explicit({self.sorted()})"


@dataclass(frozen=True)
class Residue:
    """All primes p with p mod ``modulus`` in ``residues`` (residues coprime to the modulus)."""

    modulus: int
    residues: frozenset

    def __init__(self, modulus: int, residues: Iterable[int]):
        if modulus < 1:
            raise PreconditionError(f"residue modulus must be >= 1, got {modulus}")
        rs = frozenset(int(r) for r in residues)
        for r in rs:
            if not 0 <= r < modulus:
                raise PreconditionError(f"residue {r} is not reduced mod {modulus}")
            if math.gcd(r, modulus) != 1:
                raise PreconditionError(f"residue {r} is not coprime to {modulus}")
        if not rs:
            raise PreconditionError("residue class set must be nonempty")
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "residues", rs)

    def contains(self, p: int) -> bool:
        return p % self.modulus in self.residues

    def mask(self, primes: np.ndarray) -> np.ndarray:
        return np.isin(primes % self.modulus, np.fromiter(self.residues, dtype=np.int64))

    def __repr__(self):
        return f"Residue({self.modulus}, {sorted(self.residues)})"


@dataclass(frozen=True)
class Default:
    """Complement marker.  Inside a partition it holds every prime no other class
    claims; used on its own it stands for all primes."""

    def contains(self, p: int) -> bool:
        return True

    def mask(self, primes: np.ndarray) -> np.ndarray:
        return np.ones(len(primes), dtype=bool)

    def __repr__(self):
        return "Default()"


PrimeSet = Union[Explicit, Residue, Default]

ALL_PRIMES = Default()


def big_omega(n: int) -> int:
    return sum(e for _, e in factorize(n).factors)


def big_omega_restricted(n: int, P: PrimeSet) -> int:
    return sum(e for p, e in factorize(n).factors if P.contains(p))


def liouville(n: int) -> int:
    return -1 if big_omega(n) % 2 else 1


def liouville_restricted(n: int, P: PrimeSet) -> int:
    return -1 if big_omega_restricted(n, P) % 2 else 1


def is_P_free(n: int, P: PrimeSet) -> bool:
    return not any(P.contains(p) for p, _ in factorize(n).factors)


def qp_density(P: PrimeSet) -> float:
    """Density of the P-free integers, prod_{p in P} (1 - 1/p), for a finite P."""
    if not isinstance(P, Explicit):
        raise CardinalityError(
            f"{P!r} has divergent prime reciprocal sum; its P-free numbers have density 0"
        )
    return math.prod(1.0 - 1.0 / p for p in sorted(P.primes))


def prime_reciprocal_partial(P: PrimeSet, N: int) -> float:
    if N < 2:
        raise DomainError("prime_reciprocal_partial needs N >= 2")
    if isinstance(P, Explicit):
        return math.fsum(1.0 / p for p in sorted(P.primes) if p <= N)
    ps = primes_up_to(N)
    ps = ps[P.mask(ps)]
    return math.fsum((1.0 / ps).tolist())


def p_free_mask(N: int, P: PrimeSet) -> np.ndarray:
    """Boolean array over [0, N]; entry n is True iff n >= 1 is P-free."""
    ps = primes_up_to(N)
    marks = np.zeros(len(ps), dtype=np.int64)
    marks[P.mask(ps)] = 1
    counts = additive_table(N, ps, marks)
    out = counts == 0
    out[0] = False
    return out


# ---------------------------------------------------------------------------
# completely additive tables


def additive_table(N: int, primes: np.ndarray, values: np.ndarray, dtype=np.int64) -> np.ndarray:
    """Table of the completely additive function with a(p) = values[i] at
    p = primes[i], over n in [0, N] (entries 0 and 1 are 0).

    ``primes`` must list every prime up to N.  Numbers are filled in dyadic
    blocks [2^k, 2^(k+1)); since n / spf(n) <= n / 2 every cofactor lies in an
    earlier block.
    """
    s = get_sieve(N)
    at_prime = np.zeros(N + 1, dtype=dtype)
    at_prime[primes] = values
    spf = s.spf[: N + 1]
    a = np.zeros(N + 1, dtype=dtype)
    lo = 2
    while lo <= N:
        hi = min(2 * lo, N + 1)
        p = spf[lo:hi]
        a[lo:hi] = at_prime[p] + a[np.arange(lo, hi) // p]
        lo = hi
    return a


def omega_table(N: int, P: PrimeSet = ALL_PRIMES) -> np.ndarray:
    ps = primes_up_to(N)
    vals = P.mask(ps).astype(np.int64)
    return additive_table(N, ps, vals, dtype=np.int32)


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


def totient(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).factors:
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)
