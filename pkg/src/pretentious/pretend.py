"""Pretentious distance, Halasz mean values and character pretension for
finitely generated completely multiplicative functions."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import arith
from .arith import Default, Explicit, PrimeSet, Residue
from .characters import DirichletCharacter, characters_mod, modified_character
from .errors import DomainError
from .functions import FgMultFunction, eval_add, eval_mult
from .kernels import twisted_sums
from .phase import Irrational, Rational, phases_equal

__all__ = [
    "eval_mult",
    "eval_add",
    "distance_partial",
    "distance_is_finite",
    "FiniteWitness",
    "halasz_mean",
    "halasz_mean_exact",
    "partial_mean",
    "partial_means",
    "partial_mean_twisted",
    "partial_mean_character",
    "pretends_character",
    "is_aperiodic_fn",
]


def distance_partial(f: FgMultFunction, g: FgMultFunction, N: int) -> float:
    """D(f, g; N) = (sum_{p <= N} (1 - Re f(p) conj g(p)) / p)^(1/2)."""
    if N < 2:
        raise DomainError("distance_partial needs N >= 2")
    ps = arith.primes_up_to(N)
    # 1 - cos(2 pi d) = 2 sin(pi d)^2 from the exact phase difference d, so
    # equal phases contribute exactly 0
    cost = np.array([[2 * math.sin(math.pi * (a - b).turns) ** 2 for _, b in g.classes] for _, a in f.classes])
    terms = cost[f.index_at_primes(ps), g.index_at_primes(ps)] / ps
    return math.sqrt(math.fsum(terms.tolist()))


class FiniteWitness(NamedTuple):
    """``finite`` is the verdict.  When finite, ``witness`` is the explicit set
    of primes where f and g differ; otherwise it is a many-prime cell on which
    they differ (so the reciprocal sum over it diverges)."""

    finite: bool
    witness: PrimeSet


def distance_is_finite(f: FgMultFunction, g: FgMultFunction) -> FiniteWitness:
    exceptional = []
    for cell, a, b in f.cells(g):
        if phases_equal(a, b):
            continue
        if isinstance(cell, Explicit):
            exceptional.extend(cell.primes)
        else:
            return FiniteWitness(False, cell)
    return FiniteWitness(True, Explicit(exceptional))


def halasz_mean(f: FgMultFunction) -> complex:
    """Mean value of f: 0 when f is far from 1, else the finite Euler product
    prod_{p in W} (1 - 1/p)(1 - f(p)/p)^(-1) over the primes W where f(p) != 1."""
    fin, W = distance_is_finite(f, FgMultFunction.one())
    if not fin:
        return 0j
    exact = halasz_mean_exact(f)
    if exact is not None:
        return complex(exact)
    out = 1 + 0j
    for p in W.sorted():
        out *= (1 - 1 / p) / (1 - f(p) / p)
    return out


def halasz_mean_exact(f: FgMultFunction) -> Fraction | None:
    """The mean value as an exact fraction when every exceptional prime value is +-1."""
    fin, W = distance_is_finite(f, FgMultFunction.one())
    if not fin:
        return Fraction(0)
    out = Fraction(1)
    for p in W.sorted():
        ph = f.prime_phase(p)
        if not (isinstance(ph, Rational) and ph.den <= 2):
            return None
        s = 1 if ph.num == 0 else -1
        out *= Fraction(p - 1, p) / (1 - Fraction(s, p))
    return out


def partial_means(f: FgMultFunction, stops: Sequence[int], twist=None, workers: int = 1) -> list[complex]:
    """(1/N) sum_{n <= N} w(n) f(n) for every N in stops."""
    sums = twisted_sums(f, stops, twist=twist, workers=workers)
    return [s / N for s, N in zip(sums, stops)]


def partial_mean(f: FgMultFunction, N: int, workers: int = 1) -> complex:
    if N < 1:
        raise DomainError("partial_mean needs N >= 1")
    return partial_means(f, [N], workers=workers)[0]


def partial_mean_twisted(f: FgMultFunction, N: int, r: int, q: int, workers: int = 1) -> complex:
    """(1/N) sum_{n <= N} e(rn/q) f(n)."""
    if N < 1 or q < 1:
        raise DomainError("partial_mean_twisted needs N >= 1 and q >= 1")
    return partial_means(f, [N], twist=Rational(r, q), workers=workers)[0]


def partial_mean_character(f: FgMultFunction, chi: DirichletCharacter, N: int, workers: int = 1) -> complex:
    """(1/N) sum_{n <= N} chi(n) f(n)."""
    if N < 1:
        raise DomainError("partial_mean_character needs N >= 1")
    return partial_means(f, [N], twist=chi, workers=workers)[0]


class Pretension(NamedTuple):
    character: DirichletCharacter
    exceptional: Explicit


def pretends_character(f: FgMultFunction) -> Pretension | None:
    """A character chi with D(f, chi) finite, with the explicit primes where
    f(p) differs from chi*(p); None if f pretends no character.

    Any such chi is constant on primes in each residue class mod M (the lcm of
    f's residue moduli), so its conductor divides M and searching mod M suffices.
    """
    M = f.modulus
    cells = [(cell, v) for cell, v, _ in f.cells() if not isinstance(cell, Explicit)]
    if any(isinstance(v, Irrational) for _, v in cells):
        return None
    for chi in characters_mod(M):
        if all(phases_equal(chi.phase(_cell_residue(cell)), v) for cell, v in cells):
            fin, W = distance_is_finite(f, modified_character(chi))
            assert fin
            return Pretension(chi, W)
    return None


def _cell_residue(cell: PrimeSet) -> int:
    if isinstance(cell, Residue):
        (r,) = cell.residues
        return r
    assert isinstance(cell, Default)
    return 1


def is_aperiodic_fn(f: FgMultFunction) -> bool:
    return pretends_character(f) is None

