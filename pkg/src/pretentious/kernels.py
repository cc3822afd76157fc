"""Summation kernels for sums of the form

    S(N) = sum_{m=1}^{N} w(m) * f(q*m + r)

with f finitely generated and w an optional twist (a linear phase e(m*theta)
or a Dirichlet character).

When every factor takes finitely many values the sum is evaluated as an
integer histogram over exact phase codes; histograms of disjoint blocks add
exactly, so the result does not depend on block size or worker count.  The
float fallback (irrational twists, huge code spaces) sums fixed-size blocks
with numpy's pairwise sum and merges block partials with ``math.fsum`` in
block order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .functions import FgMultFunction, phase_tables, _e
from .phase import Irrational, Rational

BLOCK = 1 << 18
MAX_CODE_SPACE = 1 << 22


def _check_stops(stops: Sequence[int]) -> list[int]:
    stops = [int(s) for s in stops]
    if not stops or stops[0] < 0 or any(b <= a for a, b in zip(stops, stops[1:])):
        raise PreconditionError(f"schedule must be a strictly increasing list of positive integers, got {stops}")
    return stops


def _twist_coordinates(twist):
    """(radix, weights) so that w(m) = weights[m % radix]; None for irrational twists."""
    if twist is None:
        return 1, np.ones(1, dtype=np.complex128)
    if isinstance(twist, Rational):
        q = twist.den
        return q, _e(np.arange(q) * twist.num / q)
    if isinstance(twist, Irrational):
        return None
    # duck-typed Dirichlet character
    return twist.modulus, twist.residue_values()


def blocked_bincount(codes_fn, lo: int, hi: int, minlength: int, workers: int = 1) -> np.ndarray:
    """Histogram of codes_fn(m_array) over m in [lo, hi), built block by block."""
    edges = list(range(lo, hi, BLOCK)) + [hi]
    spans = list(zip(edges, edges[1:]))

    def one(span):
        a, b = span
        return np.bincount(codes_fn(np.arange(a, b, dtype=np.int64)), minlength=minlength)

    hist = np.zeros(minlength, dtype=np.int64)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(one, spans))
    else:
        parts = map(one, spans)
    for h in parts:
        hist += h
    return hist


def dot_exact_order(hist: np.ndarray, lookup: np.ndarray) -> complex:
    nz = np.flatnonzero(hist)
    h = hist[nz].astype(np.float64)
    v = lookup[nz]
    return complex(math.fsum((h * v.real).tolist()), math.fsum((h * v.imag).tolist()))


def twisted_sums(
    f: FgMultFunction,
    stops: Sequence[int],
    twist=None,
    progression: tuple[int, int] = (1, 0),
    workers: int = 1,
) -> list[complex]:
    """S(N) for every N in ``stops`` (strictly increasing)."""
    stops = _check_stops(stops)
    q, r = progression
    if q < 1 or r < 0:
        raise PreconditionError("progression needs q >= 1 and r >= 0")
    n_max = q * stops[-1] + r
    T = phase_tables(f, max(n_max, 1))
    coords = _twist_coordinates(twist)
    out: list[complex] = []
    if coords is not None and T.code_space * coords[0] <= MAX_CODE_SPACE:
        radix, weights = coords
        space = T.code_space
        lookup = np.outer(weights, T.code_values()).ravel()

        def codes_fn(m):
            return T.codes(q * m + r) + space * (m % radix)

        hist = np.zeros(space * radix, dtype=np.int64)
        prev = 1
        for N in stops:
            if N >= prev:
                hist += blocked_bincount(codes_fn, prev, N + 1, space * radix, workers)
            prev = N + 1
            out.append(dot_exact_order(hist, lookup))
        return out

    re_parts: list[float] = []
    im_parts: list[float] = []
    prev = 1
    for N in stops:
        for a in range(prev, N + 1, BLOCK):
            b = min(a + BLOCK, N + 1)
            m = np.arange(a, b, dtype=np.int64)
            vals = T.values(q * m + r) * _twist_values(twist, m)
            s = vals.sum()
            re_parts.append(float(s.real))
            im_parts.append(float(s.imag))
        prev = N + 1
        out.append(complex(math.fsum(re_parts), math.fsum(im_parts)))
    return out


def _twist_values(twist, m: np.ndarray) -> np.ndarray:
    if twist is None:
        return np.ones(len(m), dtype=np.complex128)
    if isinstance(twist, Rational):
        return _e((m * twist.num % twist.den) / twist.den)
    if isinstance(twist, Irrational):
        # reduce m*alpha mod 1 with a split product to keep precision for large m
        hi, lo = np.divmod(m, 1 << 20)
        t = np.modf(hi * ((twist.alpha * (1 << 20)) % 1.0))[0] + lo * twist.alpha
        return _e(t)
    return twist.residue_values()[m % twist.modulus]


def code_histograms(f: FgMultFunction, stops: Sequence[int], workers: int = 1):
    """Cumulative histograms of f's phase codes over [1, N] for N in stops,
    together with the complex value of each code."""
    stops = _check_stops(stops)
    T = phase_tables(f, max(stops[-1], 1))
    if T.code_space > MAX_CODE_SPACE:
        raise PreconditionError("too many irrational classes to tabulate phase codes")
    hist = np.zeros(T.code_space, dtype=np.int64)
    out = []
    prev = 1
    for N in stops:
        if N >= prev:
            hist += blocked_bincount(T.codes, prev, N + 1, T.code_space, workers)
        prev = N + 1
        out.append(hist.copy())
    return out, T.code_values()
