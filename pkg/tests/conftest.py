import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pretentious.arith import Default, Explicit, Residue
from pretentious.functions import FgAddFunction, FgMultFunction, units
from pretentious.phase import Irrational, Rational

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]
MODULI = [1, 2, 3, 4, 5, 6, 8, 12]

rational_phases = st.builds(Rational, st.integers(0, 11), st.sampled_from([1, 2, 3, 4, 6, 12]))
irrational_phases = st.sampled_from([math.sqrt(2) - 1, (math.sqrt(5) - 1) / 2, math.pi - 3]).map(Irrational)


@st.composite
def fg_functions(draw, irrational: bool = False, moduli=MODULI):
    phase = st.one_of(rational_phases, irrational_phases) if irrational else rational_phases
    m = draw(st.sampled_from(moduli))
    classes = []
    for p in sorted(draw(st.sets(st.sampled_from(SMALL_PRIMES), max_size=3))):
        classes.append((Explicit([p]), draw(phase)))
    if m > 1:
        for r in draw(st.lists(st.sampled_from(units(m)), unique=True)):
            classes.append((Residue(m, [r]), draw(phase)))
    classes.append((Default(), draw(phase)))
    return FgMultFunction(tuple(classes))


@st.composite
def fg_add_functions(draw, moduli=(1, 3, 4)):
    m = draw(st.sampled_from(moduli))
    val = st.integers(0, 3)
    classes = []
    for p in sorted(draw(st.sets(st.sampled_from(SMALL_PRIMES), max_size=2))):
        classes.append((Explicit([p]), draw(val)))
    if m > 1:
        for r in draw(st.lists(st.sampled_from(units(m)), unique=True)):
            classes.append((Residue(m, [r]), draw(val)))
    classes.append((Default(), draw(val)))
    return FgAddFunction(tuple(classes))


def brute_factor(n: int) -> list[tuple[int, int]]:
    out, p = [], 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def brute_eval(f: FgMultFunction, n: int) -> complex:
    """Evaluate f(n) by trial division and the class rules, independent of the sieve."""
    out = 1 + 0j
    for p, e in brute_factor(n):
        ph = None
        for s, v in f.classes:
            if isinstance(s, Explicit) and p in s.primes:
                ph = v
        if ph is None:
            for s, v in f.classes:
                if isinstance(s, Residue) and p % s.modulus in s.residues:
                    ph = v
        if ph is None:
            ph = next(v for s, v in f.classes if isinstance(s, Default))
        out *= ph.value() ** e
    return out


# acceptance reporting: lines are shown in the terminal summary


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(num: int, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE.append(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
