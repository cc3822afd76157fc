import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pretentious import arith
from pretentious import characters as C
from pretentious.arith import Explicit, Residue
from pretentious.errors import PreconditionError, ResourceError, SchemaError
from pretentious.phase import HALF, ZERO

CHI3 = C.characters_mod(3)[1]
CHI4 = C.characters_mod(4)[1]


def induced_from_smaller(chi, d):
    """Is chi induced by some character mod d?  Checked against every character mod d."""
    q = chi.modulus
    coprime = [n for n in range(1, q + 1) if math.gcd(n, q) == 1]
    return any(all(abs(chi(n) - psi(n)) < 1e-12 for n in coprime) for psi in C.characters_mod(d))


@pytest.mark.parametrize("q", [1, 3, 8, 12, 15, 16, 27, 100])
def test_character_count(q):
    chars = C.characters_mod(q)
    assert len(chars) == arith.totient(q)
    assert len(set(chars)) == len(chars)
    assert chars[0].is_principal


def test_all_counts_up_to_200():
    for q in range(1, 201):
        assert len(set(C.characters_mod(q))) == arith.totient(q)


def test_periodic_and_multiplicative_exhaustive():
    for q in range(1, 51):
        for chi in C.characters_mod(q):
            assert chi(1) == 1
            for a in range(q + 1):
                assert chi(a + q) == chi(a)
                assert (chi.phase(a) is None) == (math.gcd(a, q) != 1)
            for a in range(q):
                for b in range(q):
                    pa, pb, pab = chi.phase(a), chi.phase(b), chi.phase(a * b)
                    if pa is None or pb is None:
                        assert pab is None
                    else:
                        assert pab == pa + pb


def test_values_are_roots_of_unity_of_order_dividing_phi():
    for q in range(1, 51):
        phi = arith.totient(q)
        for chi in C.characters_mod(q):
            for a in range(q):
                ph = chi.phase(a)
                if ph is not None:
                    assert phi % ph.den == 0


def test_modulus_bound():
    with pytest.raises(ResourceError):
        C.characters_mod(C.DEFAULT_MODULUS_BOUND + 1)


@pytest.mark.parametrize(
    "chi, expected",
    [(C.characters_mod(3)[0], 1), (CHI3, 3), (C.characters_mod(6)[1], 3)],
)
def test_conductor_examples(chi, expected):
    assert C.conductor(chi) == expected


@pytest.mark.parametrize("q", [4, 8, 9, 12, 16, 20, 24, 30])
def test_conductor_matches_induction_search(q):
    for chi in C.characters_mod(q):
        smallest = next(d for d in arith.divisors(q) if induced_from_smaller(chi, d))
        assert chi.conductor() == smallest
        assert C.is_primitive(chi) == (smallest == q)
        prim = chi.primitive()
        assert prim.modulus == smallest and prim.is_primitive()


def test_primitive_count_matches_formula():
    # number of primitive characters mod q is the Dirichlet convolution mu * phi
    def mobius(n):
        f = arith.factorize(n).factors
        return 0 if any(e > 1 for _, e in f) else (-1) ** len(f)

    for q in range(1, 101):
        expected = sum(mobius(q // d) * arith.totient(d) for d in arith.divisors(q))
        assert len(C.primitive_characters(q)) == expected


@pytest.mark.parametrize(
    "chi, expected",
    [(C.characters_mod(1)[0], 1), (CHI3, 1j * math.sqrt(3))],
)
def test_gauss_sum_examples(chi, expected):
    assert C.gauss_sum(chi) == pytest.approx(expected, abs=1e-12)


def test_gauss_sum_against_direct_sum():
    for q in (5, 7, 8, 12):
        for chi in C.characters_mod(q):
            direct = sum(cmath.exp(2j * math.pi * m / q) * chi(m) for m in range(1, q + 1))
            assert abs(C.gauss_sum(chi) - direct) < 1e-12


def test_modified_character_examples():
    assert C.modified_character(C.characters_mod(1)[0]) == C.modified_character(C.characters_mod(1)[0])
    f3 = C.modified_character(CHI3)
    for p, v in [(3, 1), (7, 1), (5, -1), (2, -1), (13, 1)]:
        assert f3(p) == pytest.approx(v)
    f4 = C.modified_character(CHI4)
    assert f4.classes[0] == (Explicit([2]), ZERO)
    assert (Residue(4, [3]), HALF) in f4.classes
    for n in range(1, 300):
        expected = CHI4(n) if n % 2 else f4(n // 2 ** (len(bin(n & -n)) - 3))
        assert f4(n) == pytest.approx(expected)


@pytest.mark.parametrize("chi, n", [(CHI3, 2), (CHI4, 1), (C.characters_mod(1)[0], 5)])
def test_fourier_expansion_examples(chi, n):
    assert C.verify_fourier_expansion(chi, n) <= 1e-9


def test_fourier_expansion_needs_primitive():
    with pytest.raises(PreconditionError):
        C.verify_fourier_expansion(C.characters_mod(6)[1], 1)


def test_cyclotomic_polynomials():
    assert C.cyclotomic_poly(1) == (-1, 1)
    assert C.cyclotomic_poly(6) == (1, -1, 1)
    assert C.cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # degree is phi(n)
    for n in range(1, 60):
        assert len(C.cyclotomic_poly(n)) - 1 == arith.totient(n)


@pytest.mark.parametrize(
    "counts, L, target, expected",
    [
        ({0: 1, 1: 1, 2: 1}, 3, 0, True),
        ({0: 1, 1: 1, 2: 1}, 3, 1, False),
        ({0: 2}, 5, 2, True),
        ({1: 1, 5: 1}, 6, 1, True),  # e(1/6) + e(5/6) = 1
        ({1: 1}, 4, 0, False),
    ],
)
def test_root_sum_equals(counts, L, target, expected):
    assert C.root_sum_equals(counts, L, target) is expected


@given(st.integers(1, 30), st.lists(st.integers(0, 29), max_size=12), st.integers(-3, 3))
def test_root_sum_agrees_with_floats_when_far(L, ks, target):
    counts = {}
    for k in ks:
        counts[k % L] = counts.get(k % L, 0) + 1
    val = sum(c * cmath.exp(2j * math.pi * k / L) for k, c in counts.items())
    exact = C.root_sum_equals(counts, L, target)
    if abs(val - target) > 1e-6:
        assert not exact
    else:
        assert exact


def test_orthogonality_and_geometric_identities():
    for q in range(1, 51):
        for r in range(q):
            for n in range(q):
                assert C.verify_geometric_indicator(q, r, n)
                assert C.geometric_indicator_residual(q, r, n) <= 1e-12
                if math.gcd(r, q) == 1:
                    assert C.verify_orthogonality(q, r, n)


def test_orthogonality_needs_coprime_residue():
    with pytest.raises(PreconditionError):
        C.verify_orthogonality(6, 2, 1)


def test_twisted_mean_limit_examples():
    # period-3 sum: (e(1/3) - e(2/3)) / 3
    assert C.twisted_mean_limit(1, 3, CHI3) == pytest.approx(1j / math.sqrt(3), abs=1e-12)
    assert C.twisted_mean_limit(1, 2, CHI3) == 0
    assert C.twisted_mean_limit(0, 1, C.characters_mod(1)[0]) == pytest.approx(1)


def test_twisted_mean_limit_preconditions():
    with pytest.raises(PreconditionError):
        C.twisted_mean_limit(2, 4, CHI4)
    with pytest.raises(PreconditionError):
        C.twisted_mean_limit(1, 6, C.characters_mod(6)[1])


@pytest.mark.parametrize("q, q0", [(3, 3), (4, 4), (5, 5), (6, 3), (4, 8), (7, 7), (12, 4)])
def test_twisted_mean_limit_against_long_sum(q, q0):
    for chi in C.primitive_characters(q0):
        for r in range(q):
            if math.gcd(r, q) != 1:
                continue
            N = 10**4 * math.lcm(q, q0)
            n = np.arange(1, N + 1)
            s = np.sum(np.exp(2j * np.pi * ((r * n) % q) / q) * chi.table(N)[1:]) / N
            assert abs(C.twisted_mean_limit(r, q, chi) - s) <= 1e-9


def test_twisted_limit_sign_convention():
    # conj chi(q - r) would give the limit of the opposite twist e(-rn/q)
    for chi in C.primitive_characters(4):
        val = C.twisted_mean_limit(1, 4, chi)
        opposite = C.gauss_sum(chi) * chi.conj()(3) / 4
        assert val == pytest.approx(C.twisted_mean_period(1, 4, chi), abs=1e-12)
        assert opposite == pytest.approx(C.twisted_mean_period(3, 4, chi), abs=1e-12)


@pytest.mark.parametrize("q", [1, 2, 5, 8, 12, 21])
def test_json_round_trip(q):
    for chi in C.characters_mod(q):
        assert C.DirichletCharacter.from_json(chi.to_json()) == chi


def test_json_rejects_non_multiplicative():
    doc = CHI3.to_json()
    doc["values"][0] = {"num": 1, "den": 2}  # chi(1) = -1
    with pytest.raises(SchemaError):
        C.DirichletCharacter.from_json(doc)
    doc = C.characters_mod(5)[1].to_json()
    doc["values"][1] = {"num": 0, "den": 1}  # chi(2) = 1 while 2 generates (Z/5)^*
    with pytest.raises(SchemaError, match="multiplicative"):
        C.DirichletCharacter.from_json(doc)
