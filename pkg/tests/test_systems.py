import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pretentious import arith, characters
from pretentious.arith import Default, Explicit, Residue
from pretentious.errors import PreconditionError, SchemaError
from pretentious.functions import FgAddFunction, FgMultFunction, units
from pretentious.phase import HALF, ZERO, Irrational, Rational
from pretentious.pretend import distance_partial
from pretentious.systems import (
    AddSystem,
    ModeFunction,
    ModeSpace,
    Rotation,
    Skew,
    aperiodicity_quantities,
    classify_system,
    distance_system,
    ergodic_average,
    koopman_apply,
    predicted_limit,
    project_aperiodic,
    project_pr_rat,
    project_pretentious,
    sigma_pr_rat_tilde,
    sigma_rat,
    system_from_json,
    wm_average,
)

from conftest import brute_eval, fg_add_functions, fg_functions

ONE = FgMultFunction.one()
LAM = FgMultFunction.liouville()
F0 = FgMultFunction.liouville(Explicit([2]))
CHI3_STAR = characters.modified_character(characters.characters_mod(3)[1])
GOLDEN = Irrational((math.sqrt(5) - 1) / 2)
OMEGA = FgAddFunction.big_omega()


def unit_mode(S, j=1):
    return ModeFunction.mode(S.space, j)


@st.composite
def systems_and_observables(draw, irrational=False):
    if draw(st.booleans()):
        f = draw(fg_functions(irrational=irrational))
        S = Rotation(f, band=None if f.is_rational else 3)
    else:
        beta = draw(st.sampled_from([Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(1, 6)] + ([GOLDEN] if irrational else [])))
        S = Skew(AddSystem(beta, band=None if isinstance(beta, Rational) else 3), draw(fg_add_functions()))
    modes = S.space.modes()[:8]
    coeffs = draw(
        st.lists(
            st.tuples(st.sampled_from(modes), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)),
            min_size=1,
            max_size=4,
        )
    )
    return S, ModeFunction(S.space, tuple(coeffs))


def test_mode_space_basics():
    assert ModeSpace.cyclic(3).modes() == [0, 1, 2]
    assert ModeSpace.torus(2).modes() == [-2, -1, 0, 1, 2]
    with pytest.raises(PreconditionError):
        ModeFunction.mode(ModeSpace.cyclic(2), 2)
    with pytest.raises(PreconditionError):
        Rotation(FgMultFunction(((Default(), GOLDEN),))).space


def test_rotation_space_is_order_of_generator():
    assert Rotation(LAM).space == ModeSpace.cyclic(2)
    assert Rotation(ONE).space == ModeSpace.cyclic(1)
    f = FgMultFunction(((Explicit([2]), Rational(1, 4)), (Residue(3, [2]), Rational(1, 3)), (Default(), ZERO)))
    assert Rotation(f).space == ModeSpace.cyclic(12)


@given(systems_and_observables(irrational=True))
def test_json_round_trips(case):
    S, F = case
    assert system_from_json(S.to_json()) == S
    assert ModeFunction.from_json(F.to_json()) == F


def test_json_rejects_bad_documents():
    with pytest.raises(SchemaError):
        system_from_json({"type": "shift"})
    with pytest.raises(SchemaError):
        ModeFunction.from_json({"space": {"kind": "cyclic", "order": 2}, "coeffs": [{"mode": 5, "re": 1, "im": 0}]})


@pytest.mark.parametrize(
    "S, n, factor",
    [
        (Rotation(LAM), 2, -1),
        (Rotation(CHI3_STAR), 1, 1),
        (Skew(AddSystem(HALF), OMEGA), 12, -1),
    ],
)
def test_koopman_examples(S, n, factor):
    F = unit_mode(S)
    assert koopman_apply(S, n, F).coeff(1) == pytest.approx(factor, abs=1e-15)


@given(systems_and_observables(irrational=True), st.integers(1, 10**4))
def test_koopman_preserves_norm(case, n):
    S, F = case
    assert abs(koopman_apply(S, n, F).norm2 - F.norm2) <= 1e-12 * max(1.0, F.norm2)


def test_koopman_is_multiplicative_action():
    S = Skew(AddSystem(Rational(1, 5)), OMEGA)
    F = ModeFunction(S.space, ((1, 1.0), (2, 0.5j)))
    for m, n in [(2, 3), (4, 6), (10, 9)]:
        a = koopman_apply(S, m * n, F)
        b = koopman_apply(S, m, koopman_apply(S, n, F))
        assert (a - b).norm2 < 1e-12


def test_ergodic_average_trivial_rotation():
    S = Rotation(ONE)
    F = ModeFunction.mode(S.space, 0)
    for tp in ergodic_average(S, F, schedule=[10, 1000]):
        assert tp.average == F and tp.l2_err == 0


def test_ergodic_average_liouville():
    S = Rotation(LAM)
    (tp,) = ergodic_average(S, unit_mode(S), schedule=[10**6])
    assert abs(tp.average.coeff(1)) <= 1e-2
    lam_sum = (1 - 2 * (arith.omega_table(10**6)[1:] % 2)).sum()
    assert tp.average.coeff(1) == pytest.approx(lam_sum / 10**6, abs=1e-15)


def test_ergodic_average_toward_euler_product():
    S = Rotation(F0)
    F = unit_mode(S)
    (tp,) = ergodic_average(S, F, schedule=[10**6])
    assert abs(tp.average.coeff(1) - predicted_limit(S, F).coeff(1)) <= 0.02


@given(systems_and_observables(), st.integers(1, 800))
def test_ergodic_average_matches_brute(case, N):
    S, F = case
    (tp,) = ergodic_average(S, F, schedule=[N])
    for j, c in F.coeffs:
        g = S.multiplier(j)
        direct = c * sum(brute_eval(g, n) for n in range(1, N + 1)) / N
        assert abs(tp.average.coeff(j) - direct) < 1e-9


def test_weighted_average_matches_brute():
    S = Rotation(CHI3_STAR)
    F = ModeFunction(S.space, ((0, 1.0), (1, 2.0)))
    w = FgMultFunction(((Residue(4, [3]), HALF), (Default(), ZERO)))
    (tp,) = ergodic_average(S, F, weight=w, schedule=[3000])
    for j, c in F.coeffs:
        g = S.multiplier(j)
        direct = c * sum(brute_eval(g, n) * brute_eval(w, n).conjugate() for n in range(1, 3001)) / 3000
        assert abs(tp.average.coeff(j) - direct) < 1e-9


def test_predicted_limit_examples():
    S = Rotation(ONE)
    F = ModeFunction.mode(S.space, 0, 2.5)
    assert predicted_limit(S, F) == F
    S = Rotation(F0)
    assert predicted_limit(S, unit_mode(S)).coeff(1) == pytest.approx(1 / 3, abs=1e-15)
    S = Rotation(LAM)
    assert predicted_limit(S, unit_mode(S)).coeff(1) == 0


def test_weighted_predicted_limit_is_euler_product():
    # g_1 = chi3*, weight f = chi3* times a sign flip at 5: only p = 5 differs
    w = CHI3_STAR * FgMultFunction.from_prime_values({5: HALF})
    S = Rotation(CHI3_STAR)
    lim = predicted_limit(S, unit_mode(S), w).coeff(1)
    assert lim == pytest.approx((1 - 1 / 5) / (1 + 1 / 5), abs=1e-15)


def test_cauchy_property_of_averages():
    for S in (Rotation(F0), Rotation(LAM), Skew(AddSystem(Rational(1, 3)), OMEGA)):
        F = ModeFunction(S.space, tuple((j, 1.0) for j in S.space.modes()))
        stops = [10**4, 2 * 10**4, 10**5, 2 * 10**5, 10**6, 2 * 10**6]
        trace = ergodic_average(S, F, schedule=stops)
        gaps = [(trace[i].average - trace[i + 1].average).norm2 for i in range(0, 6, 2)]
        assert gaps[0] > gaps[1] > gaps[2]


def test_project_pretentious_examples():
    S = Rotation(CHI3_STAR)
    F = unit_mode(S)
    assert project_pretentious(S, F, CHI3_STAR) == F
    S = Rotation(LAM)
    assert project_pretentious(S, unit_mode(S), ONE).coeffs == ()
    F0_mode = ModeFunction.mode(S.space, 0)
    assert project_pretentious(S, F0_mode, F0) == F0_mode
    assert project_pretentious(S, F0_mode, LAM).coeffs == ()


def test_pr_rat_examples():
    S = Rotation(CHI3_STAR)
    assert project_pr_rat(S, unit_mode(S)) == unit_mode(S)
    S = Rotation(LAM)
    assert project_aperiodic(S, unit_mode(S)) == unit_mode(S)
    F = ModeFunction.mode(S.space, 0, 3.0)
    assert project_pr_rat(S, F) == F


@given(systems_and_observables(irrational=True))
def test_decomposition_is_exact(case):
    S, F = case
    a, b = project_pr_rat(S, F), project_aperiodic(S, F)
    assert set(a.modes).isdisjoint(b.modes)
    assert (a + b) == F


def test_distance_system_examples():
    S = Rotation(LAM)
    assert distance_system(S, unit_mode(S), ONE, 10) == pytest.approx(math.sqrt(2 * (1 / 2 + 1 / 3 + 1 / 5 + 1 / 7)), abs=1e-12)
    assert distance_system(S, unit_mode(S), LAM, 10**4) == pytest.approx(0, abs=1e-7)
    with pytest.raises(PreconditionError):
        distance_system(S, ModeFunction(S.space), ONE, 10)


@given(systems_and_observables(irrational=True), fg_functions(irrational=True), st.integers(2, 10**5))
def test_spectral_identity(case, f, N):
    S, F = case
    if F.norm2 == 0:
        return
    lhs = distance_system(S, F, f, N) ** 2
    rhs = math.fsum(abs(c) ** 2 * distance_partial(S.multiplier(j), f, N) ** 2 for j, c in F.coeffs)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_wm_average_examples():
    S = Rotation(F0)
    assert wm_average(S, ModeFunction.mode(S.space, 0, 2.0), 1000) == 0
    assert wm_average(S, unit_mode(S), 1000) == pytest.approx(1.0, abs=1e-14)


@given(systems_and_observables(irrational=True), st.integers(1, 1500))
def test_wm_average_matches_brute(case, N):
    S, F = case
    c0 = abs(F.mean) ** 2
    direct = 0.0
    for n in range(1, N + 1):
        corr = sum(abs(c) ** 2 * brute_eval(S.multiplier(j), n) for j, c in F.coeffs)
        direct += abs(corr - c0)
    assert wm_average(S, F, N) == pytest.approx(direct / N, abs=1e-9)


@pytest.mark.parametrize(
    "S, expected",
    [
        (Rotation(LAM), (True, True, False)),
        (Rotation(CHI3_STAR), (True, False, False)),
        (Rotation(F0), (False, False, False)),
        (Skew(AddSystem(GOLDEN, band=6), OMEGA), (True, True, False)),
        (Skew(AddSystem(GOLDEN, band=6), FgAddFunction.big_omega(Residue(4, [1]))), (True, True, False)),
        (Skew(AddSystem(GOLDEN, band=6), FgAddFunction.zero()), (False, False, False)),
        (Skew(AddSystem(GOLDEN, band=6), FgAddFunction.big_omega(Explicit([2, 3]))), (False, False, False)),
        (Skew(AddSystem(Rational(1, 3)), OMEGA), (True, True, False)),
        (Skew(AddSystem(HALF), FgAddFunction.big_omega(Residue(4, [3]))), (True, False, False)),
    ],
)
def test_classification_fixtures(S, expected):
    c = classify_system(S)
    assert (c.pretentiously_ergodic, c.aperiodic, c.pretentiously_weak_mixing) == expected


def test_trivial_space_is_weak_mixing():
    c = classify_system(Rotation(ONE))
    assert c.pretentiously_weak_mixing and c.pretentiously_ergodic


def _representative_primes(M, count=4):
    reps = {r: [] for r in units(M)}
    # skip past the small explicitly assigned primes
    for p in arith.sieve_primes(20000):
        if p < 1000:
            continue
        r = p % M if M > 1 else 0
        if r in reps and len(reps[r]) < count:
            reps[r].append(p)
    return reps


@given(fg_add_functions(moduli=(1, 3, 4, 5)), st.sampled_from([Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(1, 4)]))
def test_rational_skew_classification_matches_prime_sampling(a, beta):
    """Ergodic iff, for each nonzero r/q in sigma_rat(T), q does not divide r a(p)
    for all primes in some residue class; evaluated on concrete primes."""
    q = beta.den
    M = max(a.modulus, 1)
    reps = _representative_primes(math.lcm(M, 1))
    erg = True
    aper = True
    for j in range(1, q):
        nonzero_class = any(all((j * beta.num * a(p)) % q for p in ps) for ps in reps.values())
        erg &= nonzero_class
        # a rational-valued multiplier pretends a character iff its values on
        # the residue classes mod M come from a character mod M
        vals = {r: Rational(j * beta.num * a(ps[0]), q) for r, ps in reps.items()}
        pret = any(all(chi.phase(r if M > 1 else 1) == v for r, v in vals.items()) for chi in characters.characters_mod(M))
        aper &= not pret
    c = classify_system(Skew(AddSystem(beta), a))
    assert c.pretentiously_ergodic == erg
    assert c.aperiodic == aper


def test_sigma_rat_examples():
    assert sigma_rat(AddSystem(Rational(1, 3))) == {Fraction(0), Fraction(1, 3), Fraction(2, 3)}
    assert sigma_rat(AddSystem(GOLDEN)) == {Fraction(0)}
    assert sigma_rat(AddSystem(Rational(2, 5))) == {Fraction(k, 5) for k in range(5)}


def test_sigma_pr_rat_examples():
    assert sigma_pr_rat_tilde(Rotation(CHI3_STAR)) == {Fraction(0), Fraction(1, 3), Fraction(2, 3)}
    assert sigma_pr_rat_tilde(Rotation(LAM)) == {Fraction(0)}
    assert sigma_pr_rat_tilde(Skew(AddSystem(GOLDEN, band=4), OMEGA)) == {Fraction(0)}
    chi4 = characters.modified_character(characters.characters_mod(4)[1])
    assert sigma_pr_rat_tilde(Rotation(chi4)) == {Fraction(0), Fraction(1, 4), Fraction(3, 4)}


def test_aperiodicity_quantities_shrink_for_liouville():
    S = Rotation(LAM)
    for q in (2, 3, 4):
        trace = aperiodicity_quantities(S, unit_mode(S), q, schedule=[10**3, 10**5])
        first, last = trace
        assert last.progression < first.progression
        assert max(last.progression, last.exponential, last.character) < 0.1


def test_aperiodicity_quantities_detect_periodic_system():
    S = Rotation(CHI3_STAR)
    (point,) = aperiodicity_quantities(S, unit_mode(S), 3, schedule=[10**5])
    assert point.progression > 0.5 and point.character > 0.5


def test_aperiodicity_progression_matches_brute():
    S = Rotation(LAM)
    (point,) = aperiodicity_quantities(S, unit_mode(S), 3, schedule=[500])
    lam = lambda n: brute_eval(LAM, n)  # noqa: E731
    prog = max(abs(sum(lam(3 * m + r) for m in range(1, 501)) / 500) for r in range(3))
    expo = max(abs(sum(cmath.exp(2j * math.pi * r * n / 3) * lam(n) for n in range(1, 501)) / 500) for r in (1, 2))
    assert point.progression == pytest.approx(prog, abs=1e-12)
    assert point.exponential == pytest.approx(expo, abs=1e-12)
