import itertools
import random
from fractions import Fraction

import pytest

from frobsub.coxeter import get_entry, load_catalog
from frobsub.errors import DegenerateMetricError, NormalizationError, NotQuasihomogeneousError
from frobsub.exactcore import PuiseuxPolynomial
from frobsub.frobenius import (
    FrobeniusAlgebra,
    FrobeniusSpec,
    MetricMatrix,
    euler_check,
    frobenius_algebra_check,
    intersection_form,
    jordan_algebra,
    metric_from_prepotential,
    structure_tensor,
    wdvv_check,
)

V3 = ("t1", "t2", "t3")


def spec_from_terms(terms, variables=V3, weights=(1, 1, 1), name="test"):
    F = PuiseuxPolynomial.zero(variables)
    for c, exps in terms:
        F = F + PuiseuxPolynomial.term(c, variables, exps)
    return FrobeniusSpec(name, variables, F, tuple((w, 0) for w in weights))


def test_a3_structure_constants():
    spec = get_entry("A3").spec
    c = structure_tensor(spec)
    t1, t2, t3 = PuiseuxPolynomial.gens(*V3)
    assert c[0, 0, 2] == 1 and c[0, 1, 1] == 1
    assert c[1, 1, 2] == t3
    assert c[1, 2, 2] == t2
    assert c[2, 2, 2] == t3**2


def test_structure_tensor_is_symmetric_under_permutations():
    c = structure_tensor(get_entry("F4").spec)
    rng = random.Random(3)
    for _ in range(40):
        idx = tuple(rng.randrange(4) for _ in range(3))
        for perm in itertools.permutations(idx):
            assert c[perm] == c[idx]


def test_two_dimensional_examples():
    spec = spec_from_terms([(Fraction(1, 2), {"t1": 2, "t2": 1})], ("t1", "t2"), (1, 1))
    c = structure_tensor(spec)
    assert c[0, 0, 1] == 1
    assert all(not c[k] for k in [(0, 0, 0), (0, 1, 1), (1, 1, 1)])
    assert wdvv_check(spec).ok
    c = structure_tensor(get_entry("A2").spec)
    assert c[1, 1, 1] == PuiseuxPolynomial.var("t2", ("t1", "t2")).scale(24)


def test_metrics_are_antidiagonal():
    for entry in load_catalog().values():
        eta = metric_from_prepotential(entry.spec)
        m = entry.m
        assert eta.entries == tuple(tuple(Fraction(int(i + j == m - 1)) for j in range(m)) for i in range(m)), entry.name


def test_non_canonical_constant_metric_is_accepted():
    spec = spec_from_terms([(Fraction(1, 2), {"t1": 2, "t2": 1}), (1, {"t1": 1, "t2": 2})], ("t1", "t2"), (1, 1))
    eta = metric_from_prepotential(spec)
    assert eta.entries == ((0, 1), (1, 2))


def test_non_constant_metric_raises():
    spec = spec_from_terms([(1, {"t1": 2, "t2": 2})], ("t1", "t2"), (1, 1))
    with pytest.raises(NormalizationError):
        metric_from_prepotential(spec)


def test_degenerate_metric_raises():
    with pytest.raises(DegenerateMetricError):
        MetricMatrix(((1, 1), (1, 1)))
    spec = spec_from_terms([(Fraction(1, 6), {"t1": 3}), (1, {"t2": 3})], ("t1", "t2"), (1, 1))
    with pytest.raises(DegenerateMetricError):
        metric_from_prepotential(spec)


@pytest.mark.parametrize("name", ["A2", "A3", "B3", "H3", "F4", "I2(6)"])
def test_catalog_wdvv(name):
    assert wdvv_check(get_entry(name).spec).ok


@pytest.mark.parametrize("name,dF", [("A2", 8), ("A3", 10), ("B3", 14), ("H3", 22), ("F4", 26), ("I2(6)", 14)])
def test_catalog_euler(name, dF):
    entry = get_entry(name)
    assert euler_check(entry.spec) == dF == 2 * entry.h + 2


def test_a3_mutation_fails_with_residual():
    spec = get_entry("A3").spec
    key = ((0, 0, 5), (0, 0, 0))
    assert spec.F.terms[key] == Fraction(1, 60)
    terms = dict(spec.F.terms)
    terms[key] = Fraction(1, 30)
    bad = FrobeniusSpec("A3'", spec.variables, PuiseuxPolynomial(spec.variables, terms), spec.euler)
    v = wdvv_check(bad)
    assert not v.ok
    assert v.details["residual"]


def test_mutating_any_higher_coefficient_breaks_wdvv():
    for name in ("A3", "B3", "H3", "F4"):
        spec = get_entry(name).spec
        for key, c in spec.F.terms.items():
            if sum(key[0]) < 3:
                continue
            terms = dict(spec.F.terms)
            terms[key] = c * 2
            bad = FrobeniusSpec(name, spec.variables, PuiseuxPolynomial(spec.variables, terms), spec.euler)
            assert not wdvv_check(bad).ok, (name, key)


def test_euler_weighted_degrees_per_monomial():
    spec = get_entry("H3").spec
    d = [w for w, _ in spec.euler]
    for (e, _), _c in spec.F.terms.items():
        assert sum(x * w for x, w in zip(e, d)) == 22


def test_not_quasihomogeneous_reports_offenders():
    spec = spec_from_terms(
        [(Fraction(1, 2), {"t1": 2, "t3": 1}), (Fraction(1, 2), {"t1": 1, "t2": 2}), (1, {"t3": 5}), (1, {"t2": 3})],
        V3,
        (4, 3, 2),
    )
    with pytest.raises(NotQuasihomogeneousError) as err:
        euler_check(spec)
    assert len(err.value.offending) == 1


def test_q_exponents_read_only():
    assert get_entry("H3").spec.q_exponents() == [0, Fraction(2, 5), Fraction(4, 5)]


def test_a2_intersection_form():
    g = intersection_form(get_entry("A2").spec)
    t1, t2 = PuiseuxPolynomial.gens("t1", "t2")
    assert g[1, 1] == t2.scale(Fraction(2, 3))
    assert g[0, 1] == t1
    assert g[0, 0] == (t2**2).scale(16)


@pytest.mark.parametrize("name", ["A2", "A3", "B3", "H3", "F4", "I2(6)"])
def test_intersection_form_unity_derivative(name):
    spec = get_entry(name).spec
    eta = metric_from_prepotential(spec)
    g = intersection_form(spec)
    for (i, j), gij in g.items():
        assert gij.diff("t1") == eta.inv(i, j)


def test_jordan_algebra_is_frobenius():
    for m in (1, 3, 5):
        assert frobenius_algebra_check(jordan_algebra(m)).ok


def test_one_dimensional_algebra():
    assert frobenius_algebra_check(FrobeniusAlgebra.from_products(1, {(0, 0): {0: 1}})).ok


def test_nilpotent_algebra_fails():
    alg = FrobeniusAlgebra.from_products(2, {(0, 1): {0: 1}, (1, 0): {0: 1}})
    v = frobenius_algebra_check(alg)
    assert not v.ok


def test_noncommutative_algebra_fails():
    alg = FrobeniusAlgebra.from_products(2, {(0, 0): {0: 1}, (0, 1): {1: 1}})
    assert frobenius_algebra_check(alg).details["reason"] == "not commutative"


def test_spec_json_round_trip():
    for entry in load_catalog().values():
        back = FrobeniusSpec.from_json(entry.spec.to_json())
        assert back.F == entry.spec.F and back.euler == entry.spec.euler
