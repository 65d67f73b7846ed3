import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsub import coxeter
from frobsub.coxeter import (
    build_family,
    compare_conditions,
    get_entry,
    induced_I2_prepotential,
    load_catalog,
    naturality_conditions,
    nested_chain_check,
    parse_k_polynomial,
    printed_conditions,
    verify_natural_points,
)
from frobsub.errors import InputError
from frobsub.exactcore import PuiseuxPolynomial
from frobsub.frobenius import FrobeniusSpec, wdvv_check

P = ("tau1", "tau2")
tau1, tau2 = PuiseuxPolynomial.gens(*P)


def test_table_of_exponents():
    table = {name: e.exponents for name, e in load_catalog().items()}
    assert table["A3"] == (2, 3, 4)
    assert table["B3"] == (2, 4, 6)
    assert table["H3"] == (2, 6, 10)
    assert table["F4"] == (2, 6, 8, 12)


def test_exponent_pairing():
    for entry in load_catalog().values():
        assert entry.exponent_pairing_ok(), entry.name


@pytest.mark.parametrize(
    "group,k,t1_coeff,exps",
    [
        ("H3", (Fraction(1, 2),), -Fraction(9, 10) * Fraction(1, 4), {"tau2": 5}),
        ("A3", (Fraction(1, 2),), -Fraction(9, 16) * Fraction(1, 4), {"tau2": 2}),
        ("F4", (Fraction(1, 3), Fraction(1, 5)), -2 * Fraction(1, 15), {"tau2": 6}),
    ],
)
def test_family_t1_component_matches_group_displays(group, k, t1_coeff, exps):
    inst = build_family(group, k)
    expected = tau1 + PuiseuxPolynomial.term(t1_coeff, P, exps)
    assert inst.map.components[0] == expected
    assert inst.map.components[-1] == tau2


def test_a3_family_has_half_integer_exponent():
    inst = build_family("A3", (2,))
    assert inst.map.components[1] == PuiseuxPolynomial.term(2, P, {"tau2": Fraction(3, 2)})


@pytest.mark.parametrize("group", ["A3", "B3", "H3", "F4"])
def test_family_metric_and_euler(group):
    entry = get_entry(group)
    k = tuple(Fraction(1, j + 2) for j in range(entry.m - 2))
    info = build_family(group, k).info
    assert info.eta_N.entries == ((0, 1), (1, 0))
    assert info.euler_tangent
    assert info.E_N == [tau1.scale(entry.h), tau2.scale(2)]


@pytest.mark.parametrize("group", ["H3", "A3", "B3", "F4"])
def test_conditions_match_printed(group):
    assert compare_conditions(naturality_conditions(group), printed_conditions(group))


def test_compare_conditions_is_up_to_scalar_only():
    p = parse_k_polynomial("k2*(k2-1)*(27*k2+5)", ("k2",))
    q = parse_k_polynomial("k2*(k2-1)*(27*k2+6)", ("k2",))
    assert compare_conditions([p.scale(-3)], [p])
    assert not compare_conditions([q], [p])


def test_parse_k_polynomial_rejects_junk():
    with pytest.raises(InputError):
        parse_k_polynomial("__import__('os')", ("k2",))
    with pytest.raises(InputError):
        parse_k_polynomial("k9 + 1", ("k2",))


def test_printed_points():
    for group, pts in coxeter.PRINTED_POINTS.items():
        rows = verify_natural_points(group, pts)
        assert all(r["zero"] for r in rows), group
    assert not verify_natural_points("H3", [(Fraction(1, 2),)])[0]["zero"]


def test_a3_irrational_roots_certified_by_factor():
    (cond,) = naturality_conditions("A3")
    k2 = PuiseuxPolynomial.var("k2", cond.variables)
    assert cond.proportional_to(k2 * (k2 * k2).scale(27) - k2.scale(32))


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=30))
def test_naturality_iff_root_h3(k):
    (cond,) = naturality_conditions("H3")
    root = cond.evaluate_exact({"k2": k}) == 0
    assert build_family("H3", (k,)).info.natural == root


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([0, Fraction(-1, 2), Fraction(3, 2), Fraction(1, 2), 1, Fraction(-1, 3)]))
def test_naturality_iff_root_b3(k):
    (cond,) = naturality_conditions("B3")
    assert build_family("B3", (k,)).info.natural == (cond.evaluate_exact({"k2": k}) == 0)


def test_naturality_iff_root_f4_points():
    for pt in coxeter.PRINTED_POINTS["F4"]:
        assert build_family("F4", pt).info.natural
    assert not build_family("F4", (Fraction(1, 7), Fraction(1, 3))).info.natural


@pytest.mark.parametrize(
    "group,k,p",
    [
        ("H3", (0,), Fraction(1, 3960)),
        ("A3", (0,), Fraction(1, 60)),
        ("B3", (0,), Fraction(1, 210)),
        ("H3", (1,), Fraction(32, 495)),
        ("B3", (Fraction(-1, 2),), Fraction(2, 105)),
    ],
)
def test_induced_I2_coefficient(group, k, p):
    F_N, value = induced_I2_prepotential(build_family(group, k))
    assert value == p
    h = get_entry(group).h
    assert F_N == (tau1**2 * tau2).scale(Fraction(1, 2)) + (tau2 ** (h + 1)).scale(p)


@pytest.mark.parametrize("group", ["A3", "B3", "H3", "F4"])
def test_plane_restriction_equals_induced_prepotential(group):
    entry = get_entry(group)
    inst = build_family(group, (0,) * (entry.m - 2))
    F_N, _ = induced_I2_prepotential(inst)
    restricted = entry.spec.F.substitute(dict(zip(entry.spec.variables, inst.map.components)), P)
    assert F_N == restricted


def test_symbolic_family_is_not_natural_generically():
    inst = build_family("H3")
    assert inst.symbolic
    assert not inst.info.natural


def test_nested_chain():
    v = nested_chain_check()
    assert v.ok
    assert v.details["B3"]["top_exponent"] == 7
    assert v.details["H3"]["top_exponent"] == 11


def test_h3_as_tabulated_fails_associativity():
    # the t2^3 t3^2 coefficient 1/60 violates WDVV; the catalog carries 1/6
    spec = get_entry("H3").spec
    key = ((0, 3, 2), (0, 0, 0))
    assert spec.F.terms[key] == Fraction(1, 6)
    terms = dict(spec.F.terms)
    terms[key] = Fraction(1, 60)
    printed = FrobeniusSpec("H3-printed", spec.variables, PuiseuxPolynomial(spec.variables, terms), spec.euler)
    v = wdvv_check(printed)
    assert not v.ok
    assert v.details["indices"] == [2, 2, 3, 3]


def test_catalog_override(tmp_path, monkeypatch):
    raw = json.loads(coxeter.catalog_path().read_text())
    raw["entries"] = [e for e in raw["entries"] if e["name"] == "A2"]
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(raw))
    monkeypatch.setenv("FROBSUB_CATALOG", str(path))
    assert list(load_catalog()) == ["A2"]
    with pytest.raises(InputError):
        get_entry("H3")
