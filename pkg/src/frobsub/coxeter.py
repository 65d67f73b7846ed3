"""Coxeter-group prepotentials and their two-dimensional I2(h) submanifold families."""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import ConsistencyError, InputError
from .exactcore import PuiseuxPolynomial, format_scalar, scalar
from .frobenius import (
    FrobeniusSpec,
    euler_check,
    metric_from_prepotential,
    raise_index,
    structure_tensor,
    wdvv_check,
)
from .submanifold import (
    InducedStructure,
    SubmanifoldMap,
    analyze,
    induced_prepotential_check,
    two_dim_prepotential,
)
from .verdict import Verdict

PARAMS = ("tau1", "tau2")

# naturality polynomials as printed, in the symbols k2, k3
PRINTED_CONDITIONS = {
    "H3": ["k2*(k2-1)*(27*k2+5)"],
    "A3": ["k2*(32-27*k2^2)"],
    "B3": ["k2*(2*k2-3)*(-2*k2-1)"],
    "F4": ["k2+12*k2^2+5*k3^2-36*k2*k3^2", "k3*(1+36*k2-144*k2^2+36*k3^2)"],
}

PRINTED_POINTS = {
    "H3": [(0,), (1,), (Fraction(-5, 27),)],
    "A3": [(0,)],
    "B3": [(0,), (Fraction(-1, 2),), (Fraction(3, 2),)],
    "F4": [
        (0, 0),
        (Fraction(-1, 12), 0),
        (Fraction(-1, 36), Fraction(1, 18)),
        (Fraction(5, 12), Fraction(1, 2)),
        (Fraction(-1, 36), Fraction(-1, 18)),
        (Fraction(5, 12), Fraction(-1, 2)),
    ],
}


@dataclass(frozen=True)
class CoxeterEntry:
    """``exponents`` are listed d_m, ..., d_1 = h (ascending), as in the usual tables."""

    name: str
    exponents: tuple
    spec: FrobeniusSpec

    @property
    def h(self) -> int:
        return self.exponents[-1]

    @property
    def weights(self) -> tuple:
        """Euler weight of t^1, ..., t^m (d_1 = h first)."""
        return tuple(reversed(self.exponents))

    @property
    def m(self) -> int:
        return len(self.exponents)

    def k_symbols(self) -> tuple:
        return tuple(f"k{j}" for j in range(2, self.m))

    def exponent_pairing_ok(self) -> bool:
        d = self.weights
        return all(d[i] + d[self.m - 1 - i] == self.h + 2 for i in range(self.m))


def catalog_path():
    override = os.environ.get("FROBSUB_CATALOG")
    if override:
        return override
    return resources.files("frobsub") / "data" / "catalog.json"


def _parse_entry(data) -> CoxeterEntry:
    exps = tuple(int(x) for x in data["exponents"])
    spec_data = dict(data)
    spec_data.setdefault("euler", [{"weight": str(d), "shift": "0"} for d in reversed(exps)])
    return CoxeterEntry(data["name"], exps, FrobeniusSpec.from_json(spec_data))


@lru_cache(maxsize=4)
def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read catalog {path}: {exc}") from exc
    return {e["name"]: _parse_entry(e) for e in raw["entries"]}


def load_catalog() -> dict[str, CoxeterEntry]:
    return _load(str(catalog_path()))


def get_entry(name: str) -> CoxeterEntry:
    cat = load_catalog()
    if name not in cat:
        raise InputError(f"unknown catalog entry {name!r}; known: {', '.join(cat)}")
    return cat[name]


def catalog_json() -> dict:
    return {
        "entries": [
            {"name": e.name, "exponents": list(e.exponents), "h": e.h, **e.spec.to_json()}
            for e in load_catalog().values()
        ]
    }


# ---------------------------------------------------------------------------
# the two-dimensional family


@dataclass
class FamilyInstance:
    group: CoxeterEntry
    k: tuple
    map: SubmanifoldMap
    info: InducedStructure

    @property
    def symbolic(self) -> bool:
        return any(isinstance(x, PuiseuxPolynomial) for x in self.k)


def family_map(group: CoxeterEntry, k: Sequence | None = None) -> tuple[SubmanifoldMap, tuple]:
    """t^1 = tau1 - (1/4h) sum k_j k_{m+1-j} d_j d_{m+1-j} tau2^{h/2}, t^j = k_j tau2^{d_j/2}, t^m = tau2."""
    m, h, d = group.m, group.h, group.weights
    if k is None:
        ring = PARAMS + group.k_symbols()
        ks = tuple(PuiseuxPolynomial.var(s, ring) for s in group.k_symbols())
    else:
        if len(k) != m - 2:
            raise InputError(f"{group.name} needs {m - 2} k-values, got {len(k)}")
        ring = PARAMS
        ks = tuple(PuiseuxPolynomial.const(scalar(x), ring) for x in k)
    tau1, tau2 = (PuiseuxPolynomial.var(p, ring) for p in PARAMS)
    kk = {j: ks[j - 2] for j in range(2, m)}  # 1-based coordinate index -> k_j
    total = PuiseuxPolynomial(ring)
    for j in range(2, m):
        jj = m + 1 - j
        total = total + (kk[j] * kk[jj]).scale(d[j - 1] * d[jj - 1])
    comps = [tau1 - (total * tau2 ** Fraction(h, 2)).scale(Fraction(1, 4 * h))]
    for j in range(2, m):
        comps.append(kk[j] * tau2 ** Fraction(d[j - 1], 2))
    comps.append(tau2)
    return SubmanifoldMap(PARAMS, tuple(comps)), ks if k is None else tuple(scalar(x) for x in k)


def build_family(group: CoxeterEntry | str, k: Sequence | None = None) -> FamilyInstance:
    """Family member for rational ``k`` (or symbolic k-variables when ``k`` is None)."""
    if isinstance(group, str):
        group = get_entry(group)
    smap, ks = family_map(group, k)
    info = analyze(smap, group.spec)
    if info.eta_N.entries != ((0, 1), (1, 0)):
        raise ConsistencyError(f"{group.name} family: induced metric {info.eta_N.entries}")
    if not info.euler_tangent:
        raise ConsistencyError(f"{group.name} family: Euler field not tangent")
    return FamilyInstance(group, ks, smap, info)


def _lead(p: PuiseuxPolynomial):
    return max(p.terms)


def _reduces_to_zero(p: PuiseuxPolynomial, divisors: Sequence[PuiseuxPolynomial]) -> bool:
    """Multivariate division (lex order) of ``p`` by ``divisors``; True when the remainder is 0."""
    p = PuiseuxPolynomial(p.variables, p.terms)
    remainder = PuiseuxPolynomial(p.variables)
    while p:
        lt = _lead(p)
        for q in divisors:
            lq = _lead(q)
            shift = tuple(a - b for a, b in zip(lt[0], lq[0]))
            if all(x >= 0 for x in shift):
                mono = PuiseuxPolynomial(p.variables, {(shift, lt[1]): p.terms[lt] / q.terms[lq]})
                p = p - mono * q
                break
        else:
            remainder = remainder + PuiseuxPolynomial(p.variables, {lt: p.terms[lt]})
            p = p - PuiseuxPolynomial(p.variables, {lt: p.terms[lt]})
    return not remainder


def naturality_conditions(group: CoxeterEntry | str) -> list[PuiseuxPolynomial]:
    """Polynomial conditions in the k-symbols for the family member to be natural."""
    inst = build_family(group)
    conds: list[PuiseuxPolynomial] = []
    for vec in inst.info.tangency_residuals.values():
        for comp in vec:
            for coeff in comp.coefficients_in(PARAMS).values():
                p = coeff.primitive()
                if p and p not in conds:
                    conds.append(p)
    # drop conditions that the smaller ones already imply (e.g. k2 * cubic, or combinations)
    kept: list[PuiseuxPolynomial] = []
    for p in sorted(conds, key=lambda p: (len(p), max(p.terms), str(p))):
        # not a Groebner basis, so try every divisor order (the lists are tiny)
        if not any(_reduces_to_zero(p, order) for order in itertools.permutations(kept)):
            kept.append(p)
    return kept


def parse_k_polynomial(text: str, symbols: Sequence[str]) -> PuiseuxPolynomial:
    """Parse products/sums of integer-coefficient expressions like ``k2*(27*k2+5)``."""
    import ast

    gens = {s: PuiseuxPolynomial.var(s, symbols) for s in symbols}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Pow):
                return a ** int(b.constant_value())
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.Constant):
            return PuiseuxPolynomial.const(node.value, symbols)
        if isinstance(node, ast.Name) and node.id in gens:
            return gens[node.id]
        raise InputError(f"cannot parse condition {text!r}")

    return ev(ast.parse(text.replace("^", "**"), mode="eval"))


def printed_conditions(group: CoxeterEntry | str) -> list[PuiseuxPolynomial]:
    if isinstance(group, str):
        group = get_entry(group)
    return [parse_k_polynomial(t, group.k_symbols()) for t in PRINTED_CONDITIONS[group.name]]


def compare_conditions(computed: Sequence[PuiseuxPolynomial], printed: Sequence[PuiseuxPolynomial]) -> bool:
    """Same set of polynomials up to nonzero rational scalars."""
    if len(computed) != len(printed):
        return False
    return all(any(c.proportional_to(p) for c in computed) for p in printed)


def verify_natural_points(group: CoxeterEntry | str, points: Sequence[Sequence], conditions=None) -> list[dict]:
    if isinstance(group, str):
        group = get_entry(group)
    conditions = conditions if conditions is not None else naturality_conditions(group)
    syms = group.k_symbols()
    out = []
    for pt in points:
        values = {s: scalar(x) for s, x in zip(syms, pt)}
        vals = [c.evaluate_exact(values) for c in conditions]
        out.append({"point": [format_scalar(values[s]) for s in syms], "zero": all(v == 0 for v in vals),
                    "values": [format_scalar(v) for v in vals]})
    return out


def induced_I2_prepotential(instance: FamilyInstance):
    """``F_N = 1/2 tau1^2 tau2 + p tau2^(h+1)``; returns (F_N, p)."""
    F_N = two_dim_prepotential(instance.info)
    ring, h = instance.map.ring, instance.group.h
    base = PuiseuxPolynomial.term(Fraction(1, 2), ring, {"tau1": 2, "tau2": 1})
    rest = F_N - base
    groups = rest.coefficients_in(PARAMS)
    target = (tuple(0 if p == "tau1" else h + 1 for p in PARAMS), (0, 0))
    extra = [k for k in groups if k != target]
    if extra:
        raise ConsistencyError(f"{instance.group.name}: induced prepotential {F_N} is not of I2({h}) shape")
    p = groups.get(target, PuiseuxPolynomial(tuple(v for v in ring if v not in PARAMS)))
    p_value = p.constant_value() if not instance.symbolic else p
    if not instance.symbolic:
        spec_N = FrobeniusSpec(f"I2({h})", PARAMS, F_N, ((h, 0), (2, 0)))
        dF = euler_check(spec_N)
        if dF != 2 * h + 2:
            raise ConsistencyError(f"induced prepotential has d_F = {dF}, expected {2 * h + 2}")
        verdict = induced_prepotential_check(instance.map, instance.group.spec, F_N, instance.info)
        if not verdict.ok:
            raise ConsistencyError(f"induced prepotential check failed: {verdict.details}")
    return F_N, p_value


def nested_chain_check() -> Verdict:
    """B3 natural planes/curves give I2(6); H3 gives I2(10); unity line in I2(6) is the 1D algebra."""
    details: dict = {}
    ok = True
    for name, roots in (("B3", PRINTED_POINTS["B3"]), ("H3", PRINTED_POINTS["H3"])):
        group = get_entry(name)
        rows = []
        for k in roots:
            inst = build_family(group, k)
            F_N, p = induced_I2_prepotential(inst)
            exps = {key[0][1] for key in F_N.terms if key[0][0] == 0}
            row_ok = inst.info.natural and exps <= {group.h + 1}
            ok &= row_ok
            rows.append({"k": [format_scalar(x) for x in k], "natural": inst.info.natural,
                         "F_N": str(F_N), "p": format_scalar(p), "ok": row_ok})
        details[name] = {"h": group.h, "top_exponent": group.h + 1, "instances": rows}
    # I2(6) from the B3 plane k2 = 0, then its unity line
    plane = build_family("B3", (0,))
    F_I26, _ = induced_I2_prepotential(plane)
    spec = FrobeniusSpec("I2(6)", PARAMS, F_I26, ((6, 0), (2, 0)))
    wd = wdvv_check(spec)
    c = structure_tensor(spec)
    eta = metric_from_prepotential(spec, c)
    raised = raise_index(c, eta)
    # along tau -> (tau, 0) the tangent is the unity field: d1 o d1 = c_11^k d_k
    unity_square = [raised[0, 0, k] for k in range(2)]
    line_ok = unity_square[0] == 1 and not unity_square[1]
    details["I2(6)_unity_line"] = {
        "c_11^1": str(unity_square[0]),
        "c_11^2": str(unity_square[1]),
        "one_dim_prepotential": "tau^3/6",
        "induced_metric": format_scalar(eta[0, 0]),
        "ok": line_ok,
    }
    ok &= line_ok and wd.ok
    return Verdict("nested_chain", ok, details)
