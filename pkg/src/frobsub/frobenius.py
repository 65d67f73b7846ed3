"""Frobenius manifolds from prepotentials, and finite-dimensional Frobenius algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    ConsistencyError,
    DegenerateMetricError,
    InputError,
    NormalizationError,
    NotQuasihomogeneousError,
)
from .exactcore import PuiseuxPolynomial, format_scalar, scalar
from .verdict import Verdict


# ---------------------------------------------------------------------------
# exact matrices


def _solve_inverse(rows: Sequence[Sequence[Fraction]]) -> tuple[Fraction, tuple]:
    """Gauss-Jordan over the rationals. Returns (determinant, inverse or None)."""
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0), None
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det, tuple(tuple(r[n:]) for r in a)


@dataclass(frozen=True)
class MetricMatrix:
    """Constant symmetric nondegenerate matrix with its exact inverse."""

    entries: tuple
    inverse: tuple = field(init=False, repr=False)
    determinant: Fraction = field(init=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise InputError("metric must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"metric not symmetric at ({i + 1},{j + 1})")
        det, inv = _solve_inverse(rows)
        if not det:
            raise DegenerateMetricError("degenerate metric: determinant is zero")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "inverse", inv)
        object.__setattr__(self, "determinant", det)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def inv(self, i: int, j: int) -> Fraction:
        return self.inverse[i][j]

    def nonzero_inverse(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, x) for i, r in enumerate(self.inverse) for j, x in enumerate(r) if x]

    def is_antidiagonal(self) -> bool:
        n = self.dim
        return all(self.entries[i][j] == (1 if i + j == n - 1 else 0) for i in range(n) for j in range(n))

    def to_json(self) -> list:
        return [[format_scalar(x) for x in r] for r in self.entries]


# ---------------------------------------------------------------------------
# prepotential-based structures


@dataclass(frozen=True)
class FrobeniusSpec:
    """A prepotential with its Euler data.

    ``euler`` holds one ``(weight, shift)`` pair per coordinate, so that
    ``E = sum_i (weight_i t^i + shift_i) d/dt^i``.  Weights are stored as
    given (raw Coxeter degrees are fine); nothing is renormalized.
    ``truncation`` is the exp-grade through which the prepotential is exact
    (None for genuinely polynomial prepotentials).
    """

    name: str
    variables: tuple
    F: PuiseuxPolynomial
    euler: tuple
    truncation: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self, "euler", tuple((scalar(d), scalar(r)) for d, r in self.euler)
        )
        if self.F.variables != self.variables:
            raise InputError("prepotential variables do not match the spec")
        if len(self.euler) != len(self.variables):
            raise InputError("one Euler (weight, shift) pair is needed per variable")

    @property
    def m(self) -> int:
        return len(self.variables)

    def euler_field(self) -> list[PuiseuxPolynomial]:
        out = []
        for v, (d, r) in zip(self.variables, self.euler):
            out.append(PuiseuxPolynomial.var(v, self.variables).scale(d) + r)
        return out

    def q_exponents(self) -> list[Fraction]:
        """``q_i = 1 - d_i`` for the normalized field (read-only convenience)."""
        d1 = self.euler[0][0] or Fraction(1)
        return [1 - d / d1 for d, _ in self.euler]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variables": list(self.variables),
            "prepotential": self.F.to_json()["terms"],
            "euler": [{"weight": format_scalar(d), "shift": format_scalar(r)} for d, r in self.euler],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FrobeniusSpec":
        try:
            variables = tuple(data["variables"])
            F = PuiseuxPolynomial.from_json({"variables": variables, "terms": data["prepotential"]})
            euler = tuple((e["weight"], e.get("shift", "0")) for e in data["euler"])
            return cls(data.get("name", ""), variables, F, euler, data.get("truncation"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed spec JSON: {exc}") from exc


class StructureTensor:
    """Totally symmetric rank-3 tensor; only sorted index triples are stored."""

    def __init__(self, variables: Sequence[str], dim: int, entries: Mapping[tuple, PuiseuxPolynomial]):
        self.variables = tuple(variables)
        self.dim = dim
        self.entries = {tuple(sorted(k)): v for k, v in entries.items()}
        self._zero = PuiseuxPolynomial(self.variables)

    def __getitem__(self, ijk) -> PuiseuxPolynomial:
        return self.entries.get(tuple(sorted(ijk)), self._zero)

    def nonzero(self) -> dict:
        return {k: v for k, v in self.entries.items() if v}

    def to_json(self) -> dict:
        return {
            ",".join(str(i + 1) for i in k): v.to_json()
            for k, v in sorted(self.entries.items())
            if v
        }


def structure_tensor(spec: FrobeniusSpec) -> StructureTensor:
    m, names = spec.m, spec.variables
    first = [spec.F.diff(v) for v in names]
    second = {}
    for i in range(m):
        for j in range(i, m):
            second[i, j] = first[i].diff(names[j])
    entries = {}
    for i, j, k in itertools.combinations_with_replacement(range(m), 3):
        entries[i, j, k] = second[i, j].diff(names[k]).truncate(spec.truncation)
    return StructureTensor(names, m, entries)


def metric_from_prepotential(spec: FrobeniusSpec, c: StructureTensor | None = None) -> MetricMatrix:
    c = c or structure_tensor(spec)
    rows = []
    for i in range(spec.m):
        row = []
        for j in range(spec.m):
            entry = c[0, i, j]
            if not entry.is_constant():
                raise NormalizationError(
                    f"normalization violated: c_1{i + 1}{j + 1} = {entry} is not constant"
                )
            row.append(entry.constant_value())
        rows.append(row)
    return MetricMatrix(tuple(tuple(r) for r in rows))


def raise_index(c: StructureTensor, eta: MetricMatrix, max_grade=None) -> dict:
    """``c_ij^k = eta^{kl} c_ijl`` as {(i, j, k): poly} for i <= j."""
    out = {}
    inv = eta.nonzero_inverse()
    for i in range(c.dim):
        for j in range(i, c.dim):
            for k in range(c.dim):
                acc = PuiseuxPolynomial(c.variables)
                for kk, l, x in inv:
                    if kk == k:
                        acc = acc + c[i, j, l].scale(x)
                out[i, j, k] = acc.truncate(max_grade)
    return out


def wdvv_residuals(spec: FrobeniusSpec, c: StructureTensor, eta: MetricMatrix, first_only=False):
    """Yield ``((i, j, k, n), residual)`` for every nonzero WDVV associator component."""
    m = spec.m
    inv = eta.nonzero_inverse()
    g = spec.truncation
    cache: dict = {}

    def product(p, q):
        # sum_{l,r} c_{p0 p1 l} eta^{lr} c_{r q0 q1}
        key = (p, q) if p <= q else (q, p)
        if key not in cache:
            acc = PuiseuxPolynomial(spec.variables)
            for l, r, x in inv:
                a = c[key[0] + (l,)]
                if not a:
                    continue
                b = c[(r,) + key[1]]
                if b:
                    acc = acc + a.mul(b, g).scale(x)
            cache[key] = acc.truncate(g)
        return cache[key]

    for i, k in itertools.combinations(range(m), 2):
        for j in range(m):
            for n in range(m):
                lhs = product(tuple(sorted((i, j))), tuple(sorted((k, n))))
                rhs = product(tuple(sorted((k, j))), tuple(sorted((i, n))))
                res = lhs - rhs
                if res:
                    yield (i, j, k, n), res
                    if first_only:
                        return


def wdvv_check(spec: FrobeniusSpec) -> Verdict:
    """Associativity of ``c_ij^k`` as exact identities (through ``spec.truncation``)."""
    c = structure_tensor(spec)
    eta = metric_from_prepotential(spec, c)
    for idx, res in wdvv_residuals(spec, c, eta, first_only=True):
        i, j, k, n = (x + 1 for x in idx)
        return Verdict("wdvv", False, {"indices": [i, j, k, n], "residual": res})
    return Verdict("wdvv", True, {"truncation": spec.truncation})


def _exempt(key) -> bool:
    # "quadratic terms": pure polynomial monomials of total degree <= 2
    e, w = key
    return not any(w) and all(isinstance(x, int) and x >= 0 for x in e) and sum(e) <= 2


def lie_derivative(field_: Sequence[PuiseuxPolynomial], p: PuiseuxPolynomial, names) -> PuiseuxPolynomial:
    acc = PuiseuxPolynomial(p.variables)
    for v, Ev in zip(names, field_):
        if Ev:
            acc = acc + Ev * p.diff(v)
    return acc


def euler_check(spec: FrobeniusSpec) -> Fraction:
    """Return ``d_F`` with ``L_E F = d_F F + quadratic terms``.

    Raises :class:`NotQuasihomogeneousError` listing the offending monomials.
    """
    E = spec.euler_field()
    LF = lie_derivative(E, spec.F, spec.variables).truncate(spec.truncation)
    ratios = {}
    for key, c in spec.F.terms.items():
        if _exempt(key):
            continue
        ratios[key] = LF.terms.get(key, Fraction(0)) / c
    if not ratios:
        raise NotQuasihomogeneousError("prepotential has no cubic-or-higher terms")
    values = sorted(set(ratios.values()))
    if len(values) > 1:
        # majority weight is taken as d_F; the rest are reported
        counts = {v: sum(1 for r in ratios.values() if r == v) for v in values}
        dF = max(values, key=lambda v: counts[v])
        bad = [PuiseuxPolynomial(spec.variables, {k: spec.F.terms[k]}) for k, r in ratios.items() if r != dF]
        raise NotQuasihomogeneousError(
            f"not quasihomogeneous: weighted degrees {[format_scalar(v) for v in values]}", bad
        )
    dF = values[0]
    residual = LF - spec.F.scale(dF)
    bad = [k for k in residual.terms if not _exempt(k)]
    if bad:
        raise NotQuasihomogeneousError(
            "not quasihomogeneous: Lie derivative produces non-quadratic extra terms",
            [PuiseuxPolynomial(spec.variables, {k: residual.terms[k]}) for k in bad],
        )
    return dF


def normalized_euler(spec: FrobeniusSpec) -> list[PuiseuxPolynomial]:
    """Euler field scaled so the unity coordinate has weight one."""
    d1 = spec.euler[0][0]
    if not d1:
        raise InputError("unity coordinate has zero Euler weight; cannot normalize")
    return [e.scale(1 / d1) for e in spec.euler_field()]


def intersection_form(spec: FrobeniusSpec) -> dict:
    """``g^{ij} = eta^{ia} eta^{jb} c_abk E^k`` with E normalized to unit t^1 weight.

    Also checks ``d g^{ij} / d t^1 = eta^{ij}``; returns {(i, j): poly} for i <= j.
    """
    c = structure_tensor(spec)
    eta = metric_from_prepotential(spec, c)
    E = normalized_euler(spec)
    m, g = spec.m, spec.truncation
    contracted = {}
    for a in range(m):
        for b in range(a, m):
            acc = PuiseuxPolynomial(spec.variables)
            for k in range(m):
                if c[a, b, k] and E[k]:
                    acc = acc + c[a, b, k].mul(E[k], g)
            contracted[a, b] = acc
    inv = eta.nonzero_inverse()
    out = {}
    for i in range(m):
        for j in range(i, m):
            acc = PuiseuxPolynomial(spec.variables)
            for ii, a, x in inv:
                if ii != i:
                    continue
                for jj, b, y in inv:
                    if jj == j:
                        acc = acc + contracted[min(a, b), max(a, b)].scale(x * y)
            out[i, j] = acc.truncate(g)
            d1 = out[i, j].diff(spec.variables[0])
            if d1 != eta.inv(i, j):
                raise ConsistencyError(
                    f"d g^{i + 1}{j + 1}/dt1 = {d1} differs from eta^{i + 1}{j + 1} = {eta.inv(i, j)}"
                )
    return out


# ---------------------------------------------------------------------------
# finite-dimensional algebras


@dataclass(frozen=True)
class FrobeniusAlgebra:
    """Structure constants ``constants[i][j][k] = c_ij^k`` of e_i * e_j."""

    constants: tuple

    @property
    def dimension(self) -> int:
        return len(self.constants)

    @classmethod
    def from_products(cls, dim: int, products: Mapping[tuple, Mapping[int, object]]) -> "FrobeniusAlgebra":
        """Build from sparse {(i, j): {k: coeff}} with 0-based indices."""
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), out in products.items():
            for k, v in out.items():
                c[i][j][k] = scalar(v)
        return cls(tuple(tuple(tuple(r) for r in row) for row in c))

    def trace_form(self) -> list[list[Fraction]]:
        n = self.dimension
        c = self.constants
        traces = [sum(c[k][l][l] for l in range(n)) for k in range(n)]
        return [[sum(c[i][j][k] * traces[k] for k in range(n)) for j in range(n)] for i in range(n)]


def jordan_algebra(m: int) -> FrobeniusAlgebra:
    """e1 is the unit, e_i * e_i = -e1 for i >= 2, other products vanish."""
    products: dict = {}
    for i in range(m):
        products[(0, i)] = {i: 1}
        products[(i, 0)] = {i: 1}
    for i in range(1, m):
        products[(i, i)] = {0: -1}
    return FrobeniusAlgebra.from_products(m, products)


def frobenius_algebra_check(alg: FrobeniusAlgebra) -> Verdict:
    n = alg.dimension
    c = alg.constants
    for i, j, k in itertools.product(range(n), repeat=3):
        if c[i][j][k] != c[j][i][k]:
            return Verdict("frobenius_algebra", False, {"reason": "not commutative", "indices": [i + 1, j + 1, k + 1]})
    eta = alg.trace_form()
    try:
        metric = MetricMatrix(tuple(tuple(r) for r in eta))
    except DegenerateMetricError:
        return Verdict("frobenius_algebra", False, {"reason": "degenerate trace form", "eta": eta})
    lowered = [[[sum(metric[k, l] * c[i][j][l] for l in range(n)) for k in range(n)] for j in range(n)] for i in range(n)]
    for i, j, k in itertools.product(range(n), repeat=3):
        if lowered[i][j][k] != lowered[j][k][i]:
            return Verdict(
                "frobenius_algebra", False, {"reason": "c_ijk not totally symmetric", "indices": [i + 1, j + 1, k + 1]}
            )

    def mul(a, b):
        return [sum(a[i] * b[j] * c[i][j][k] for i in range(n) for j in range(n)) for k in range(n)]

    def inner(a, b):
        return sum(a[i] * metric[i, j] * b[j] for i in range(n) for j in range(n))

    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for a, b, d in itertools.product(basis, repeat=3):
        if inner(mul(a, b), d) != inner(a, mul(b, d)):
            return Verdict("frobenius_algebra", False, {"reason": "<a*b,c> != <a,b*c>"})
    return Verdict("frobenius_algebra", True, {"eta": [[format_scalar(x) for x in r] for r in eta]})
