"""Exact rational scalars, Puiseux polynomials and truncated q-series.

Everything downstream is built on :class:`PuiseuxPolynomial`: a sparse sum of
terms ``c * x1^e1 * ... * xn^en * exp(w1*x1 + ... + wn*xn)`` with rational
``c``, rational (possibly negative) exponents ``e`` and rational exponential
weights ``w``.  Polynomial prepotentials only use the ``e`` part; the quantum
cohomology prepotentials use the exponential weights to carry their
``exp(n t)`` sector, graded by the sum of the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError, NonPuiseuxCompositionError, LogarithmicCaseError

Scalar = Fraction


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a :class:`Fraction`."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational scalar: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise InputError(f"not a rational scalar: {value!r}") from exc
    raise InputError(f"not a rational scalar: {value!r}")


def format_scalar(value: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is one."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _norm_exp(e) -> int | Fraction:
    # integral exponents are stored as int: cheaper arithmetic, same hash as Fraction
    e = Fraction(e)
    return e.numerator if e.denominator == 1 else e


def _int_root(n: int, k: int) -> int | None:
    """Exact integer k-th root of n, or None."""
    if n < 0:
        if k % 2 == 0:
            return None
        r = _int_root(-n, k)
        return None if r is None else -r
    if n < 2:
        return n
    r = 1 << (n.bit_length() // k + 1)
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    return r if r**k == n else None


def rational_power(c: Fraction, e: Fraction) -> Fraction | None:
    """``c**e`` if it is rational, else None."""
    e = Fraction(e)
    if c == 0:
        return Fraction(0) if e > 0 else None
    p, q = e.numerator, e.denominator
    num = _int_root(c.numerator, q)
    den = _int_root(c.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p


@dataclass(frozen=True)
class Monomial:
    """Exponent vector plus exponential weights of a single term."""

    exponents: tuple
    exp_weights: tuple

    @property
    def key(self) -> tuple:
        return (self.exponents, self.exp_weights)


class PuiseuxPolynomial:
    """Immutable sparse polynomial with rational exponents over the rationals."""

    __slots__ = ("variables", "terms", "_zero")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise InputError(f"duplicate variable names in {self.variables}")
        self._zero = (0,) * len(self.variables)
        clean = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[key] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "PuiseuxPolynomial":
        return cls(variables)

    @classmethod
    def const(cls, value, variables: Sequence[str]) -> "PuiseuxPolynomial":
        n = len(tuple(variables))
        return cls(variables, {((0,) * n, (0,) * n): scalar(value)})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "PuiseuxPolynomial":
        variables = tuple(variables)
        if name not in variables:
            raise InputError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {(exps, (0,) * len(variables)): Fraction(1)})

    @classmethod
    def gens(cls, *names: str) -> tuple["PuiseuxPolynomial", ...]:
        return tuple(cls.var(n, names) for n in names)

    @classmethod
    def term(
        cls,
        coeff,
        variables: Sequence[str],
        exponents: Mapping[str, object] | None = None,
        exp_weights: Mapping[str, object] | None = None,
    ) -> "PuiseuxPolynomial":
        variables = tuple(variables)
        exponents = exponents or {}
        exp_weights = exp_weights or {}
        for name in list(exponents) + list(exp_weights):
            if name not in variables:
                raise InputError(f"unknown variable {name!r}")
        e = tuple(_norm_exp(exponents.get(v, 0)) for v in variables)
        w = tuple(_norm_exp(exp_weights.get(v, 0)) for v in variables)
        return cls(variables, {(e, w): scalar(coeff)})

    # -- basic protocol ----------------------------------------------------

    def _coerce(self, other) -> "PuiseuxPolynomial":
        if isinstance(other, PuiseuxPolynomial):
            if other.variables != self.variables:
                raise InputError(
                    f"variable-list mismatch: {self.variables} vs {other.variables}"
                )
            return other
        return PuiseuxPolynomial.const(scalar(other), self.variables)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, PuiseuxPolynomial):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self.terms == self._coerce(other).terms
        except InputError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        for key in sorted(self.terms):
            yield Monomial(*key), self.terms[key]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "PuiseuxPolynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PuiseuxPolynomial(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "PuiseuxPolynomial":
        return PuiseuxPolynomial(self.variables, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "PuiseuxPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PuiseuxPolynomial":
        return self._coerce(other) - self

    def scale(self, c) -> "PuiseuxPolynomial":
        c = scalar(c)
        if not c:
            return PuiseuxPolynomial(self.variables)
        return PuiseuxPolynomial(self.variables, {k: v * c for k, v in self.terms.items()})

    def mul(self, other, max_grade=None) -> "PuiseuxPolynomial":
        """Product, optionally dropping terms whose exp-grade exceeds ``max_grade``."""
        other = self._coerce(other)
        zero = self._zero
        out: dict = {}
        b_items = list(other.terms.items())
        for (e1, w1), c1 in self.terms.items():
            for (e2, w2), c2 in b_items:
                if w2 == zero:
                    w = w1
                elif w1 == zero:
                    w = w2
                else:
                    w = tuple(x + y for x, y in zip(w1, w2))
                    if max_grade is not None and sum(w) > max_grade:
                        continue
                key = (tuple(x + y for x, y in zip(e1, e2)), w)
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    del out[key]
        return PuiseuxPolynomial(self.variables, out)

    def __mul__(self, other) -> "PuiseuxPolynomial":
        if not isinstance(other, PuiseuxPolynomial):
            return self.scale(other)
        return self.mul(other)

    def __rmul__(self, other) -> "PuiseuxPolynomial":
        return self.scale(other)

    def __truediv__(self, other) -> "PuiseuxPolynomial":
        if isinstance(other, PuiseuxPolynomial):
            if len(other.terms) != 1:
                raise InputError("division only by a single-term polynomial")
            return self * other ** -1
        c = scalar(other)
        if not c:
            raise ZeroDivisionError("division of polynomial by zero")
        return self.scale(1 / c)

    def __pow__(self, e) -> "PuiseuxPolynomial":
        e = Fraction(e)
        if e.denominator == 1 and e >= 0:
            n = e.numerator
            result = PuiseuxPolynomial.const(1, self.variables)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        if len(self.terms) != 1:
            raise NonPuiseuxCompositionError(
                f"non-Puiseux composition: rational power {e} of a {len(self.terms)}-term polynomial"
            )
        ((exps, wts), c), = self.terms.items()
        ce = rational_power(c, e)
        if ce is None:
            raise NonPuiseuxCompositionError(
                f"non-Puiseux composition: coefficient {c} raised to {e} is irrational"
            )
        key = (
            tuple(_norm_exp(x * e) for x in exps),
            tuple(_norm_exp(x * e) for x in wts),
        )
        return PuiseuxPolynomial(self.variables, {key: ce})

    # -- calculus ------------------------------------------------------------

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise InputError(f"unknown variable {var!r}") from None

    def diff(self, var: str, times: int = 1) -> "PuiseuxPolynomial":
        """Partial derivative, including the chain-rule factor of exp terms."""
        i = self._index(var)
        p = self
        for _ in range(times):
            out: dict = {}
            for (e, w), c in p.terms.items():
                ei, wi = e[i], w[i]
                if ei:
                    ne = e[:i] + (_norm_exp(ei - 1),) + e[i + 1:]
                    k = (ne, w)
                    s = out.get(k, 0) + c * ei
                    if s:
                        out[k] = s
                    else:
                        del out[k]
                if wi:
                    k = (e, w)
                    s = out.get(k, 0) + c * wi
                    if s:
                        out[k] = s
                    else:
                        del out[k]
            p = PuiseuxPolynomial(self.variables, out)
        return p

    def integrate(self, var: str) -> "PuiseuxPolynomial":
        """Termwise antiderivative in ``var`` with zero integration constant."""
        i = self._index(var)
        out = {}
        for (e, w), c in self.terms.items():
            if w[i]:
                raise InputError("integration of exponential terms is not supported")
            if e[i] == -1:
                raise LogarithmicCaseError(
                    f"logarithmic case unsupported: integrating {var}^-1"
                )
            ne = e[:i] + (_norm_exp(e[i] + 1),) + e[i + 1:]
            out[(ne, w)] = c / (e[i] + 1)
        return PuiseuxPolynomial(self.variables, out)

    # -- structure queries ---------------------------------------------------

    def depends_on(self, var: str) -> bool:
        i = self._index(var)
        return any(e[i] or w[i] for (e, w) in self.terms)

    def is_constant(self) -> bool:
        return all(e == self._zero and w == self._zero for (e, w) in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError(f"not a constant: {self}")
        return next(iter(self.terms.values()), Fraction(0))

    def has_exp(self) -> bool:
        return any(any(w) for (_, w) in self.terms)

    def max_grade(self):
        return max((sum(w) for (_, w) in self.terms), default=0)

    def truncate(self, max_grade) -> "PuiseuxPolynomial":
        """Drop terms whose exp-grade (sum of exponential weights) exceeds ``max_grade``."""
        if max_grade is None:
            return self
        return PuiseuxPolynomial(
            self.variables, {k: c for k, c in self.terms.items() if sum(k[1]) <= max_grade}
        )

    def total_degree(self, key) -> Fraction:
        return sum(key[0])

    def coefficients_in(self, names: Iterable[str]) -> dict:
        """Split into {exponent-key in ``names``: coefficient polynomial in the other variables}."""
        names = tuple(names)
        idx = [self._index(n) for n in names]
        rest = tuple(v for v in self.variables if v not in names)
        ridx = [self._index(n) for n in rest]
        groups: dict = {}
        for (e, w), c in self.terms.items():
            outer = (tuple(e[i] for i in idx), tuple(w[i] for i in idx))
            inner = (tuple(e[i] for i in ridx), tuple(w[i] for i in ridx))
            groups.setdefault(outer, {})[inner] = c
        return {k: PuiseuxPolynomial(rest, v) for k, v in groups.items()}

    def extend(self, variables: Sequence[str]) -> "PuiseuxPolynomial":
        """Re-express over a superset of variables (or a reordering)."""
        variables = tuple(variables)
        for v in self.variables:
            if v not in variables:
                raise InputError(f"cannot drop variable {v!r} that the polynomial uses")
        pos = [self.variables.index(v) if v in self.variables else None for v in variables]
        out = {}
        for (e, w), c in self.terms.items():
            ne = tuple(e[p] if p is not None else 0 for p in pos)
            nw = tuple(w[p] if p is not None else 0 for p in pos)
            out[(ne, nw)] = c
        return PuiseuxPolynomial(variables, out)

    # -- composition ---------------------------------------------------------

    def substitute(
        self,
        bindings: Mapping[str, "PuiseuxPolynomial"],
        target_variables: Sequence[str] | None = None,
        max_grade=None,
    ) -> "PuiseuxPolynomial":
        """Compose: replace each bound variable by a polynomial over ``target_variables``.

        Unbound variables map to the same-named target variable.  Non-integer
        or negative powers require a single-term image with a rational root of
        its coefficient; exponential weights require a linear image.
        """
        for name in bindings:
            self._index(name)
        if target_variables is None:
            target_variables = next(iter(bindings.values())).variables if bindings else self.variables
        target_variables = tuple(target_variables)
        images = []
        for v in self.variables:
            if v in bindings:
                img = bindings[v]
                if img.variables != target_variables:
                    img = img.extend(target_variables)
            else:
                img = PuiseuxPolynomial.var(v, target_variables)
            images.append(img)

        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e
            return cache[key]

        nt = len(target_variables)
        tzero = (0,) * nt

        def exp_image(w):
            total = [Fraction(0)] * nt
            for i, wi in enumerate(w):
                if not wi:
                    continue
                for (e2, w2), c2 in images[i].terms.items():
                    if any(w2) or sum(e2) != 1 or any(x not in (0, 1) for x in e2):
                        raise NonPuiseuxCompositionError(
                            "non-Puiseux composition: exponential of a non-linear image of "
                            f"{self.variables[i]!r}"
                        )
                    j = e2.index(1)
                    total[j] += wi * c2
            return tuple(_norm_exp(x) for x in total)

        result = PuiseuxPolynomial(target_variables)
        for (e, w), c in self.terms.items():
            t = PuiseuxPolynomial(target_variables, {(tzero, tzero): c})
            if any(w):
                t = PuiseuxPolynomial(target_variables, {(tzero, exp_image(w)): c})
            for i, ei in enumerate(e):
                if ei:
                    t = t.mul(power(i, ei), max_grade)
                    if not t:
                        break
            result = result + t
        return result.truncate(max_grade)

    def evaluate(self, point: Mapping[str, float]) -> float:
        """Floating-point evaluation (used only for numeric probes and rank checks)."""
        vals = [float(point[v]) for v in self.variables]
        total = 0.0
        for (e, w), c in self.terms.items():
            term = float(c)
            for x, ei, wi in zip(vals, e, w):
                if ei:
                    term *= x ** float(ei)
                if wi:
                    term *= math.exp(float(wi) * x)
            total += term
        return total

    def evaluate_exact(self, point: Mapping[str, object]) -> Fraction:
        """Exact evaluation; raises when a rational power or exp term is irrational."""
        vals = [scalar(point[v]) for v in self.variables]
        total = Fraction(0)
        for (e, w), c in self.terms.items():
            if any(w):
                raise NonPuiseuxCompositionError("exact evaluation of an exponential term")
            term = c
            for x, ei in zip(vals, e):
                if ei:
                    xe = rational_power(x, Fraction(ei))
                    if xe is None:
                        raise NonPuiseuxCompositionError(f"{x}^{ei} is irrational")
                    term *= xe
            total += term
        return total

    # -- content normalization -------------------------------------------------

    def primitive(self) -> "PuiseuxPolynomial":
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        lcm = 1
        for c in self.terms.values():
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, (c * lcm).numerator)
        lead = self.terms[max(self.terms)]
        factor = Fraction(lcm, g) * (1 if lead > 0 else -1)
        return self.scale(factor)

    def proportional_to(self, other: "PuiseuxPolynomial") -> bool:
        """True when ``self == lambda * other`` for a nonzero rational lambda."""
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return not self.terms and not other.terms
        return self.primitive() == other.primitive()

    # -- display / serialization -------------------------------------------------

    def __repr__(self) -> str:
        return f"PuiseuxPolynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            e, w = key
            c = self.terms[key]
            factors = []
            for v, x in zip(self.variables, e):
                if x == 1:
                    factors.append(v)
                elif x:
                    xs = format_scalar(x)
                    factors.append(f"{v}^{xs}" if "/" not in xs and not xs.startswith("-") else f"{v}^({xs})")
            lin = [f"{format_scalar(x)}*{v}" if x != 1 else v for v, x in zip(self.variables, w) if x]
            if lin:
                factors.append("exp(" + " + ".join(lin) + ")")
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{format_scalar(mag)}*{body}"
            else:
                body = format_scalar(mag)
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        terms = []
        for key in sorted(self.terms):
            e, w = key
            entry = {"coeff": format_scalar(self.terms[key]), "exponents": [format_scalar(x) for x in e]}
            if any(w):
                entry["exp"] = [format_scalar(x) for x in w]
            terms.append(entry)
        return {"variables": list(self.variables), "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "PuiseuxPolynomial":
        try:
            variables = tuple(data["variables"])
            n = len(variables)
            out = {}
            for t in data["terms"]:
                e = tuple(_norm_exp(scalar(x)) for x in t["exponents"])
                w = tuple(_norm_exp(scalar(x)) for x in t.get("exp", [0] * n))
                if len(e) != n or len(w) != n:
                    raise InputError("term length does not match variable count")
                key = (e, w)
                out[key] = out.get(key, 0) + scalar(t["coeff"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed polynomial JSON: {exc}") from exc
        return cls(variables, out)


def poly_arith(a: PuiseuxPolynomial, b: PuiseuxPolynomial, op: str) -> PuiseuxPolynomial:
    if a.variables != b.variables:
        raise InputError(f"variable-list mismatch: {a.variables} vs {b.variables}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise InputError(f"unknown operation {op!r}")


def poly_diff(p: PuiseuxPolynomial, var: str) -> PuiseuxPolynomial:
    return p.diff(var)


def poly_substitute(p: PuiseuxPolynomial, bindings: Mapping[str, PuiseuxPolynomial], target_variables=None):
    return p.substitute(bindings, target_variables)


@dataclass(frozen=True)
class QSeries:
    """Truncated series in ``q = e^x``; ``coefficients[n]`` multiplies ``q^n``."""

    coefficients: tuple
    truncation_order: int

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients[: self.truncation_order + 1])
        coeffs += (Fraction(0),) * (self.truncation_order + 1 - len(coeffs))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], order: int) -> "QSeries":
        out = [Fraction(0)] * (order + 1)
        for n, c in coeffs.items():
            if 0 <= n <= order:
                out[n] = scalar(c)
        return cls(tuple(out), order)

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or n > self.truncation_order:
            return Fraction(0)
        return self.coefficients[n]

    def __add__(self, other: "QSeries") -> "QSeries":
        order = min(self.truncation_order, other.truncation_order)
        return QSeries(tuple(self[n] + other[n] for n in range(order + 1)), order)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scale(-1)

    def __mul__(self, other: "QSeries") -> "QSeries":
        order = min(self.truncation_order, other.truncation_order)
        out = [Fraction(0)] * (order + 1)
        a, b = self.coefficients, other.coefficients
        for i in range(order + 1):
            if not a[i]:
                continue
            for j in range(order + 1 - i):
                if b[j]:
                    out[i + j] += a[i] * b[j]
        return QSeries(tuple(out), order)

    def scale(self, c) -> "QSeries":
        c = scalar(c)
        return QSeries(tuple(c * x for x in self.coefficients), self.truncation_order)

    def x_derivative(self, times: int = 1) -> "QSeries":
        return QSeries(
            tuple(Fraction(n) ** times * c for n, c in enumerate(self.coefficients)),
            self.truncation_order,
        )

    def evaluate(self, x: float, derivative: int = 0) -> float:
        total = 0.0
        for n, c in enumerate(self.coefficients):
            if c:
                total += float(c) * n**derivative * math.exp(n * x)
        return total


def qseries_arith(a: QSeries, b: QSeries | None, op: str, factor=None) -> QSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(factor)
    if op == "x_derivative":
        return a.x_derivative()
    raise InputError(f"unknown operation {op!r}")
