"""Exact multivariate polynomial and rational-function arithmetic over Q.

Polynomials are sparse: a dict from exponent tuples to Fraction
coefficients.  Exponent tuples are indexed against a global, append-only
variable registry and stored with trailing zeros trimmed, so values stay
canonical when later variables are registered.  The monomial order is
graded lexicographic with earlier-registered variables taking priority.

Fractions of polynomials are reduced only by integer content, common
monomial factors, and exact trial division by explicitly supplied factor
candidates; there is no general multivariate GCD.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Union

from .errors import ConditioningError, DomainError

Scalar = Union[int, Fraction]
Coercible = Union["MultiPoly", int, Fraction]


class VarRegistry:
    """Append-only mapping between variable names and stable indices."""

    def __init__(self) -> None:
        self._names: list[str] = []
        self._index: dict[str, int] = {}

    def add(self, name: str) -> int:
        """Register ``name`` (idempotent) and return its index."""
        if name not in self._index:
            self._index[name] = len(self._names)
            self._names.append(name)
        return self._index[name]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"unregistered variable {name!r}") from None

    def name(self, index: int) -> str:
        return self._names[index]

    def names(self) -> list[str]:
        return list(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)


#: The session-wide registry.  Variables are never re-indexed once created.
REGISTRY = VarRegistry()


def reset_registry() -> None:
    """Clear the session registry (test isolation only)."""
    REGISTRY._names.clear()
    REGISTRY._index.clear()


def _trim(exp: tuple[int, ...]) -> tuple[int, ...]:
    n = len(exp)
    while n and exp[n - 1] == 0:
        n -= 1
    return exp[:n]


def _pad(exp: tuple[int, ...], n: int) -> tuple[int, ...]:
    return exp + (0,) * (n - len(exp))


def _grlex_key(exp: tuple[int, ...], width: int):
    return (sum(exp), _pad(exp, width))


class MultiPoly:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exp, coef in terms.items():
                c = Fraction(coef)
                if c:
                    clean[_trim(tuple(exp))] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly()

    @staticmethod
    def const(c: Scalar) -> "MultiPoly":
        return MultiPoly({(): c})

    @staticmethod
    def var(name: str) -> "MultiPoly":
        i = REGISTRY.add(name)
        return MultiPoly({(0,) * i + (1,): 1})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_const():
            raise DomainError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, var_index: int) -> int:
        return max(
            (e[var_index] if var_index < len(e) else 0 for e in self.terms),
            default=0,
        )

    def variables(self) -> set[int]:
        used: set[int] = set()
        for e in self.terms:
            used.update(i for i, p in enumerate(e) if p)
        return used

    def _width(self) -> int:
        return max((len(e) for e in self.terms), default=0)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        w = self._width()
        exp = max(self.terms, key=lambda e: _grlex_key(e, w))
        return exp, self.terms[exp]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        w = self._width()
        return sorted(
            self.terms.items(), key=lambda kv: _grlex_key(kv[0], w), reverse=True
        )

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(other: Coercible) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Coercible) -> "MultiPoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        p = MultiPoly.__new__(MultiPoly)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        p = MultiPoly.__new__(MultiPoly)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other: Coercible) -> "MultiPoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Coercible) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other: Coercible) -> "MultiPoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                n = max(len(e1), len(e2))
                e = _trim(
                    tuple(
                        (e1[i] if i < len(e1) else 0) + (e2[i] if i < len(e2) else 0)
                        for i in range(n)
                    )
                )
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        p = MultiPoly.__new__(MultiPoly)
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise DomainError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MultiPoly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- division ----------------------------------------------------------

    def divexact(self, divisor: "MultiPoly") -> "MultiPoly | None":
        """Return self / divisor if the division is exact, else None."""
        if divisor.is_zero():
            raise DomainError("division by the zero polynomial")
        if self.is_zero():
            return MultiPoly.zero()
        if divisor.is_const():
            c = divisor.const_value()
            return MultiPoly({e: v / c for e, v in self.terms.items()})
        dexp, dcoef = divisor.leading()
        rem = dict(self.terms)
        quo: dict[tuple[int, ...], Fraction] = {}
        width = max(self._width(), divisor._width())
        while rem:
            lexp = max(rem, key=lambda e: _grlex_key(e, width))
            lcoef = rem[lexp]
            n = max(len(lexp), len(dexp))
            qe = tuple(
                (lexp[i] if i < len(lexp) else 0) - (dexp[i] if i < len(dexp) else 0)
                for i in range(n)
            )
            if any(p < 0 for p in qe):
                return None
            qe = _trim(qe)
            qc = lcoef / dcoef
            quo[qe] = quo.get(qe, Fraction(0)) + qc
            mono = MultiPoly({qe: qc})
            rem_poly = MultiPoly.__new__(MultiPoly)
            rem_poly.terms = rem
            rem = (rem_poly - mono * divisor).terms
        return MultiPoly(quo)

    # -- substitution and evaluation ----------------------------------------

    def coeffs_in(self, var_index: int) -> dict[int, "MultiPoly"]:
        """Split into coefficients of powers of one variable."""
        out: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for e, c in self.terms.items():
            p = e[var_index] if var_index < len(e) else 0
            rest = list(_pad(e, var_index + 1))
            rest[var_index] = 0
            out.setdefault(p, {})[_trim(tuple(rest))] = c
        return {p: MultiPoly(t) for p, t in out.items()}

    def subs_poly(self, var_index: int, value: "MultiPoly") -> "MultiPoly":
        parts = self.coeffs_in(var_index)
        result = MultiPoly.zero()
        for p, coef in parts.items():
            result = result + coef * value**p
        return result

    def eval(self, point: Mapping[str, complex | Scalar]) -> complex | Fraction:
        """Evaluate at a point given by variable name."""
        total: complex | Fraction = Fraction(0)
        values = {REGISTRY.index(n): v for n, v in point.items()}
        for e, c in self.terms.items():
            term: complex | Fraction = c
            for i, p in enumerate(e):
                if p:
                    if i not in values:
                        raise DomainError(
                            f"no value supplied for variable {REGISTRY.name(i)!r}"
                        )
                    term = term * values[i] ** p
            total = total + term
        return total

    # -- normalization helpers ----------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer coeffs."""
        if not self.terms:
            return Fraction(1)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm)

    def primitive(self) -> "MultiPoly":
        """Divide out content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        c = self.content()
        if self.leading()[1] < 0:
            c = -c
        return MultiPoly({e: v / c for e, v in self.terms.items()})

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for exp, coef in self.sorted_terms():
            factors = [
                REGISTRY.name(i) + (f"^{p}" if p > 1 else "")
                for i, p in enumerate(exp)
                if p
            ]
            mono = "*".join(factors)
            a = abs(coef)
            if not factors:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append(("- " if coef < 0 else "+ ") + body)
        out = " ".join(pieces)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        used = sorted(self.variables())
        names = [REGISTRY.name(i) for i in used]
        pos = {i: k for k, i in enumerate(used)}
        terms = []
        for exp, coef in self.sorted_terms():
            proj = [0] * len(used)
            for i, p in enumerate(exp):
                if p:
                    proj[pos[i]] = p
            terms.append({"coef": str(coef), "exp": proj})
        return {"vars": names, "terms": terms}

    @staticmethod
    def from_json(data: dict) -> "MultiPoly":
        idx = [REGISTRY.add(n) for n in data["vars"]]
        terms: dict[tuple[int, ...], Fraction] = {}
        for t in data["terms"]:
            exp = [0] * (max(idx) + 1 if idx else 0)
            for k, p in enumerate(t["exp"]):
                exp[idx[k]] = p
            terms[_trim(tuple(exp))] = Fraction(t["coef"])
        return MultiPoly(terms)


def poly(name: str) -> MultiPoly:
    """Shorthand for a single registered variable."""
    return MultiPoly.var(name)


class RatFun:
    """A fraction of MultiPolys, normalized by content only.

    Equality is decided by exact cross-multiplication, never by comparing
    representations.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Coercible, den: Coercible = 1):
        n = MultiPoly._coerce(num)
        d = MultiPoly._coerce(den)
        if d.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if n.is_zero():
            self.num = MultiPoly.zero()
            self.den = MultiPoly.const(1)
            return
        # common monomial factor
        shared = None
        for e in list(n.terms) + list(d.terms):
            if shared is None:
                shared = list(e)
            else:
                shared = [
                    min(s, e[i] if i < len(e) else 0) for i, s in enumerate(shared)
                ]
        if shared and any(shared):
            mono = MultiPoly({_trim(tuple(shared)): 1})
            n = n.divexact(mono)  # type: ignore[assignment]
            d = d.divexact(mono)  # type: ignore[assignment]
        if d.is_const():
            n = n * (Fraction(1) / d.const_value())
            d = MultiPoly.const(1)
        # joint content normalization, positive den leading coefficient
        c = d.content()
        if d.leading()[1] < 0:
            c = -c
        d = MultiPoly({e: v / c for e, v in d.terms.items()})
        n = MultiPoly({e: v / c for e, v in n.terms.items()})
        cn = n.content()
        cd = d.content()
        g = Fraction(
            gcd(cn.numerator * cd.denominator, cd.numerator * cn.denominator),
            cn.denominator * cd.denominator,
        )
        if g and g != 1:
            n = MultiPoly({e: v / g for e, v in n.terms.items()})
            d = MultiPoly({e: v / g for e, v in d.terms.items()})
        self.num = n
        self.den = d

    # -- constructors -------------------------------------------------------

    @staticmethod
    def _coerce(other: "RatFun | Coercible") -> "RatFun":
        if isinstance(other, RatFun):
            return other
        if isinstance(other, (MultiPoly, int, Fraction)):
            return RatFun(other)
        return NotImplemented  # type: ignore[return-value]

    @staticmethod
    def var(name: str) -> "RatFun":
        return RatFun(MultiPoly.var(name))

    @staticmethod
    def const(c: Scalar) -> "RatFun":
        return RatFun(MultiPoly.const(c))

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def as_poly(self) -> MultiPoly:
        if not self.is_poly():
            raise DomainError("rational function is not polynomial")
        return self.num.divexact(self.den)  # type: ignore[return-value]

    def is_bare_var(self) -> str | None:
        """Name of the variable if self is exactly one variable, else None."""
        if not self.is_poly():
            return None
        p = self.as_poly()
        if len(p.terms) != 1:
            return None
        (exp, coef), = p.terms.items()
        if coef != 1 or sum(exp) != 1:
            return None
        return REGISTRY.name(exp.index(1))

    def variables(self) -> set[int]:
        return self.num.variables() | self.den.variables()

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num**n, self.den**n)

    # -- the spec surface ----------------------------------------------------

    def equals(self, other: "RatFun | Coercible") -> bool:
        o = self._coerce(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def substitute(self, var: str, value: "RatFun") -> "RatFun":
        if var not in REGISTRY:
            raise DomainError(f"unregistered variable {var!r}")
        i = REGISTRY.index(var)
        if i not in self.variables():
            return self
        n = _poly_subs_ratfun(self.num, i, value)
        d = _poly_subs_ratfun(self.den, i, value)
        if d.is_zero():
            raise ZeroDivisionError(
                "substitution produced an identically-zero denominator"
            )
        return n / d

    def eval_numeric(
        self, point: Mapping[str, complex], min_den: float = 1e-6
    ) -> complex:
        dv = complex(self.den.eval(point))
        if abs(dv) < min_den:
            raise ConditioningError(
                f"denominator magnitude {abs(dv):.3g} below {min_den:g}"
            )
        return complex(self.num.eval(point)) / dv

    def eval_exact(self, point: Mapping[str, Scalar]) -> Fraction:
        dv = self.den.eval({k: Fraction(v) for k, v in point.items()})
        if dv == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.eval({k: Fraction(v) for k, v in point.items()}) / dv  # type: ignore[operator,return-value]

    def reduce(self, candidates: Iterable[MultiPoly]) -> "RatFun":
        """Cancel exact common factors drawn from a known candidate list."""
        num, den = self.num, self.den
        for c in candidates:
            if c.is_const() or c.is_zero():
                continue
            while True:
                qd = den.divexact(c)
                if qd is None:
                    break
                qn = num.divexact(c)
                if qn is None:
                    break
                num, den = qn, qd
        return RatFun(num, den)

    def __str__(self) -> str:
        if self.is_poly():
            return str(self.num) if self.den == 1 else f"({self.num})/{self.den}"
        return f"({self.num}) / ({self.den})"

    def __repr__(self) -> str:
        return f"RatFun({self})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data: dict) -> "RatFun":
        return RatFun(
            MultiPoly.from_json(data["num"]), MultiPoly.from_json(data["den"])
        )


def _poly_subs_ratfun(p: MultiPoly, var_index: int, value: RatFun) -> RatFun:
    parts = p.coeffs_in(var_index)
    if not parts:
        return RatFun(0)
    top = max(parts)
    # Horner in the substituted value
    result = RatFun(parts.get(top, MultiPoly.zero()))
    for k in range(top - 1, -1, -1):
        result = result * value + RatFun(parts.get(k, MultiPoly.zero()))
    return result


def arith(op: str, f: RatFun, g: RatFun | None = None) -> RatFun:
    """Dispatch-style arithmetic entry point: add, sub, mul, div, neg."""
    if op == "neg":
        return -f
    if g is None:
        raise DomainError("binary operation needs a second operand")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise DomainError(f"unknown operation {op!r}")


def clear_denominators(
    eq: RatFun, known_factors: Iterable[MultiPoly] = ()
) -> tuple[MultiPoly, list[MultiPoly]]:
    """Split eq into a denominator-free equation and tracked exclusion factors.

    Returns (numerator polynomial, distinct denominator factors).  The
    factor list is produced by exact trial division against the supplied
    candidates; whatever remains indivisible is kept as a single factor.
    """
    num = eq.num.primitive()
    den = eq.den
    factors: list[MultiPoly] = []

    def note(f: MultiPoly) -> None:
        f = f.primitive()
        if f.is_const():
            return
        if not any(f == seen for seen in factors):
            factors.append(f)

    for c in known_factors:
        if c.is_const() or c.is_zero():
            continue
        while True:
            q = den.divexact(c)
            if q is None:
                break
            note(c)
            den = q
    if not den.is_const():
        note(den)
    return num, factors


def pseudo_reduce(p: MultiPoly, c: MultiPoly, var: str) -> MultiPoly:
    """Pseudo-remainder of p modulo c with respect to one variable.

    When the leading coefficient of c in var is a nonzero constant this is
    an exact reduction, so a zero result certifies ideal membership.
    """
    i = REGISTRY.index(var)
    dc = c.degree_in(i)
    if dc == 0:
        raise DomainError(f"constraint has no {var!r} dependence")
    c_parts = c.coeffs_in(i)
    lc = c_parts[dc]
    while True:
        dp = p.degree_in(i)
        if dp < dc:
            return p
        p_parts = p.coeffs_in(i)
        lp = p_parts[dp]
        shift = MultiPoly({(0,) * i + (dp - dc,): 1})
        p = lc * p - lp * shift * c


def dumps_poly(p: MultiPoly, **kwargs) -> str:
    return json.dumps(p.to_json(), **kwargs)


def schwartz_zippel_equal(
    f: RatFun, g: RatFun, points: Iterator[Mapping[str, Scalar]]
) -> bool:
    """Probabilistic equality check at supplied rational points (test aid)."""
    for pt in points:
        try:
            if f.eval_exact(pt) != g.eval_exact(pt):
                return False
        except ZeroDivisionError:
            continue
    return True
