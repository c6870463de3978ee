"""Trace-coordinate calculus for arborescent tangles.

Each subtangle carries a triple of trace coordinates (u, u-dot, u-check)
as exact rational functions in the meridian trace t and one fresh variable
per twist region.  Twist regions get closed forms through Chebyshev-like
recursions; compositions combine triples through the f/g rules, sharing
one coordinate; closures turn the shared data into polynomial equations.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import DomainError, StructureError, WrongEngineError
from .ratfun import (
    MultiPoly,
    RatFun,
    REGISTRY,
    _poly_subs_ratfun,
    clear_denominators,
)
from .tangle import (
    ClosureExpr,
    CompH,
    CompV,
    IntTwist,
    Rational,
    TangleExpr,
    VertTwist,
    component_count,
    expand_rational,
)

__all__ = [
    "InvariantData",
    "Presentation",
    "InvariantEngine",
    "alpha",
    "base_invariants",
    "fg",
    "compose",
    "recover_grave_acute",
    "tangle_invariants",
    "closure_equations",
]

_FRESH = itertools.count(1)


def _fresh_var() -> str:
    return f"_v{next(_FRESH)}"


def _t() -> RatFun:
    return RatFun.var("t")


def omega_theta(k: int, r: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Second- and first-kind recursion values at a polynomial argument."""
    m = abs(k)
    om_prev, om = MultiPoly.const(0), MultiPoly.const(1)
    th_prev, th = MultiPoly.const(2), r
    if m == 0:
        return om_prev, th_prev
    for _ in range(m - 1):
        om_prev, om = om, r * om - om_prev
        th_prev, th = th, r * th - th_prev
    if k < 0:
        om = -om
    return om, th


@dataclass(frozen=True)
class InvariantData:
    """Per-subtangle symbolic record.

    vars lists the retained fresh variables in twist-region order;
    constraints are polynomials required to vanish, exclusions polynomials
    required to stay nonzero (the non-degeneracy loci); notes parallel the
    constraints.
    """

    vars: tuple[str, ...]
    u: RatFun
    udot: RatFun
    ucheck: RatFun
    constraints: tuple[MultiPoly, ...] = ()
    exclusions: tuple[MultiPoly, ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Presentation:
    """Emitted character-variety data: denominator-free equations plus the
    genericity loci they are taken relative to."""

    variables: tuple[str, ...]
    equations: tuple[MultiPoly, ...]
    exclusions: tuple[MultiPoly, ...]
    notes: tuple[str, ...]
    traces: tuple[str, ...] = ()  # per-component trace variables (links)

    def to_json(self) -> dict:
        out = {
            "variables": list(self.variables),
            "equations": [p.to_json() for p in self.equations],
            "exclusions": [p.to_json() for p in self.exclusions],
            "notes": list(self.notes),
        }
        if self.traces:
            out["traces"] = list(self.traces)
        return out

    @staticmethod
    def from_json(data: dict) -> "Presentation":
        return Presentation(
            tuple(data["variables"]),
            tuple(MultiPoly.from_json(p) for p in data["equations"]),
            tuple(MultiPoly.from_json(p) for p in data["exclusions"]),
            tuple(data["notes"]),
            tuple(data.get("traces", ())),
        )

    def render_text(self) -> str:
        lines = ["variables: " + ", ".join(self.variables)]
        for eq, note in zip(self.equations, self.notes):
            lines.append(f"0 = {eq}    # {note}")
        for ex in self.exclusions:
            lines.append(f"0 != {ex}")
        return "\n".join(lines)

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)


# ---------------------------------------------------------------------------
# base cases
# ---------------------------------------------------------------------------


def alpha(k: int, r: RatFun) -> RatFun:
    """The twist-region trace polynomial (2t^2 + (r+2-t^2)*theta_k(-r))/(r+2).

    The numerator is divisible by r+2 for every integer k (theta_k at -2 is
    2*(-1)^k, killing the numerator at r = -2), so the result is returned
    as the exact polynomial quotient.
    """
    if not r.is_poly():
        raise DomainError("alpha expects a polynomial argument")
    rp = r.as_poly()
    t = MultiPoly.var("t")
    _, th = omega_theta(k, -rp)
    num = 2 * t * t + (rp + 2 - t * t) * th
    q = num.divexact(rp + MultiPoly.const(2))
    if q is None:
        raise DomainError("twist-trace numerator unexpectedly not divisible")
    return RatFun(q)


def base_invariants(atom: TangleExpr, var_name: str | None = None) -> InvariantData:
    """Closed-form triple for a single twist region [k] or [1/k]."""
    if not isinstance(atom, (IntTwist, VertTwist)):
        raise DomainError("base_invariants expects a twist atom")
    if atom.k == 0:
        raise DomainError("twist parameter must be nonzero")
    name = var_name or _fresh_var()
    r = RatFun.var(name)
    rp = r.as_poly()
    t = MultiPoly.var("t")
    om, _ = omega_theta(atom.k, -rp)
    ucheck = RatFun((2 - rp) * (rp + 2 - t * t) * om)
    ak = alpha(atom.k, r)
    if isinstance(atom, VertTwist):
        u, udot = r, ak
    else:
        u, udot = ak, r
    return InvariantData((name,), u, udot, ucheck)


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def fg(a: RatFun, b1: RatFun, c1: RatFun, b2: RatFun, c2: RatFun) -> tuple[RatFun, RatFun]:
    """The shared-coordinate composition rules.

    f = ((a+2)b1b2 + 2t^2(2-b1-b2) + c1c2/(a-2)) / (2(a+2-t^2)),
    g = ((a+2)(b1c2+b2c1) - 2t^2(c1+c2)) / (2(a+2-t^2)).
    """
    t = _t()
    two_t2 = 2 * t * t
    den = 2 * (a + 2 - t * t)
    f = ((a + 2) * b1 * b2 + two_t2 * (2 - b1 - b2) + c1 * c2 / (a - 2)) / den
    g = ((a + 2) * (b1 * c2 + b2 * c1) - two_t2 * (c1 + c2)) / den
    return f, g


def _subst_data(I: InvariantData, var: str, value: RatFun) -> InvariantData:
    def sub_poly(p: MultiPoly) -> MultiPoly:
        if REGISTRY.index(var) not in p.variables():
            return p
        return _poly_subs_ratfun(p, REGISTRY.index(var), value).num

    return InvariantData(
        tuple(v for v in I.vars if v != var),
        I.u.substitute(var, value),
        I.udot.substitute(var, value),
        I.ucheck.substitute(var, value),
        tuple(sub_poly(p) for p in I.constraints),
        tuple(sub_poly(p) for p in I.exclusions),
        I.notes,
    )


def _shared(I: InvariantData, direction: str) -> RatFun:
    return I.u if direction == "v" else I.udot


def _bare_own_var(I: InvariantData, direction: str) -> str | None:
    name = _shared(I, direction).is_bare_var()
    return name if name in I.vars else None


def _local_sig(s: RatFun, own: tuple[str, ...]) -> tuple:
    """Order-free fingerprint of a shared coordinate.

    The factor's own fresh variables are renamed to fixed placeholders in
    their twist-region order, so the fingerprint does not depend on which
    names the variables happened to receive.  Higher-degree coordinates
    sort first; this matches the representative conventions of the
    simplified twist-chain closed forms.
    """
    f = s
    for i, v in enumerate(own):
        f = f.substitute(v, RatFun.var(f"_sig{i}"))
    return (-f.num.total_degree(), str(f.num), str(f.den))


def _keep_first(s1: RatFun, I1: InvariantData, s2: RatFun, I2: InvariantData) -> bool:
    """Canonical representative choice; invariant under swapping factors."""
    k1, k2 = _local_sig(s1, I1.vars), _local_sig(s2, I2.vars)
    if k1 != k2:
        return k1 < k2
    return min(map(REGISTRY.index, I1.vars)) < min(map(REGISTRY.index, I2.vars))


def _unify(
    direction: str, I1: InvariantData, I2: InvariantData
) -> tuple[RatFun, InvariantData, InvariantData, tuple[MultiPoly, ...], tuple[str, ...]]:
    """Identify the shared coordinate of the two factors.

    Eliminates by substitution when a side's shared coordinate is a bare
    fresh variable (when both are bare, the later-registered variable is
    eliminated, which makes the rule symmetric in the two factors);
    otherwise records a vanishing constraint and keeps a canonically
    chosen representative so the result is order-independent.
    """
    s1, s2 = _shared(I1, direction), _shared(I2, direction)
    v1, v2 = _bare_own_var(I1, direction), _bare_own_var(I2, direction)
    extra: tuple[MultiPoly, ...] = ()
    notes: tuple[str, ...] = ()
    if v1 and v2:
        if REGISTRY.index(v1) < REGISTRY.index(v2):
            I2 = _subst_data(I2, v2, s1)
            a = s1
        else:
            I1 = _subst_data(I1, v1, s2)
            a = s2
    elif v2:
        I2 = _subst_data(I2, v2, s1)
        a = s1
    elif v1:
        I1 = _subst_data(I1, v1, s2)
        a = s2
    else:
        diff = s1 - s2
        extra = (diff.num,)
        notes = (f"shared {'u' if direction == 'v' else 'u-dot'} coordinate match",)
        a = s1 if _keep_first(s1, I1, s2, I2) else s2
    return a, I1, I2, extra, notes


def _rewrite_check(c: RatFun, own_shared: RatFun, a: RatFun) -> RatFun:
    """Express a factor's u-check through the shared representative.

    When u-check is exactly divisible (as a polynomial) by its own shared
    coordinate minus 2, the factor (own-2) is replaced by (a-2); on the
    constraint locus this is the same function, and it reproduces the
    simplified closed forms of twist chains.
    """
    if own_shared.equals(a):
        return c
    if not (c.is_poly() and own_shared.is_poly()):
        return c
    q = c.as_poly().divexact(own_shared.as_poly() - MultiPoly.const(2))
    if q is None:
        return c
    return RatFun(q) * (a - 2)


def _nondegeneracy(a: RatFun) -> tuple[MultiPoly, MultiPoly]:
    t = _t()
    return ((a - 2).num, (a + 2 - t * t).num)


def _dedup(polys: tuple[MultiPoly, ...]) -> tuple[MultiPoly, ...]:
    out: list[MultiPoly] = []
    for p in polys:
        if not any(p == q for q in out):
            out.append(p)
    return tuple(out)


def compose(direction: str, I1: InvariantData, I2: InvariantData) -> InvariantData:
    """Combine two factor records across *v (shared u) or *h (shared u-dot)."""
    if direction not in ("v", "h"):
        raise DomainError("direction must be 'v' or 'h'")
    a, J1, J2, extra, extra_notes = _unify(direction, I1, I2)
    if direction == "v":
        b1, b2 = J1.udot, J2.udot
    else:
        b1, b2 = J1.u, J2.u
    c1 = _rewrite_check(J1.ucheck, _shared(J1, direction), a)
    c2 = _rewrite_check(J2.ucheck, _shared(J2, direction), a)
    f, g = fg(a, b1, c1, b2, c2)
    if direction == "v":
        u, udot = a, f
    else:
        u, udot = f, a
    return InvariantData(
        J1.vars + J2.vars,
        u,
        udot,
        g,
        _dedup(J1.constraints + J2.constraints + extra),
        _dedup(J1.exclusions + J2.exclusions + _nondegeneracy(a)),
        J1.notes + J2.notes + extra_notes,
    )


def recover_grave_acute(I: InvariantData) -> tuple[RatFun, RatFun]:
    """The remaining two end-arc traces from (u, u-dot, u-check)."""
    t = _t()
    s = 2 * t * t - I.u * I.udot
    half = RatFun(1, 2)
    return (s + I.ucheck) * half, (s - I.ucheck) * half


# ---------------------------------------------------------------------------
# engine and closures
# ---------------------------------------------------------------------------


class InvariantEngine:
    """DFS evaluator; keeps every produced record for audit."""

    def __init__(self) -> None:
        self.history: list[InvariantData] = []
        self.atom_vars: list[str] = []  # fresh variable per twist atom, DFS order

    def run(self, expr: TangleExpr) -> InvariantData:
        if isinstance(expr, Rational):
            return self.run(expand_rational(expr.ks))
        if isinstance(expr, (IntTwist, VertTwist)):
            data = base_invariants(expr)
            self.atom_vars.append(data.vars[0])
        elif isinstance(expr, (CompV, CompH)):
            d = "v" if isinstance(expr, CompV) else "h"
            data = compose(d, self.run(expr.left), self.run(expr.right))
        else:
            raise DomainError(f"not a tangle node: {expr!r}")
        self.history.append(data)
        return data


def _canonical_map(names: tuple[str, ...]) -> dict[str, str]:
    return {name: f"r{i}" for i, name in enumerate(names, start=1)}


def _rename_data(I: InvariantData) -> InvariantData:
    m = _canonical_map(I.vars)
    out = I
    for old, new in m.items():
        out = _subst_data(out, old, RatFun.var(new))
    return InvariantData(
        tuple(m[v] for v in I.vars),
        out.u,
        out.udot,
        out.ucheck,
        out.constraints,
        out.exclusions,
        out.notes,
    )


def tangle_invariants(expr: TangleExpr) -> InvariantData:
    """Invariant record of a tangle with variables renamed to r1..rn in
    twist-region order."""
    return _rename_data(InvariantEngine().run(expr))


def closure_equations(c: ClosureExpr, engine: InvariantEngine | None = None) -> Presentation:
    """Defining equations of the excellent part of a knot closure.

    D closes over a top-level vertical composition, N over a horizontal
    one; the two factors share the unified coordinate and the closure
    forces the other coordinate to match and the u-checks to cancel.
    """
    n = component_count(c)
    if n != 1:
        raise WrongEngineError(
            f"closure has {n} components; this engine handles knots only"
        )
    body = c.body
    if isinstance(body, Rational):
        body = expand_rational(body.ks)
    want = CompV if c.kind == "D" else CompH
    if not isinstance(body, want):
        raise StructureError(
            f"{c.kind}-closure needs a top-level {'*v' if c.kind == 'D' else '*h'} "
            "composition; re-express the tangle accordingly"
        )
    direction = "v" if c.kind == "D" else "h"
    eng = engine if engine is not None else InvariantEngine()
    I1 = eng.run(body.left)
    I2 = eng.run(body.right)
    a, J1, J2, extra, extra_notes = _unify(direction, I1, I2)

    if direction == "v":
        diff = J1.udot - J2.udot
        diff_note = "closure: u-dot coordinates match"
    else:
        diff = J1.u - J2.u
        diff_note = "closure: u coordinates match"
    total = J1.ucheck + J2.ucheck

    exclusions = list(_dedup(J1.exclusions + J2.exclusions + _nondegeneracy(a)))
    equations: list[MultiPoly] = []
    notes: list[str] = []
    for p, note in zip(
        J1.constraints + J2.constraints + extra,
        J1.notes + J2.notes + extra_notes,
    ):
        equations.append(p)
        notes.append(note)
    for val, note in ((diff, diff_note), (total, "closure: u-checks cancel")):
        num, factors = clear_denominators(val, exclusions)
        equations.append(num)
        notes.append(note)
        for fpoly in factors:
            if not any(fpoly == q for q in exclusions):
                exclusions.append(fpoly)

    names = J1.vars + J2.vars
    m = _canonical_map(names)

    def rename_poly(p: MultiPoly) -> MultiPoly:
        for old, new in m.items():
            idx = REGISTRY.index(old)
            if idx in p.variables():
                p = p.subs_poly(idx, MultiPoly.var(new))
        return p

    return Presentation(
        ("t",) + tuple(m[v] for v in names),
        tuple(rename_poly(p) for p in equations),
        tuple(rename_poly(p) for p in exclusions if not p.is_const()),
        tuple(notes),
    )
