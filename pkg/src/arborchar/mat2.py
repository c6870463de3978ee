"""2x2 matrix algebra over SL(2,C), special constructors, and pair
decompositions.

One Mat2 class serves two scalar backends: exact Fractions (golden-value
tests) and double-precision complex numbers (Monte-Carlo sampling).  All
constructors keep det = 1 identically, so exact inputs give exact
unimodular output.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import ClassificationError, DomainError, GenericityError

Number = Union[int, Fraction, float, complex]

#: default absolute tolerance on entries and traces in double mode
TOL = 1e-9

#: samples closer than this to a vanishing denominator are rejected
CONDITION_FLOOR = 1e-6


def _is_exact(x: Number) -> bool:
    return isinstance(x, (int, Fraction))


def _inv(x: Number) -> Number:
    if _is_exact(x):
        if x == 0:
            raise DomainError("exact division by zero")
        return Fraction(1) / Fraction(x)
    return 1.0 / x


def _near(x: Number, y: Number, tol: float = TOL) -> bool:
    if _is_exact(x) and _is_exact(y):
        return x == y
    return abs(complex(x) - complex(y)) <= tol


@dataclass(frozen=True)
class Mat2:
    """An immutable 2x2 matrix; entries may be exact or complex."""

    a11: Number
    a12: Number
    a21: Number
    a22: Number

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1, 0, 0, 1)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )

    def __add__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22
        )

    def __sub__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a11, -self.a12, -self.a21, -self.a22)

    def scale(self, c: Number) -> "Mat2":
        return Mat2(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    def trace(self) -> Number:
        return self.a11 + self.a22

    def det(self) -> Number:
        return self.a11 * self.a22 - self.a12 * self.a21

    def adjoint(self) -> "Mat2":
        """Adjugate; satisfies m + m* = tr(m) * identity."""
        return Mat2(self.a22, -self.a12, -self.a21, self.a11)

    def inv(self) -> "Mat2":
        d = self.det()
        if _is_exact(d):
            if d == 0:
                raise DomainError("singular matrix")
        elif abs(complex(d)) < CONDITION_FLOOR:
            raise DomainError("numerically singular matrix")
        return self.adjoint().scale(_inv(d))

    def conj_by(self, c: "Mat2") -> "Mat2":
        """c * self * c^{-1}."""
        return c @ self @ c.inv()

    def is_exact(self) -> bool:
        return all(
            _is_exact(x) for x in (self.a11, self.a12, self.a21, self.a22)
        )

    def entries(self) -> tuple[Number, Number, Number, Number]:
        return (self.a11, self.a12, self.a21, self.a22)

    def norm(self) -> float:
        return max(abs(complex(x)) for x in self.entries())

    def approx_eq(self, o: "Mat2", tol: float = TOL) -> bool:
        return (self - o).norm() <= tol

    def in_G(self, tol: float = TOL) -> bool:
        """Unimodularity check: |det - 1| <= tol (exact equality if exact)."""
        d = self.det()
        if _is_exact(d):
            return d == 1
        return abs(complex(d) - 1) <= tol

    def to_complex(self) -> "Mat2":
        return Mat2(*(complex(x) for x in self.entries()))


IDENTITY = Mat2.identity()


# ---------------------------------------------------------------------------
# special matrices
# ---------------------------------------------------------------------------


def w() -> Mat2:
    return Mat2(0, 1, -1, 0)


def p() -> Mat2:
    return Mat2(1, 1, 0, 1)


def d(lam: Number) -> Mat2:
    return Mat2(lam, 0, 0, _inv(lam))


def u_plus(kappa: Number, xi: Number) -> Mat2:
    return Mat2(kappa, xi, 0, _inv(kappa))


def u_minus(kappa: Number, xi: Number) -> Mat2:
    return Mat2(kappa, 0, xi, _inv(kappa))


def h1(t: Number, lam: Number, mu: Number) -> Mat2:
    """Trace-t matrix pairing with d(lam); needs lam != -1 and mu != 0."""
    if _near(lam, -1):
        raise DomainError("h-matrix undefined at lam = -1")
    if _near(mu, 0):
        raise DomainError("h-matrix undefined at mu = 0")
    s = _inv(lam + 1)
    return Mat2(
        s * lam * t,
        s * mu,
        s * (t * t - lam - _inv(lam) - 2) * lam * _inv(mu),
        s * t,
    )


def h2(t1: Number, t2: Number, lam: Number, mu: Number) -> Mat2:
    """Two-trace h-matrix; trace t1; needs lam != +-1 and mu != 0."""
    if _near(lam, 1) or _near(lam, -1):
        raise DomainError("two-trace h-matrix undefined at lam = +-1")
    if _near(mu, 0):
        raise DomainError("two-trace h-matrix undefined at mu = 0")
    li = _inv(lam)
    dl = delta_two_trace(t1, t2, lam)
    s = _inv(lam - li)
    return Mat2(
        s * (lam * t1 - t2),
        s * mu,
        s * dl * _inv(mu),
        s * (t2 - li * t1),
    )


def delta_two_trace(t1: Number, t2: Number, lam: Number) -> Number:
    li = _inv(lam)
    return (lam + li) * t1 * t2 - t1 * t1 - t2 * t2 - (lam - li) ** 2


def k1(t: Number, alpha: Number) -> Mat2:
    """Trace-t matrix pairing with -p; needs t != 0."""
    if _near(t, 0):
        raise DomainError("k-matrix undefined at t = 0")
    half = _half(t)
    return Mat2(
        alpha + half,
        _inv(2 * t) * (half * half - 1 - alpha * alpha),
        2 * t,
        -alpha + half,
    )


def k2(t1: Number, t2: Number, alpha: Number) -> Mat2:
    """Two-trace k-matrix; trace t1; needs t1 + t2 != 0."""
    if _near(t1 + t2, 0):
        raise DomainError("two-trace k-matrix undefined at t1 + t2 = 0")
    half = _half(t1)
    return Mat2(
        alpha + half,
        _inv(t1 + t2) * (half * half - 1 - alpha * alpha),
        t1 + t2,
        -alpha + half,
    )


def k_lambda(t: Number, lam: Number, alpha: Number) -> Mat2:
    """Limit form interpolating k1 (lam = -1) and the h-parametrization.

    The top-right entry is solved from det = 1, which needs the bottom-left
    entry to be nonzero.
    """
    li = _inv(lam)
    half = _half(t)
    c21 = (lam - li) * alpha + (2 - lam - li) * half
    if _near(c21, 0):
        raise DomainError(
            "k-lambda matrix needs (lam - 1/lam)*alpha + (2 - lam - 1/lam)*t/2 != 0"
        )
    star = (half * half - alpha * alpha - 1) * _inv(c21)
    return Mat2(alpha + half, star, c21, -alpha + half)


def _half(t: Number) -> Number:
    return Fraction(t) / 2 if _is_exact(t) else t / 2


_SPECIAL = {
    "w": lambda: w(),
    "p": lambda: p(),
    "d": d,
    "u_plus": u_plus,
    "u_minus": u_minus,
    "h1": h1,
    "h2": h2,
    "k1": k1,
    "k2": k2,
    "k_lambda": k_lambda,
}


def special(kind: str, *params: Number) -> Mat2:
    """Uniform entry point for the named constructors."""
    try:
        ctor = _SPECIAL[kind]
    except KeyError:
        raise DomainError(f"unknown special matrix kind {kind!r}") from None
    return ctor(*params)


# ---------------------------------------------------------------------------
# Chebyshev-like recursions and matrix powers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChebyshevPair:
    """omega_n and theta_n at a common argument r = eta + 1/eta."""

    omega: Number
    theta: Number


def chebyshev(n: int, r: Number) -> ChebyshevPair:
    """Evaluate both second- and first-kind sequences at integer n.

    omega_0 = 0, omega_1 = 1; theta_0 = 2, theta_1 = r; both satisfy
    s_{n+1} = r*s_n - s_{n-1}, extended to negative n by omega_{-n} =
    -omega_n and theta_{-n} = theta_n.  Works for any scalar (or
    polynomial) argument, including the degenerate r = +-2.
    """
    m = abs(n)
    om_prev, om = 0, 1  # omega_0, omega_1
    th_prev, th = 2, r  # theta_0, theta_1
    if m == 0:
        return ChebyshevPair(0 * r, 2 + 0 * r)
    for _ in range(m - 1):
        om_prev, om = om, r * om - om_prev
        th_prev, th = th, r * th - th_prev
    if n < 0:
        om = -om
    return ChebyshevPair(om, th)


def cayley_power(z: Mat2, n: int, tol: float = TOL) -> Mat2:
    """z^n via the trace recursion instead of repeated multiplication."""
    if not z.in_G(tol):
        raise DomainError("cayley_power requires det = 1")
    r = z.trace()
    om_n = chebyshev(n, r).omega
    om_prev = chebyshev(n - 1, r).omega
    return z.scale(om_n) - IDENTITY.scale(om_prev)


# ---------------------------------------------------------------------------
# pair decompositions (single- and two-trace)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    lemma: str  # "single" or "two_trace"
    case: str  # "a" | "b" | "c" | "d"
    params: dict = field(default_factory=dict)
    sign_flipped: bool = False  # +p handled through (-a1)a2 = -p
    rebuilt: tuple[Mat2, Mat2] | None = None


def _sqrt(x: Number) -> complex:
    return cmath.sqrt(complex(x))


def _kappa_of_trace(t: Number) -> complex:
    """One eigenvalue kappa with kappa + 1/kappa = t."""
    t = complex(t)
    return (t + _sqrt(t * t - 4)) / 2


def is_reducible(a1: Mat2, a2: Mat2, tol: float = TOL) -> bool:
    """Trace criterion for a shared eigenvector.

    tau^2 - t1*t2*tau + t1^2 + t2^2 - 4 = 0, which at t1 = t2 = t factors
    as (tau - 2)(tau - (t^2 - 2)).
    """
    t1 = a1.trace()
    t2 = a2.trace()
    tau = (a1 @ a2).trace()
    val = tau * tau - t1 * t2 * tau + t1 * t1 + t2 * t2 - 4
    if _is_exact(val):
        return val == 0
    return abs(complex(val)) <= tol


def has_common_eigenvector(a1: Mat2, a2: Mat2, tol: float = TOL) -> bool:
    """Direct eigenvector search; the oracle's independent reducibility test."""
    m1 = a1.to_complex()
    for v in _eigenvectors(m1, tol):
        w_ = (
            a2.to_complex().a11 * v[0] + a2.to_complex().a12 * v[1],
            a2.to_complex().a21 * v[0] + a2.to_complex().a22 * v[1],
        )
        cross = w_[0] * v[1] - w_[1] * v[0]
        if abs(cross) <= tol * max(1.0, abs(w_[0]) + abs(w_[1])):
            return True
    return False


def _eigenvectors(m: Mat2, tol: float) -> list[tuple[complex, complex]]:
    tr = complex(m.trace())
    disc = _sqrt(tr * tr - 4 * complex(m.det()))
    out = []
    for lam in ((tr + disc) / 2, (tr - disc) / 2):
        # rows of m - lam*e are proportional; take a kernel vector
        r1 = (complex(m.a11) - lam, complex(m.a12))
        r2 = (complex(m.a21), complex(m.a22) - lam)
        row = r1 if abs(r1[0]) + abs(r1[1]) >= abs(r2[0]) + abs(r2[1]) else r2
        if abs(row[0]) + abs(row[1]) <= tol:
            out.extend([(1.0, 0.0), (0.0, 1.0)])
        else:
            out.append((-row[1], row[0]))
    return out


def decompose_pair(
    a1: Mat2, a2: Mat2, t1: Number, t2: Number, tol: float = TOL
) -> DecompositionReport:
    """Classify a1*a2 against the canonical forms and recover parameters.

    Single-trace products d(lam), p, -p and two-trace products d(lam),
    d(kappa1^e1 * kappa2^e2), -p are recognized; +p is routed through the
    sign trick (-a1)a2 = -p and flagged.  Rebuilding the pair from the
    report reproduces the input.
    """
    if not _near(a1.trace(), t1, tol) or not _near(a2.trace(), t2, tol):
        raise DomainError("matrix traces do not match the stated t1, t2")
    single = _near(t1, t2, tol)
    m = a1 @ a2

    diag = abs(complex(m.a12)) <= tol and abs(complex(m.a21)) <= tol
    if diag:
        lam = m.a11
        if single:
            return _decompose_single_diag(a1, a2, t1, lam, tol)
        return _decompose_two_diag(a1, a2, t1, t2, lam, tol)

    if m.approx_eq(-p(), tol):
        return _decompose_minus_p(a1, a2, t1, t2, tol, flipped=False)
    if m.approx_eq(p(), tol):
        if single:
            # single-trace pairs with product exactly +p: u+ parametrization
            return _decompose_single_p(a1, a2, t1, tol)
        # two-trace +p handled through (-a1)*a2 = -p
        return _decompose_minus_p(-a1, a2, -t1, t2, tol, flipped=True)
    raise ClassificationError("product is not d(lam), p, or -p")


def _decompose_single_diag(
    a1: Mat2, a2: Mat2, t: Number, lam: Number, tol: float
) -> DecompositionReport:
    s = lam + _inv(lam)
    for bad, label in ((2, "lam + 1/lam = 2"), (-2, "lam + 1/lam = -2"),
                       (t * t - 2, "lam + 1/lam = t^2 - 2")):
        if _near(s, bad, tol):
            raise GenericityError(f"excluded diagonal product: {label}")
    mu = a2.a12 * (lam + 1)
    rebuilt = (h1(t, lam, -lam * mu), h1(t, lam, mu))
    if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
        raise ClassificationError("h-parametrization failed to rebuild the pair")
    return DecompositionReport("single", "a", {"lam": lam, "mu": mu}, False, rebuilt)


def _decompose_single_p(a1: Mat2, a2: Mat2, t: Number, tol: float) -> DecompositionReport:
    kappa = a2.a11
    xi = a1.a12
    rebuilt = (u_plus(_inv(kappa), xi), u_plus(kappa, kappa - xi))
    if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
        raise ClassificationError("u+ parametrization failed to rebuild the pair")
    return DecompositionReport("single", "b", {"kappa": kappa, "xi": xi}, False, rebuilt)


def _decompose_minus_p(
    a1: Mat2, a2: Mat2, t1: Number, t2: Number, tol: float, flipped: bool
) -> DecompositionReport:
    single = _near(t1, t2, tol)
    if single:
        if _near(t1, 0, tol):
            raise GenericityError("-p decomposition needs t != 0")
        alpha = a1.a11 - _half(t1)
        rebuilt = (k1(t1, alpha), k1(t1, alpha - t1))
        if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
            raise ClassificationError("k-parametrization failed to rebuild the pair")
        rep = DecompositionReport("single", "c", {"alpha": alpha}, flipped, rebuilt)
        return rep
    if _near(t1 + t2, 0, tol):
        # two-trace case (c): a2 upper-triangular with eigenvalue entry
        eps_base = a2.a11
        xi = a2.a12 - eps_base
        rebuilt = (u_plus(-_inv(eps_base), xi), u_plus(eps_base, xi + eps_base))
        if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
            raise ClassificationError("u+ parametrization failed (two-trace -p)")
        return DecompositionReport(
            "two_trace", "c", {"kappa2_eps": eps_base, "xi": xi}, flipped, rebuilt
        )
    alpha = a2.a11 - _half(t2)
    rebuilt = (k2(t1, t2, alpha + _half(t1 + t2)), k2(t2, t1, alpha))
    if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
        raise ClassificationError("k-parametrization failed (two-trace -p)")
    return DecompositionReport("two_trace", "d", {"alpha": alpha}, flipped, rebuilt)


def _decompose_two_diag(
    a1: Mat2, a2: Mat2, t1: Number, t2: Number, lam: Number, tol: float
) -> DecompositionReport:
    if _near(lam, 1, tol) or _near(lam, -1, tol):
        raise GenericityError("excluded diagonal product: lam = +-1")
    kap1 = _kappa_of_trace(t1)
    kap2 = _kappa_of_trace(t2)
    for e1 in (1, -1):
        for e2 in (1, -1):
            if abs(complex(lam) - kap1**e1 * kap2**e2) <= _loose(tol):
                return _decompose_two_diag_uform(
                    a1, a2, kap1**e1, kap2**e2, tol
                )
    mu = a2.a12 * (lam - _inv(lam))
    rebuilt = (h2(t1, t2, lam, -lam * mu), h2(t2, t1, lam, mu))
    if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
        raise ClassificationError("two-trace h-parametrization failed to rebuild")
    return DecompositionReport("two_trace", "a", {"lam": lam, "mu": mu}, False, rebuilt)


def _decompose_two_diag_uform(
    a1: Mat2, a2: Mat2, k1e: complex, k2e: complex, tol: float
) -> DecompositionReport:
    if abs(complex(a2.a21)) <= _loose(tol):
        alpha = k2e * complex(a2.a12)
        rebuilt = (u_plus(k1e, -k1e * alpha), u_plus(k2e, alpha / k2e))
        form = "u_plus"
    else:
        alpha = complex(a2.a21) / k2e
        rebuilt = (u_minus(k1e, -alpha / k1e), u_minus(k2e, k2e * alpha))
        form = "u_minus"
    if not (rebuilt[0].approx_eq(a1, _loose(tol)) and rebuilt[1].approx_eq(a2, _loose(tol))):
        raise ClassificationError("triangular parametrization failed to rebuild")
    return DecompositionReport(
        "two_trace",
        "b",
        {"kappa1_eps": k1e, "kappa2_eps": k2e, "alpha": alpha, "form": form},
        False,
        rebuilt,
    )


def _loose(tol: float) -> float:
    # rebuild checks involve a couple of extra arithmetic steps
    return 100 * tol


# ---------------------------------------------------------------------------
# closed-form traces
# ---------------------------------------------------------------------------


def closed_trace(form: str, **kw: Number) -> Number:
    """Closed forms for tr(m^{-1} m') over the h/k families."""
    if form == "h1_inv_h1":
        t, lam, mu, nu = kw["t"], kw["lam"], kw["mu"], kw["nu"]
        s = lam + _inv(lam) + 2
        if _near(s, 0) or _near(s, 4):
            raise DomainError("degenerate denominator: lam + 1/lam = +-2")
        return _inv(s) * (
            2 * t * t + (s - t * t) * (mu * _inv(nu) + _inv(mu) * nu)
        )
    if form in ("h2_inv_h2_same", "h2_inv_h2_swapped"):
        t1, t2, lam, mu, nu = kw["t1"], kw["t2"], kw["lam"], kw["mu"], kw["nu"]
        tau = lam + _inv(lam)
        if _near(tau, 2) or _near(tau, -2):
            raise DomainError("degenerate denominator: tau = +-2")
        dl = delta_two_trace(t1, t2, lam)
        ratio = mu * _inv(nu) + _inv(mu) * nu
        if form == "h2_inv_h2_same":
            return 2 - dl * (ratio - 2) * _inv(tau * tau - 4)
        return t1 * t2 - tau - dl * (ratio + tau) * _inv(tau * tau - 4)
    if form == "k2_inv_k2_same":
        alpha, beta = kw["alpha"], kw["beta"]
        return (alpha - beta) ** 2 + 2
    if form == "k2_inv_k2_swapped":
        t1, t2, alpha, beta = kw["t1"], kw["t2"], kw["alpha"], kw["beta"]
        quarter = _half(_half(1))
        return (alpha - beta) ** 2 + 2 - quarter * (t1 - t2) ** 2
    raise DomainError(f"unknown closed-trace form {form!r}")
