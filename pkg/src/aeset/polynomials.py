"""Exact sparse integer polynomials and the inner-product obstruction family.

Exponents and coefficients are Python ints, so exponents like 4 * 7**6 are
stored without loss.  Real roots are isolated with Sturm sequences over
exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath
from mpmath.ctx_iv import MPIntervalContext
import numpy as np

DEGREE_GUARD = 10_000


class SparsePoly:
    """Integer polynomial stored as ``{exponent: coefficient}``, no zero entries."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            e, c = int(e), int(c)
            if e < 0:
                raise ValueError("negative exponent")
            acc[e] = acc.get(e, 0) + c
        self._terms = {e: acc[e] for e in sorted(acc) if acc[e] != 0}

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> "SparsePoly":
        return cls({e: c})

    @classmethod
    def power_sum(cls, exponents: Iterable[int]) -> "SparsePoly":
        """sum_k X^{e_k}"""
        return cls((e, 1) for e in exponents)

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePoly):
            return self._terms == other._terms
        if isinstance(other, int):
            return self == SparsePoly({0: other})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"SparsePoly({self._terms})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for e, c in self._terms.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = "1" if e == 0 else ("X" if e == 1 else f"X^{e}")
            body = mono if mag == 1 and e else f"{mag}" if e == 0 else f"{mag}*{mono}"
            out.append(f"{sign} {body}")
        text = " ".join(out)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def coefficient(self, e: int) -> int:
        return self._terms.get(e, 0)

    @property
    def degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no degree")
        return next(reversed(self._terms))

    @property
    def min_degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no terms")
        return next(iter(self._terms))

    def support(self) -> list[int]:
        return list(self._terms)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly({e: -c for e, c in self._terms.items()})

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        return SparsePoly(list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        acc: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return SparsePoly(acc)

    def __pow__(self, k: int) -> "SparsePoly":
        out = SparsePoly({0: 1})
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, x: float) -> float:
        """Floating-point value (terms may underflow for large exponents)."""
        return float(sum(c * x ** e for e, c in self._terms.items()))

    def sign_at(self, x) -> int:
        return eval_sign(self, x)

    def to_json(self) -> list[dict[str, str]]:
        return [{"e": str(e), "c": str(c)} for e, c in self._terms.items()]

    @classmethod
    def from_json(cls, data: Sequence[Mapping[str, str]]) -> "SparsePoly":
        return cls((int(t["e"]), int(t["c"])) for t in data)


# -- the obstruction family -------------------------------------------------

def _check_distinct(indices: Sequence[int]) -> None:
    if len(set(indices)) != len(indices):
        raise ValueError(f"indices must be pairwise distinct, got {list(indices)}")
    if any(int(i) < 1 for i in indices):
        raise ValueError("indices must be positive integers")


def family_terms(p: int, h: Sequence[int], g: Sequence[int]) -> tuple[SparsePoly, SparsePoly]:
    """The two products whose difference defines the family member.

    ``first = (sum X^{3p^h})^2 * sum X^{2p^g} * sum X^{4p^g}`` and
    ``second = (sum X^{3p^g})^2 * sum X^{2p^h} * sum X^{4p^h}``.
    """
    ph = [p ** k for k in h]
    pg = [p ** k for k in g]
    cube_h = SparsePoly.power_sum(3 * e for e in ph)
    cube_g = SparsePoly.power_sum(3 * e for e in pg)
    first = cube_h * cube_h * SparsePoly.power_sum(2 * e for e in pg) * SparsePoly.power_sum(4 * e for e in pg)
    second = cube_g * cube_g * SparsePoly.power_sum(2 * e for e in ph) * SparsePoly.power_sum(4 * e for e in ph)
    return first, second


def poly_f_pair(p: int, i: int, j: int, k: int, l: int) -> SparsePoly:
    """f_{ij|kl}^{(p)}: compares the (k,l) pair against the (i,j) pair.

    ``(X^{3p^k}+X^{3p^l})^2 (X^{2p^i}+X^{2p^j}) (X^{4p^i}+X^{4p^j})`` minus the
    same expression with the pairs swapped.  In terms of
    :func:`poly_f_general` this is ``h = (k, l)``, ``g = (i, j)``.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    _check_distinct([i, j, k, l])
    first, second = family_terms(p, (k, l), (i, j))
    return first - second


def poly_f_general(p: int, h: Sequence[int], g: Sequence[int]) -> SparsePoly:
    """f_{h_1..h_s | g_1..g_s}^{(p)} for s >= 2 and p >= 7."""
    h, g = list(h), list(g)
    if len(h) != len(g):
        raise ValueError("h and g must have the same length")
    if len(h) < 2:
        raise ValueError("s must be >= 2")
    if p < 7:
        raise ValueError("p must be >= 7")
    _check_distinct(h + g)
    first, second = family_terms(p, h, g)
    return first - second


def diagonal_exponents(p: int, h: Sequence[int], g: Sequence[int]) -> list[int]:
    """Exponents 6p^{h_i} + 6p^{g_k} shared by both products."""
    return sorted(6 * p ** a + 6 * p ** b for a in h for b in g)


# -- exact evaluation ---------------------------------------------------------

def eval_sign(poly: SparsePoly, x) -> int:
    """Exact sign of ``poly(x)`` for rational ``x``.

    Tries interval arithmetic first; an enclosure that excludes zero is a
    proof of the sign.  Otherwise (at or very near a root) falls back to a
    homogenized sparse Horner over the integers: with ``x = n/q`` (q > 0)
    the value times ``q^deg`` is an integer with the same sign.
    """
    x = Fraction(x)
    if not poly:
        return 0
    if x != 0 and abs(x) != 1:
        for prec in (64, 256, 1024):
            sign = _interval_sign(poly, x, prec)
            if sign:
                return sign
    n, q = x.numerator, x.denominator
    items = list(poly)
    e_top, acc = items[-1]
    qpow = 1  # q^(deg - e) for the current exponent e
    for e, c in reversed(items[:-1]):
        gap = e_top - e
        qpow *= q ** gap
        acc = c * qpow + n ** gap * acc
        e_top = e
    lead = n ** e_top
    val = acc * lead
    return (val > 0) - (val < 0)


def _interval_sign(poly: SparsePoly, x: Fraction, prec: int) -> int:
    """Sign certified by an interval enclosure, or 0 if undecided."""
    iv = MPIntervalContext()  # private context: precision is context state
    iv.prec = prec
    xi = iv.mpf(x.numerator) / x.denominator
    total = iv.mpf(0)
    for e, c in poly:
        total += iv.mpf(c) * xi ** e
    if total.a > 0:
        return 1
    if total.b < 0:
        return -1
    return 0


# -- dense integer polynomials for Sturm ------------------------------------
# Coefficient lists are low-to-high and never carry trailing zeros.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _primitive(a: list[int]) -> list[int]:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return [c // g for c in a] if g > 1 else a


def _derivative(a: list[int]) -> list[int]:
    return _trim([k * a[k] for k in range(1, len(a))])


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of a by b up to a positive constant factor."""
    a = list(a)
    lb = b[-1]
    slb = 1 if lb > 0 else -1
    alb = abs(lb)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [alb * c for c in a]
        f = la * slb
        for k, bc in enumerate(b):
            a[shift + k] -= f * bc
        _trim(a)
    return _primitive(a)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    """Quotient a / b when b divides a over Q (result made primitive)."""
    a = [Fraction(c) for c in a]
    db = len(b) - 1
    q = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        coef = a[k + db] / b[-1]
        q[k] = coef
        for m, bc in enumerate(b):
            a[k + m] -= coef * bc
    if any(c != 0 for c in a[:db]):
        raise ArithmeticError("inexact polynomial division")
    den = 1
    for c in q:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return _primitive(_trim([int(c * den) for c in q]))


def _gcd(a: list[int], b: list[int]) -> list[int]:
    a, b = _primitive(list(a)), _primitive(list(b))
    while b:
        a, b = b, _prem(a, b)
    return _primitive(a)


def _sign_homog(a: list[int], n: int, q: int) -> int:
    """Sign of the dense polynomial ``a`` at ``n/q`` (q > 0)."""
    # Horner on sum a_k n^k q^(deg-k); q^(deg-k) > 0 leaves the sign intact.
    acc = 0
    qpow = 1
    for c in reversed(a):
        acc = acc * n + c * qpow
        qpow *= q
    return (acc > 0) - (acc < 0)


def _sturm_chain(a: list[int]) -> list[list[int]]:
    chain = [a, _primitive(_derivative(a))]
    while len(chain[-1]) > 1:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _variations(chain: list[list[int]], x: Fraction) -> int:
    signs = [s for s in (_sign_homog(c, x.numerator, x.denominator) for c in chain) if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


@dataclass(frozen=True)
class RealRoot:
    value: float
    interval: tuple[Fraction, Fraction]

    @property
    def exact(self) -> bool:
        return self.interval[0] == self.interval[1]


def real_roots(poly: SparsePoly, tol: float = 1e-9) -> list[RealRoot]:
    """All distinct real roots, each inside an exact rational bracket.

    0 and +-1 are found by exact division and reported with a degenerate
    bracket; every other root lies strictly inside ``(lo, hi)`` with
    ``hi - lo < tol`` and a sign change of the square-free part across it.
    """
    if not poly:
        raise ValueError("the zero polynomial has every real number as a root")
    if poly.degree > DEGREE_GUARD:
        raise ValueError(f"degree {poly.degree} exceeds the guard {DEGREE_GUARD}")
    tol_q = Fraction(tol)
    roots: list[RealRoot] = []
    m = poly.min_degree
    if m > 0:
        roots.append(RealRoot(0.0, (Fraction(0), Fraction(0))))
    dense = [0] * (poly.degree - m + 1)
    for e, c in poly:
        dense[e - m] = c
    dense = _primitive(dense)
    if len(dense) > 1:
        g = _gcd(dense, _derivative(dense))
        sq = _exact_div(dense, g) if len(g) > 1 else dense
        for r in (1, -1):
            if _sign_homog(sq, r, 1) == 0:
                roots.append(RealRoot(float(r), (Fraction(r), Fraction(r))))
                sq = _exact_div(sq, [-r, 1])
        if len(sq) > 1:
            roots.extend(_isolate(sq, tol_q))
    return sorted(roots, key=lambda r: r.value)


def _isolate(sq: list[int], tol: Fraction) -> list[RealRoot]:
    lead = abs(sq[-1])
    bound = 1 + Fraction(max(abs(c) for c in sq[:-1]), lead)
    chain = _sturm_chain(sq)
    out: list[RealRoot] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        count = _variations(chain, lo) - _variations(chain, hi)
        if count == 0:
            continue
        if count == 1:
            out.append(_refine(sq, lo, hi, tol))
            continue
        mid = _nonroot_mid(sq, lo, hi)
        stack.append((lo, mid))
        stack.append((mid, hi))
    return out


def _nonroot_mid(sq: list[int], lo: Fraction, hi: Fraction) -> Fraction:
    mid = (lo + hi) / 2
    step = (hi - lo) / 1024
    k = 1
    while _sign_homog(sq, mid.numerator, mid.denominator) == 0:
        mid = (lo + hi) / 2 + k * step
        k += 1
    return mid


def _refine(sq: list[int], lo: Fraction, hi: Fraction, tol: Fraction) -> RealRoot:
    # Exactly one root in (lo, hi]; the endpoints are never roots here.
    s_lo = _sign_homog(sq, lo.numerator, lo.denominator)
    while hi - lo >= tol:
        mid = (lo + hi) / 2
        s_mid = _sign_homog(sq, mid.numerator, mid.denominator)
        if s_mid == 0:
            return RealRoot(float(mid), (mid, mid))
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return RealRoot(float((lo + hi) / 2), (lo, hi))


# -- the published table ----------------------------------------------------

TABLE1_INDICES = ((1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3))

# Expansions as printed (coefficient of each exponent).
PRINTED_EXPANSIONS = {
    (1, 2, 3, 4): {64: -1, 66: 2, 68: -1, 76: 1, 82: 2, 84: -2, 88: -1, 92: -1,
                   96: -2, 98: 2, 104: 1, 112: -1, 114: 2, 116: -1},
    (1, 3, 2, 4): {48: -1, 54: 2, 72: -2, 78: 2, 84: -1, 96: -1, 102: 2, 108: -2,
                   126: 2, 132: -1},
    (1, 4, 2, 3): {44: 1, 48: -2, 52: 1, 64: -1, 76: -2, 78: 2, 86: 2, 88: -1,
                   92: -1, 94: 2, 102: 2, 104: -2, 116: -1, 128: 1, 132: -2, 136: 1},
}

TABLE1_ROOTS = {
    (1, 2, 3, 4): (-1.21341, -1, -0.824127, 0, 0.824127, 1, 1.21341),
    (1, 3, 2, 4): (-1.10104, -1, -0.908231, 0, 0.908231, 1, 1.10104),
    (1, 4, 2, 3): (-1.11046, -1, -0.900525, 0, 0.900525, 1, 1.11046),
}


def relative_sign(a: SparsePoly, b: SparsePoly) -> int:
    """+1 if a == b, -1 if a == -b, 0 otherwise."""
    if a == b:
        return 1
    if a == -b:
        return -1
    return 0


def merge_close(values: Iterable[float], tol: float = 1e-9) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out


@lru_cache(maxsize=None)
def _excluded(p: int) -> tuple[float, ...]:
    values = []
    for idx in TABLE1_INDICES:
        values.extend(r.value for r in real_roots(poly_f_pair(p, *idx)))
    return tuple(merge_close(values))


def excluded_values(p: int = 2) -> list[float]:
    """Sorted union of the real roots of f_{12|34}, f_{13|24}, f_{14|23}."""
    return list(_excluded(p))


# -- numeric forms of the parallelism condition ------------------------------

def _spread(values: list) -> "mpmath.mpf":
    # 1 - (sum a^3)^2 / (sum a^2 sum a^4), via the Lagrange identity
    # sum a^2 sum a^4 - (sum a^3)^2 = sum_{i<j} a_i^2 a_j^2 (a_i - a_j)^2.
    num = mpmath.mpf(0)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            ai, aj = values[i], values[j]
            num += (ai * aj * (ai - aj)) ** 2
    den = sum(a * a for a in values) * sum(a ** 4 for a in values)
    return num / den


def condition_gap(p: int, x, h: Sequence[int], g: Sequence[int], dps: int = 40) -> "mpmath.mpf":
    """LHS - RHS of the normalized inner-product equality for (h | g).

    ``(sum x^{3p^h})^2 / (sum x^{2p^h} sum x^{4p^h})`` minus the same ratio
    over g.  Zero exactly at roots of ``poly_f_general(p, h, g)``, with the
    same sign as that polynomial on (0, 1).  For pairs, ``h = (k, l)`` and
    ``g = (i, j)`` matches ``poly_f_pair(p, i, j, k, l)``.

    Returned as an mpmath number: the gap routinely falls below the double
    range once p^max(index) is large.
    """
    h, g = list(h), list(g)
    _check_distinct(h + g)
    with mpmath.workdps(dps):
        xm = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
        if not 0 < xm < 1:
            raise ValueError("x must lie in (0, 1)")
        a_h = [xm ** (p ** k) for k in h]
        a_g = [xm ** (p ** k) for k in g]
        return +(_spread(a_g) - _spread(a_h))


def relatable(u, v, u2, v2, tol: float = 1e-9) -> bool:
    """Whether one unitary (up to phases) can carry N(u)->N(u2) and N(v)->N(v2).

    For a pair of unit vectors this happens exactly when the overlap moduli
    agree.
    """
    vecs = [np.asarray(w, dtype=complex) for w in (u, v, u2, v2)]
    if any(np.linalg.norm(w) == 0 for w in vecs):
        raise ValueError("zero vector")
    n = [w / np.linalg.norm(w) for w in vecs]
    return bool(abs(abs(np.vdot(n[0], n[1])) - abs(np.vdot(n[2], n[3]))) <= tol)


def matching_exponents(first: SparsePoly, second: SparsePoly) -> set[int]:
    return set(first.support()) & set(second.support())


__all__ = [
    "SparsePoly", "poly_f_pair", "poly_f_general", "family_terms", "diagonal_exponents",
    "eval_sign", "real_roots", "RealRoot", "excluded_values", "condition_gap", "relatable",
    "TABLE1_INDICES", "TABLE1_ROOTS", "PRINTED_EXPANSIONS", "relative_sign", "merge_close",
    "matching_exponents",
]
