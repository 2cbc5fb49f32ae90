"""Sparse multivariate polynomials over exact rationals with weighted gradings.

A polynomial lives in a fixed :class:`WeightSystem` (ordered variable names
with positive integer weights) and stores a map from exponent tuples to
nonzero ``Fraction`` coefficients.  Everything is exact; no floating point.

The canonical monomial order is graded lexicographic: compare weighted
degrees first, break ties lexicographically on the exponent tuple in the
declared variable order.  This is a genuine monomial order (multiplicative
and a well-order), so exact division of a polynomial by a single divisor via
repeated leading-term elimination is sound: it succeeds if and only if the
divisor divides exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Sequence

Exponents = tuple[int, ...]


class _Mixed:
    """Sentinel for the weighted degree of an inhomogeneous polynomial."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "MIXED"


MIXED = _Mixed()


@dataclass(frozen=True)
class WeightSystem:
    """An ordered tuple of variable names with positive integer weights."""

    names: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.weights):
            raise ValueError("one weight per variable required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be pairwise distinct")
        if any(w <= 0 or not isinstance(w, int) for w in self.weights):
            raise ValueError("weights must be strictly positive integers")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def wdeg(self, exps: Exponents) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def zero(self) -> "Polynomial":
        return Polynomial._make(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return Polynomial._make(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Polynomial":
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return Polynomial._make(self, {tuple(exps): Fraction(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def monomial(self, exps: Mapping[str, int] | Sequence[int], coeff=1) -> "Polynomial":
        if isinstance(exps, Mapping):
            vec = [0] * self.nvars
            for name, e in exps.items():
                vec[self.index(name)] = e
            exps = vec
        exps = tuple(exps)
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            raise ValueError(f"bad exponent vector {exps}")
        c = Fraction(coeff)
        if c == 0:
            return self.zero()
        return Polynomial._make(self, {exps: c})


def ws(*pairs: tuple[str, int]) -> WeightSystem:
    """Shorthand: ``ws(("x", 1), ("y", 2))``."""
    return WeightSystem(tuple(n for n, _ in pairs), tuple(w for _, w in pairs))


class Polynomial:
    """Immutable sparse polynomial over a :class:`WeightSystem`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeightSystem, terms: Mapping[Exponents, object]):
        clean: dict[Exponents, Fraction] = {}
        n = ring.nvars
        for exps, c in terms.items():
            exps = tuple(exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps}")
            c = Fraction(c)
            if c != 0:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})

    @staticmethod
    def _make(ring: WeightSystem, terms: dict[Exponents, Fraction]) -> "Polynomial":
        p = object.__new__(Polynomial)
        object.__setattr__(p, "ring", ring)
        object.__setattr__(p, "terms", terms)
        return p

    def __setattr__(self, *args) -> None:
        raise AttributeError("Polynomial is immutable")

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def variables(self) -> tuple[int, ...]:
        """Indices of variables that actually occur."""
        seen = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    seen.add(i)
        return tuple(sorted(seen))

    def coefficient(self, exps: Mapping[str, int] | Sequence[int]) -> Fraction:
        if isinstance(exps, Mapping):
            vec = [0] * self.ring.nvars
            for name, e in exps.items():
                vec[self.ring.index(name)] = e
            exps = vec
        return self.terms.get(tuple(exps), Fraction(0))

    def _key(self, exps: Exponents) -> tuple[int, Exponents]:
        return (self.ring.wdeg(exps), exps)

    def leading(self) -> tuple[Exponents, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=self._key)
        return exps, self.terms[exps]

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in canonical (descending) order."""
        return [(e, self.terms[e]) for e in sorted(self.terms, key=self._key, reverse=True)]

    def weighted_degree(self):
        """Common weighted degree of all terms, or MIXED if inhomogeneous."""
        if not self.terms:
            raise ValueError("zero polynomial has no weighted degree")
        degs = {self.ring.wdeg(e) for e in self.terms}
        if len(degs) > 1:
            return MIXED
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return self.is_zero() or self.weighted_degree() is not MIXED

    def ordinary_degree(self, exps: Exponents) -> int:
        return sum(exps)

    def min_ordinary_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial")
        return min(sum(e) for e in self.terms)

    def ordinary_jet(self, d: int) -> "Polynomial":
        """The part of total (unweighted) degree exactly ``d``."""
        return Polynomial._make(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def linear_part(self) -> "Polynomial":
        return self.ordinary_jet(1)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in q.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._make(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._make(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        if not self.terms or not q.terms:
            return self.ring.zero()
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in q.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._make(self.ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            inv = Fraction(1, 1) / Fraction(other)
            return Polynomial._make(self.ring, {e: c * inv for e, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    # -- calculus and structure --------------------------------------------

    def partial(self, var: str) -> "Polynomial":
        """Formal partial derivative with respect to a named variable."""
        i = self.ring.index(var)
        out: dict[Exponents, Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e:
                de = exps[:i] + (e - 1,) + exps[i + 1 :]
                s = out.get(de, Fraction(0)) + c * e
                if s:
                    out[de] = s
                else:
                    out.pop(de, None)
        return Polynomial._make(self.ring, out)

    def substitute(
        self,
        images: Mapping[str, "Polynomial"],
        target: WeightSystem | None = None,
    ) -> "Polynomial":
        """Exact composition: replace each occurring variable by its image.

        All images must live in one common target ring; a variable that
        occurs in ``self`` but has no image raises ``KeyError``.
        """
        if target is None:
            for img in images.values():
                target = img.ring
                break
        if target is None:
            raise ValueError("no target ring: pass target= for constant substitutions")
        for img in images.values():
            if img.ring != target:
                raise ValueError("images live in different rings")
        img_by_index: dict[int, Polynomial] = {}
        for name, img in images.items():
            img_by_index[self.ring.index(name)] = img
        occurring = self.variables()
        for i in occurring:
            if i not in img_by_index:
                raise KeyError(f"missing image for variable {self.ring.names[i]!r}")
        # Cache powers of each image up to the maximal exponent used.
        max_exp = {i: 0 for i in occurring}
        for exps in self.terms:
            for i in occurring:
                if exps[i] > max_exp[i]:
                    max_exp[i] = exps[i]
        powers: dict[int, list[Polynomial]] = {}
        for i in occurring:
            ps = [target.one()]
            for _ in range(max_exp[i]):
                ps.append(ps[-1] * img_by_index[i])
            powers[i] = ps
        out = target.zero()
        for exps, c in self.terms.items():
            term = target.const(c)
            for i in occurring:
                if exps[i]:
                    term = term * powers[i][exps[i]]
            out = out + term
        return out

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        _, c = self.leading()
        return self / c

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = [
                self.ring.names[i] + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            ]
            if not factors:
                body = str(abs(c))
            else:
                mono = "*".join(factors)
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"Polynomial({self})"


# -- module-level operations -------------------------------------------------


def exact_divide(p: Polynomial, q: Polynomial) -> Optional[Polynomial]:
    """Return ``r`` with ``q * r == p`` exactly, or None if no such r exists.

    Repeated leading-term division in the canonical order: at every step the
    leading term of the running remainder must be divisible by the leading
    term of ``q``, otherwise ``q`` does not divide ``p``.
    """
    if p.ring != q.ring:
        raise ValueError("ring mismatch")
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return p
    qe, qc = q.leading()
    rem = dict(p.terms)
    out: dict[Exponents, Fraction] = {}
    key = p._key
    while rem:
        le = max(rem, key=key)
        lc = rem[le]
        de = tuple(a - b for a, b in zip(le, qe))
        if any(e < 0 for e in de):
            return None
        c = lc / qc
        out[de] = c
        for e2, c2 in q.terms.items():
            e = tuple(a + b for a, b in zip(de, e2))
            s = rem.get(e, Fraction(0)) - c * c2
            if s:
                rem[e] = s
            else:
                rem.pop(e, None)
    return Polynomial._make(p.ring, out)


def _content_free(p: Polynomial) -> tuple[Exponents, Polynomial]:
    """Split off the largest common monomial factor."""
    if p.is_zero():
        return (0,) * p.ring.nvars, p
    mins = None
    for exps in p.terms:
        if mins is None:
            mins = list(exps)
        else:
            mins = [min(a, b) for a, b in zip(mins, exps)]
        if not any(mins):
            break
    mins = tuple(mins)
    if not any(mins):
        return mins, p
    stripped = {tuple(a - b for a, b in zip(e, mins)): c for e, c in p.terms.items()}
    return mins, Polynomial._make(p.ring, stripped)


def _coeffs_in(p: Polynomial, vi: int) -> dict[int, Polynomial]:
    """View ``p`` as univariate in variable ``vi`` with polynomial coefficients."""
    buckets: dict[int, dict[Exponents, Fraction]] = {}
    for exps, c in p.terms.items():
        d = exps[vi]
        red = exps[:vi] + (0,) + exps[vi + 1 :]
        buckets.setdefault(d, {})[red] = c
    return {d: Polynomial._make(p.ring, t) for d, t in buckets.items()}


def _from_coeffs(ring: WeightSystem, vi: int, coeffs: Mapping[int, Polynomial]) -> Polynomial:
    out: dict[Exponents, Fraction] = {}
    for d, poly in coeffs.items():
        for exps, c in poly.terms.items():
            e = exps[:vi] + (exps[vi] + d,) + exps[vi + 1 :]
            out[e] = c
    return Polynomial._make(ring, out)


def _deg_in(p: Polynomial, vi: int) -> int:
    return max((e[vi] for e in p.terms), default=-1)


def _lead_coeff_in(p: Polynomial, vi: int) -> Polynomial:
    d = _deg_in(p, vi)
    terms = {
        e[:vi] + (0,) + e[vi + 1 :]: c for e, c in p.terms.items() if e[vi] == d
    }
    return Polynomial._make(p.ring, terms)


def _prem(a: Polynomial, b: Polynomial, vi: int) -> Polynomial:
    """Standard pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b."""
    da, db = _deg_in(a, vi), _deg_in(b, vi)
    lb = _lead_coeff_in(b, vi)
    steps = da - db + 1
    r = a
    while not r.is_zero():
        dr = _deg_in(r, vi)
        if dr < db:
            break
        lr = _lead_coeff_in(r, vi)
        shift = r.ring.monomial(
            tuple(dr - db if i == vi else 0 for i in range(r.ring.nvars))
        )
        r = lb * r - lr * shift * b
        steps -= 1
    # Pad to the standard normalization so subresultant divisors stay exact.
    for _ in range(steps):
        r = r * lb
    return r


def _gcd_many(polys: Sequence[Polynomial]) -> Polynomial:
    ring = polys[0].ring
    ordered = sorted(polys, key=lambda p: len(p.terms))
    g = ring.zero()
    for p in ordered:
        g = _gcd(g, p)
        if g.is_constant() and not g.is_zero():
            return ring.one()
    return g


def _primitive(p: Polynomial, vi: int) -> tuple[Polynomial, Polynomial]:
    """Content (a polynomial not involving ``vi``) and primitive part."""
    if p.is_zero():
        return p.ring.one(), p
    coeffs = _coeffs_in(p, vi)
    if len(coeffs) == 1:
        (d, c), = coeffs.items()
        return c, _from_coeffs(p.ring, vi, {d: p.ring.one()})
    cont = _gcd_many(list(coeffs.values()))
    if cont.is_constant():
        return p.ring.one(), p
    pp = exact_divide(p, cont)
    assert pp is not None
    return cont, pp


def _pick_main_variable(p: Polynomial, q: Polynomial) -> int:
    """Variable minimizing the smaller degree (short remainder sequences)."""
    best = None
    for vi in sorted(set(p.variables()) | set(q.variables())):
        dp, dq = _deg_in(p, vi), _deg_in(q, vi)
        score = (min(dp, dq), dp + dq, vi)
        if best is None or score < best:
            best = score
    assert best is not None
    return best[2]


def _gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Unnormalized gcd by a subresultant remainder sequence, one variable
    at a time (contents recurse into fewer variables)."""
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    # Strip common monomial content first; it recombines at the end.
    mp, p0 = _content_free(p)
    mq, q0 = _content_free(q)
    mono = tuple(min(a, b) for a, b in zip(mp, mq))
    if not p0.variables() or not q0.variables():
        return p.ring.monomial(mono)
    vi = _pick_main_variable(p0, q0)
    dp, dq = _deg_in(p0, vi), _deg_in(q0, vi)
    if dp == 0 or dq == 0:
        # One side does not involve the main variable: gcd divides its
        # terms, so recurse against the other side's content.
        if dp == 0:
            other_cont = _gcd_many(list(_coeffs_in(q0, vi).values()))
            g = _gcd(p0, other_cont)
        else:
            other_cont = _gcd_many(list(_coeffs_in(p0, vi).values()))
            g = _gcd(q0, other_cont)
        return g * p.ring.monomial(mono)
    cp, a = _primitive(p0, vi)
    cq, b = _primitive(q0, vi)
    c = _gcd(cp, cq)
    if _deg_in(a, vi) < _deg_in(b, vi):
        a, b = b, a
    # Subresultant sequence: divide each pseudo-remainder by g*h^delta, an
    # exact division that controls coefficient growth without per-step
    # content computations.
    one = p.ring.one()
    g_coef, h_coef = one, one
    while True:
        delta = _deg_in(a, vi) - _deg_in(b, vi)
        r = _prem(a, b, vi)
        if r.is_zero():
            break
        if _deg_in(r, vi) == 0:
            return c * p.ring.monomial(mono)  # gcd constant in vi: only contents survive
        divisor = g_coef * h_coef**delta
        nb = exact_divide(r, divisor)
        assert nb is not None, "subresultant division must be exact"
        a, b = b, nb
        g_coef = _lead_coeff_in(a, vi)
        if delta >= 1:
            num = g_coef**delta
            if delta > 1:
                nh = exact_divide(num, h_coef ** (delta - 1))
                assert nh is not None
                h_coef = nh
            else:
                h_coef = num
    _, b = _primitive(b, vi)
    return c * b * p.ring.monomial(mono)


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic greatest common divisor (leading coefficient 1)."""
    if p.ring != q.ring:
        raise ValueError("ring mismatch")
    if p.is_zero() and q.is_zero():
        return p.ring.zero()
    g = _gcd(p, q)
    return g.monic()


def is_squarefree(p: Polynomial) -> bool:
    """True iff gcd(p, all partial derivatives) is constant (char 0).

    For weighted-homogeneous p the Euler identity makes p itself redundant
    in the gcd chain, so only the (smaller) partials are combined.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    partials = [p.partial(p.ring.names[i]) for i in p.variables()]
    if not partials:
        return True  # nonzero constant
    partials.sort(key=lambda q: len(q.terms))
    g = p.ring.zero() if p.is_homogeneous() else p
    for dq in partials:
        g = _gcd(g, dq)
        if not g.is_zero() and g.is_constant():
            return True
    return g.is_constant() and not g.is_zero()


def weighted_degree(p: Polynomial):
    return p.weighted_degree()


@lru_cache(maxsize=None)
def _monomials_rec(weights: tuple[int, ...], d: int) -> tuple[Exponents, ...]:
    if not weights:
        return ((),) if d == 0 else ()
    w = weights[0]
    out = []
    for e in range(d // w, -1, -1):
        for rest in _monomials_rec(weights[1:], d - e * w):
            out.append((e,) + rest)
    return tuple(out)


def monomials_of_weighted_degree(ring: WeightSystem, d: int) -> tuple[Exponents, ...]:
    """All exponent vectors of weighted degree ``d``, in descending lex order."""
    if d < 0:
        return ()
    return _monomials_rec(ring.weights, d)
