"""Vector fields with polynomial coefficients and Saito-criterion machinery.

A derivation is a tuple of coefficient polynomials, one per variable of its
ring.  The central primitives:

* ``is_tangent``: divide delta(h) by h exactly to produce a tangency witness;
* ``verify_saito``: certify that n fields form a free basis for V(h), by
  checking h squarefree, every field tangent, and the coefficient
  determinant equal to a nonzero rational multiple of h;
* ``solve_logarithmic``: for weighted-homogeneous h, compute a minimal
  graded generating set of the tangent fields up to a weight bound by exact
  linear algebra in each graded slice;
* ``find_saito_basis``: search the generators for a subset whose weights
  are forced by the determinant grading and which certifies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from freediv.polylinalg import (
    PolyMatrix,
    RankTracker,
    kernel_basis,
    normalize_vector,
    solve_linear,
)
from freediv.polyring import (
    MIXED,
    Polynomial,
    WeightSystem,
    exact_divide,
    is_squarefree,
    monomials_of_weighted_degree,
)


@dataclass(frozen=True)
class Derivation:
    """delta = sum_i coefficients[i] * d/d(x_i)."""

    ring: WeightSystem
    coefficients: tuple[Polynomial, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != self.ring.nvars:
            raise ValueError("one coefficient per variable required")
        for c in self.coefficients:
            if c.ring != self.ring:
                raise ValueError("coefficient in wrong ring")

    @staticmethod
    def from_dict(ring: WeightSystem, coeffs: dict[str, Polynomial]) -> "Derivation":
        vec = [ring.zero()] * ring.nvars
        for name, p in coeffs.items():
            vec[ring.index(name)] = p
        return Derivation(ring, tuple(vec))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def apply(self, p: Polynomial) -> Polynomial:
        if p.ring != self.ring:
            raise ValueError("ring mismatch")
        out = self.ring.zero()
        for name, c in zip(self.ring.names, self.coefficients):
            if not c.is_zero():
                out = out + c * p.partial(name)
        return out

    def __call__(self, p: Polynomial) -> Polynomial:
        return self.apply(p)

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.ring != self.ring:
            raise ValueError("ring mismatch")
        return Derivation(
            self.ring, tuple(a + b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-other)

    def __neg__(self) -> "Derivation":
        return Derivation(self.ring, tuple(-c for c in self.coefficients))

    def scale(self, p) -> "Derivation":
        """Multiply by a polynomial or scalar."""
        return Derivation(self.ring, tuple(c * p for c in self.coefficients))

    def weight(self):
        """Weight w such that each coefficient of d/d(x_i) is homogeneous of
        weighted degree w + wt(x_i); MIXED if inconsistent, None if zero."""
        w = None
        for c, wx in zip(self.coefficients, self.ring.weights):
            if c.is_zero():
                continue
            d = c.weighted_degree()
            if d is MIXED:
                return MIXED
            if w is None:
                w = d - wx
            elif w != d - wx:
                return MIXED
        return w

    def linear_part(self) -> "Derivation":
        return Derivation(self.ring, tuple(c.linear_part() for c in self.coefficients))

    def normalized(self) -> "Derivation":
        """Integer coefficients with overall content 1, first nonzero monomial
        coefficient positive (canonical representative up to scalars)."""
        flat: list[Fraction] = []
        layout = []
        for c in self.coefficients:
            items = c.sorted_terms()
            layout.append([e for e, _ in items])
            flat.extend(coef for _, coef in items)
        if not flat:
            return self
        ints = normalize_vector(flat)
        pos = 0
        coeffs = []
        for exps_list in layout:
            terms = {}
            for e in exps_list:
                terms[e] = Fraction(ints[pos])
                pos += 1
            coeffs.append(Polynomial(self.ring, terms))
        return Derivation(self.ring, tuple(coeffs))

    def __str__(self) -> str:
        parts = [
            f"({c})*d/d{n}" for n, c in zip(self.ring.names, self.coefficients) if not c.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def lie_bracket(a: Derivation, b: Derivation) -> Derivation:
    """[a, b] = a b - b a, again a derivation."""
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    coeffs = tuple(a.apply(bc) - b.apply(ac) for ac, bc in zip(a.coefficients, b.coefficients))
    return Derivation(a.ring, coeffs)


def is_tangent(delta: Derivation, h: Polynomial) -> Optional[Polynomial]:
    """Witness q with delta(h) = q*h, or None if h does not divide delta(h)."""
    if h.is_zero():
        raise ValueError("zero equation")
    return exact_divide(delta.apply(h), h)


@dataclass(frozen=True)
class SaitoMatrix:
    """An ordered tuple of n derivations in n variables; columns are fields."""

    fields: tuple[Derivation, ...]

    def __post_init__(self) -> None:
        if not self.fields:
            raise ValueError("empty field list")
        ring = self.fields[0].ring
        if any(f.ring != ring for f in self.fields):
            raise ValueError("fields in different rings")
        if len(self.fields) != ring.nvars:
            raise ValueError("need exactly one field per variable")

    @property
    def ring(self) -> WeightSystem:
        return self.fields[0].ring

    def matrix(self) -> PolyMatrix:
        n = self.ring.nvars
        rows = [[self.fields[j].coefficients[i] for j in range(n)] for i in range(n)]
        return PolyMatrix.from_rows(rows)

    def det(self) -> Polynomial:
        return self.matrix().det()


@dataclass(frozen=True)
class FreenessCertificate:
    """A certified Saito basis: all evidence is re-checkable exact data."""

    equation: Polynomial
    basis: SaitoMatrix
    tangency_witnesses: tuple[Polynomial, ...]
    det_quotient: Fraction
    squarefree: bool

    def reverify(self) -> bool:
        """Re-run every clause from the raw data."""
        h = self.equation
        if h.is_zero() or not is_squarefree(h):
            return False
        if not self.squarefree:
            return False
        for f, q in zip(self.basis.fields, self.tangency_witnesses):
            if f.apply(h) != q * h:
                return False
        det = self.basis.det()
        if det != h * self.det_quotient or self.det_quotient == 0:
            return False
        return True


class SaitoFailure(Exception):
    """A named violation of one clause of Saito's criterion."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}" + (f": {detail}" if detail else ""))


def verify_saito(h: Polynomial, fields: Sequence[Derivation]) -> FreenessCertificate:
    """Certify V(h) free with the given basis, or raise SaitoFailure.

    Clauses, in check order: ``squarefree`` (h reduced), ``tangency``
    (every field preserves the ideal of h), ``determinant`` (coefficient
    determinant equals a nonzero rational multiple of h).
    """
    if h.is_zero():
        raise ValueError("zero equation")
    ring = h.ring
    if len(fields) != ring.nvars:
        raise SaitoFailure(
            "dimension", f"{len(fields)} fields in {ring.nvars} variables: not a candidate basis"
        )
    for f in fields:
        if f.ring != ring:
            raise ValueError("ring mismatch")
    if h.is_constant():
        raise ValueError("constant equation is not a divisor")
    if not is_squarefree(h):
        raise SaitoFailure("squarefree", "equation has a repeated factor")
    witnesses = []
    for idx, f in enumerate(fields):
        q = is_tangent(f, h)
        if q is None:
            raise SaitoFailure("tangency", f"field {idx} is not tangent to the divisor")
        witnesses.append(q)
    sm = SaitoMatrix(tuple(fields))
    det = sm.det()
    quot = exact_divide(det, h)
    if quot is None:
        raise SaitoFailure("determinant", "determinant is not a multiple of the equation")
    if quot.is_zero() or not quot.is_constant():
        raise SaitoFailure("determinant", f"determinant / equation = {quot} is not a unit")
    return FreenessCertificate(
        equation=h,
        basis=sm,
        tangency_witnesses=tuple(witnesses),
        det_quotient=quot.constant_value(),
        squarefree=True,
    )


# -- graded solver -------------------------------------------------------------


def _slice_columns(h: Polynomial, w: int):
    """Coordinate layout of the degree-w tangency system for h.

    Unknowns: coefficients of d/d(x_i) on monomials of degree w + wt(x_i),
    then coefficients of the witness q on monomials of degree w.  Equations:
    coefficients of delta(h) - q*h, which is homogeneous of degree w + wt(h).
    """
    ring = h.ring
    var_slots = []  # (variable index, exponent tuple)
    for i, wx in enumerate(ring.weights):
        for m in monomials_of_weighted_degree(ring, w + wx):
            var_slots.append((i, m))
    q_slots = list(monomials_of_weighted_degree(ring, w))
    return var_slots, q_slots


def _slice_system(h: Polynomial, w: int):
    """Columns are ordered with the q-slots first so that the kernel is
    parametrized by derivation coefficients (q is determined by delta)."""
    ring = h.ring
    var_slots, q_slots = _slice_columns(h, w)
    partials = [h.partial(n) for n in ring.names]
    columns: list[Polynomial] = [-(ring.monomial(m) * h) for m in q_slots]
    for i, m in var_slots:
        columns.append(ring.monomial(m) * partials[i])
    row_index: dict = {}
    for col in columns:
        for e in col.terms:
            if e not in row_index:
                row_index[e] = len(row_index)
    rows = [[Fraction(0)] * len(columns) for _ in range(len(row_index))]
    for j, col in enumerate(columns):
        for e, c in col.terms.items():
            rows[row_index[e]][j] = c
    return var_slots, q_slots, rows


def _vector_to_derivation(ring: WeightSystem, var_slots, vec) -> Derivation:
    coeffs = [dict() for _ in range(ring.nvars)]
    for (i, m), c in zip(var_slots, vec):
        if c:
            coeffs[i][m] = Fraction(c)
    return Derivation(ring, tuple(Polynomial(ring, t) for t in coeffs))


def tangent_slice_dimension(h: Polynomial, w: int) -> int:
    """Dimension of the space of weight-w fields tangent to V(h)."""
    var_slots, q_slots, rows = _slice_system(h, w)
    if not var_slots:
        return 0
    ker = kernel_basis(rows, ncols=len(q_slots) + len(var_slots))
    return len(ker)


def _derivation_slice_vector(delta: Derivation, var_slots, index) -> list[Fraction]:
    vec = [Fraction(0)] * len(var_slots)
    for i, c in enumerate(delta.coefficients):
        for e, coef in c.terms.items():
            vec[index[(i, e)]] = coef
    return vec


def solve_logarithmic(h: Polynomial, max_weight: Optional[int] = None) -> list[Derivation]:
    """Minimal graded generators of the tangent fields of V(h), weight by weight.

    For each weight w up to ``max_weight`` (default: the weighted degree of
    h), solve delta(h) - q*h = 0 exactly in the unknown coefficients, then
    keep only generators independent of monomial multiples of lower-weight
    ones (exact rank computation in the graded slice).
    """
    if h.is_zero():
        raise ValueError("zero equation")
    if h.is_constant():
        raise ValueError("constant equation is not a divisor")
    wh = h.weighted_degree()
    if wh is MIXED:
        raise ValueError("inhomogeneous equation: graded solver needs weighted-homogeneous input")
    if max_weight is None:
        max_weight = wh
    ring = h.ring
    gens: list[Derivation] = []
    gen_weights: list[int] = []
    for w in range(-max(ring.weights), max_weight + 1):
        var_slots, q_slots, rows = _slice_system(h, w)
        if not var_slots:
            continue
        ker = kernel_basis(rows, ncols=len(q_slots) + len(var_slots))
        if not ker:
            continue
        index = {slot: pos for pos, slot in enumerate(var_slots)}
        tracker = RankTracker(len(var_slots))
        for g, gw in zip(gens, gen_weights):
            for m in monomials_of_weighted_degree(ring, w - gw):
                mult = g.scale(ring.monomial(m))
                tracker.add(_derivation_slice_vector(mult, var_slots, index))
        for vec in ker:
            if tracker.add(vec[len(q_slots) :]):
                delta = _vector_to_derivation(ring, var_slots, vec[len(q_slots) :]).normalized()
                gens.append(delta)
                gen_weights.append(w)
    return gens


def _filtered_slice(h: Polynomial, level: int):
    """Tangency system with coefficient degrees bounded by the filtration level."""
    ring = h.ring
    var_slots = []
    for i, wx in enumerate(ring.weights):
        for d in range(level + wx, -1, -1):
            for m in monomials_of_weighted_degree(ring, d):
                var_slots.append((i, m))
    q_slots = []
    for d in range(level, -1, -1):
        q_slots.extend(monomials_of_weighted_degree(ring, d))
    partials = [h.partial(n) for n in ring.names]
    columns = [-(ring.monomial(m) * h) for m in q_slots]
    columns.extend(ring.monomial(m) * partials[i] for i, m in var_slots)
    row_index: dict = {}
    for col in columns:
        for e in col.terms:
            if e not in row_index:
                row_index[e] = len(row_index)
    rows = [[Fraction(0)] * len(columns) for _ in range(len(row_index))]
    for j, col in enumerate(columns):
        for e, c in col.terms.items():
            rows[row_index[e]][j] = c
    return var_slots, q_slots, rows


def solve_logarithmic_filtered(h: Polynomial, max_level: int) -> list[tuple[int, Derivation]]:
    """Minimal filtered generators of the tangent fields of an inhomogeneous h.

    Level ell bounds each coefficient of d/d(x_i) by weighted degree
    ell + wt(x_i).  Levels increase one at a time and only kernel vectors
    independent of monomial multiples of lower-level generators are kept,
    mirroring the graded solver; for a free module the surviving
    generators are a basis.
    """
    if h.is_zero():
        raise ValueError("zero equation")
    if h.is_constant():
        raise ValueError("constant equation is not a divisor")
    ring = h.ring
    gens: list[tuple[int, Derivation]] = []
    for level in range(-max(ring.weights), max_level + 1):
        var_slots, q_slots, rows = _filtered_slice(h, level)
        if not var_slots:
            continue
        ker = kernel_basis(rows, ncols=len(q_slots) + len(var_slots))
        if not ker:
            continue
        index = {slot: pos for pos, slot in enumerate(var_slots)}
        tracker = RankTracker(len(var_slots))
        for lg, g in gens:
            for d in range(level - lg + 1):
                for m in monomials_of_weighted_degree(ring, d):
                    mult = g.scale(ring.monomial(m))
                    tracker.add(_derivation_slice_vector(mult, var_slots, index))
        for vec in ker:
            if tracker.add(vec[len(q_slots) :]):
                delta = _vector_to_derivation(ring, var_slots, vec[len(q_slots) :])
                gens.append((level, delta.normalized()))
    return gens


def find_saito_basis(
    h: Polynomial, generators: Sequence[Derivation]
) -> Optional[FreenessCertificate]:
    """First certified n-subset of the generators, in deterministic order.

    Homogeneity forces the basis weights to sum to wt(h) - sum of variable
    weights, which prunes the subset search to almost nothing at desk scale.
    """
    ring = h.ring
    n = ring.nvars
    wh = h.weighted_degree()
    if wh is MIXED:
        raise ValueError("inhomogeneous equation")
    target = wh - sum(ring.weights)
    weighted = []
    for idx, g in enumerate(generators):
        w = g.weight()
        if w is MIXED or w is None:
            raise ValueError(f"generator {idx} is not weighted homogeneous")
        weighted.append((w, idx, g))
    weighted.sort(key=lambda t: (t[0], t[1]))
    if len(weighted) < n:
        return None
    for combo in itertools.combinations(weighted, n):
        if sum(w for w, _, _ in combo) != target:
            continue
        try:
            return verify_saito(h, [g for _, _, g in combo])
        except SaitoFailure:
            continue
    return None


def search_saito_basis_filtered(
    h: Polynomial, candidates: Sequence[Derivation], limit: int = 200000
) -> Optional[FreenessCertificate]:
    """Subset search without the weight pruning (for inhomogeneous equations)."""
    n = h.ring.nvars
    total = 1
    for i in range(n):
        total = total * (len(candidates) - i) // (i + 1)
    if total > limit:
        raise RuntimeError(f"search space too large ({total} subsets)")
    for combo in itertools.combinations(candidates, n):
        try:
            return verify_saito(h, list(combo))
        except SaitoFailure:
            continue
    return None


# -- homogeneous ideal membership ----------------------------------------------


def ideal_membership_homogeneous(
    p: Polynomial,
    gens: Sequence[Polynomial],
    multiplier_degrees: Sequence[int],
) -> Optional[list[Polynomial]]:
    """Exact homogeneous multipliers c_j with p = sum c_j * g_j, or None.

    ``multiplier_degrees[j]`` prescribes the weighted degree of c_j; a
    negative entry excludes that generator (its multiplier is zero).  The
    prescribed degrees must be consistent with the degrees of p and the
    generators, otherwise ValueError.
    """
    if len(gens) != len(multiplier_degrees):
        raise ValueError("one multiplier degree per generator")
    ring = p.ring
    if p.is_zero():
        return [ring.zero()] * len(gens)
    dp = p.weighted_degree()
    if dp is MIXED:
        raise ValueError("inhomogeneous polynomial")
    slots = []  # (generator index, exponent tuple)
    for j, (g, dj) in enumerate(zip(gens, multiplier_degrees)):
        if dj < 0:
            continue
        if g.is_zero():
            continue
        dg = g.weighted_degree()
        if dg is MIXED:
            raise ValueError(f"inhomogeneous generator {j}")
        if dg + dj != dp:
            raise ValueError(
                f"degree inconsistency: generator {j} has degree {dg}, multiplier {dj}, target {dp}"
            )
        for m in monomials_of_weighted_degree(ring, dj):
            slots.append((j, m))
    columns = [ring.monomial(m) * gens[j] for j, m in slots]
    row_index: dict = {}
    for col in columns:
        for e in col.terms:
            row_index.setdefault(e, len(row_index))
    for e in p.terms:
        row_index.setdefault(e, len(row_index))
    rows = [[Fraction(0)] * len(columns) for _ in range(len(row_index))]
    for j, col in enumerate(columns):
        for e, c in col.terms.items():
            rows[row_index[e]][j] = c
    rhs = [Fraction(0)] * len(row_index)
    for e, c in p.terms.items():
        rhs[row_index[e]] = c
    sol = solve_linear(rows, rhs)
    if sol is None:
        return None
    multipliers = [dict() for _ in gens]
    for (j, m), c in zip(slots, sol):
        if c:
            multipliers[j][m] = c
    return [Polynomial(ring, t) for t in multipliers]


def minor_action_constants(
    delta: Derivation, adjoint: Polynomial, minors: Sequence[Polynomial]
) -> Optional[list[Fraction]]:
    """Constant parts of multipliers with delta(adjoint) = sum c_j * minors[j].

    The constants are well defined whenever the minors are minimal
    generators of their ideal (the homogeneous multipliers are then unique
    modulo the maximal ideal).  Returns None if delta(adjoint) is not in
    the ideal at all.
    """
    ring = delta.ring
    image = delta.apply(adjoint)
    if image.is_zero():
        return [Fraction(0)] * len(minors)
    d = image.weighted_degree()
    if d is MIXED:
        raise ValueError("inhomogeneous image")
    degs = [d - m.weighted_degree() for m in minors]
    mult = ideal_membership_homogeneous(image, minors, degs)
    if mult is None:
        return None
    origin = (0,) * ring.nvars
    return [m.coefficient(origin) for m in mult]
