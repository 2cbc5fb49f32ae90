"""New free divisors from component-separating fields and target divisors.

Given a free divisor D = V(f_1 ... f_k) with vector fields eps_1, ..., eps_n
such that eps_i(f_j) = delta_ij f_j for i <= k and eps_i(f_j) = 0 past k,
and a divisor E in the target coordinates y_1..y_k such that the normal
crossing divisor plus E is free with Saito factorization diag(y) * A, the
pullback D + f^{-1}(E) along f = (f_1, ..., f_k) is free with basis

    vtilde_j = sum_i (A_ij o f) eps_i   (j <= k),  eps_{k+1}, ..., eps_n.

Inputs carry their own witnesses and every identity is re-verified; the
constructor never trusts its arguments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from freediv.derivations import (
    Derivation,
    FreenessCertificate,
    find_saito_basis,
    lie_bracket,
    solve_logarithmic,
    verify_saito,
)
from freediv.polylinalg import PolyMatrix
from freediv.polyring import Polynomial, WeightSystem, exact_divide, gcd, is_squarefree
from freediv.report import CheckFailure, CheckReport


@dataclass(frozen=True)
class SeparatedDivisor:
    """A free divisor with separating fields for its component grouping."""

    ring: WeightSystem
    components: tuple[Polynomial, ...]  # f_1, ..., f_k: reduced, pairwise coprime
    fields: tuple[Derivation, ...]  # eps_1..eps_k separating, eps_{k+1}..eps_n completing

    @property
    def k(self) -> int:
        return len(self.components)

    def equation(self) -> Polynomial:
        h = self.ring.one()
        for f in self.components:
            h = h * f
        return h

    def verify(self) -> CheckReport:
        """Separation identities, coprimality, and freeness of the union."""
        rep = CheckReport("separated divisor")
        k, n = self.k, self.ring.nvars
        rep.add("field count matches dimension", len(self.fields) == n)
        for a in range(k):
            for b in range(a + 1, k):
                g = gcd(self.components[a], self.components[b])
                rep.add(f"f_{a + 1}, f_{b + 1} coprime", g.is_constant() and not g.is_zero())
        for i, eps in enumerate(self.fields):
            for j, f in enumerate(self.components):
                val = eps.apply(f)
                want = f if i == j else self.ring.zero()
                rep.add(
                    f"eps_{i + 1}(f_{j + 1}) = {'f' if i == j else '0'}",
                    val == want,
                    "" if val == want else f"got {val}",
                )
        try:
            verify_saito(self.equation(), list(self.fields))
            rep.add("union certified free by its own fields", True)
        except Exception as exc:  # SaitoFailure or ValueError
            rep.add("union certified free by its own fields", False, str(exc))
        return rep

    def log_jacobian_check(self) -> CheckReport:
        """det(eps_i(f_j))_{i,j<=k} = f_1 ... f_k exactly."""
        rep = CheckReport("logarithmic Jacobian identity")
        k = self.k
        rows = [[self.fields[i].apply(self.components[j]) for j in range(k)] for i in range(k)]
        det = PolyMatrix.from_rows(rows).det()
        rep.add("det(eps_i(f_j)) = f_1...f_k", det == self.equation(), f"det = {det}")
        return rep


@dataclass(frozen=True)
class TargetPair:
    """Normal crossing + E in k target variables, with Saito factorization.

    The Saito matrix of the union is diag(y_1..y_k) * a_matrix, and
    det(a_matrix) is the reduced equation of E (exactly; no renormalization).
    """

    ring: WeightSystem  # y_1, ..., y_k
    a_matrix: PolyMatrix

    @property
    def k(self) -> int:
        return self.ring.nvars

    def e_equation(self) -> Polynomial:
        return self.a_matrix.det()

    def equation(self) -> Polynomial:
        h = self.e_equation()
        for y in self.ring.gens():
            h = h * y
        return h

    def saito_fields(self) -> tuple[Derivation, ...]:
        k = self.k
        ys = self.ring.gens()
        return tuple(
            Derivation(self.ring, tuple(ys[i] * self.a_matrix.entry(i, j) for i in range(k)))
            for j in range(k)
        )

    def verify(self) -> CheckReport:
        rep = CheckReport("target pair")
        h_e = self.e_equation()
        rep.add("E equation nonzero", not h_e.is_zero())
        if h_e.is_zero():
            return rep
        if h_e.is_constant():
            rep.add("E empty (constant equation): nothing more to check", True)
            return rep
        rep.add("E equation squarefree", is_squarefree(h_e))
        for i, y in enumerate(self.ring.gens()):
            g = gcd(h_e, y)
            rep.add(f"E coprime to y_{i + 1}", g.is_constant() and not g.is_zero())
        try:
            verify_saito(self.equation(), list(self.saito_fields()))
            rep.add("normal crossing + E certified free", True)
        except Exception as exc:
            rep.add("normal crossing + E certified free", False, str(exc))
        return rep


@dataclass(frozen=True)
class ComposeResult:
    source: SeparatedDivisor
    target: TargetPair
    equation: Polynomial
    certificate: FreenessCertificate
    report: CheckReport


def compose(dsep: SeparatedDivisor, tp: TargetPair) -> ComposeResult:
    """Certify D + f^{-1}(E) free via the transported Saito factorization.

    Re-verifies both inputs, builds the fields vtilde_j, checks the block
    determinant identity det(new) = det(eps) * (det A o f) exactly, and
    runs the full Saito verification on the product equation (which
    includes reducedness of h_E o f).
    """
    rep = dsep.verify()
    if not rep.ok:
        raise CheckFailure("separated divisor input failed verification: " + rep.render())
    rep_t = tp.verify()
    if not rep_t.ok:
        raise CheckFailure("target pair input failed verification: " + rep_t.render())
    k, n = dsep.k, dsep.ring.nvars
    if tp.k != k:
        raise ValueError(f"target has {tp.k} coordinates, source has {k} components")
    sub = {tp.ring.names[j]: dsep.components[j] for j in range(k)}
    h_e_pulled = tp.e_equation().substitute(sub, target=dsep.ring)
    equation = dsep.equation() * h_e_pulled
    new_fields = []
    for j in range(k):
        acc = None
        for i in range(k):
            a_pulled = tp.a_matrix.entry(i, j).substitute(sub, target=dsep.ring)
            term = dsep.fields[i].scale(a_pulled)
            acc = term if acc is None else acc + term
        new_fields.append(acc)
    new_fields.extend(dsep.fields[k:])
    report = CheckReport("composition")
    if not h_e_pulled.is_zero() and not h_e_pulled.is_constant():
        report.add("pulled-back E equation squarefree", is_squarefree(h_e_pulled))
    report.add("logarithmic Jacobian identity", dsep.log_jacobian_check().ok)
    from freediv.derivations import SaitoMatrix

    det_new = SaitoMatrix(tuple(new_fields)).det()
    det_old = SaitoMatrix(dsep.fields).det()
    det_a_pulled = tp.e_equation().substitute(sub, target=dsep.ring)
    report.add(
        "determinant factorizes as det(eps) * (det A o f)",
        det_new == det_old * det_a_pulled,
    )
    try:
        cert = verify_saito(equation, new_fields)
        report.add("Saito criterion for the composite divisor", True)
    except Exception as exc:
        report.add("Saito criterion for the composite divisor", False, str(exc))
        raise CheckFailure(report.render()) from exc
    report.require()
    return ComposeResult(
        source=dsep, target=tp, equation=equation, certificate=cert, report=report
    )


# -- builders ------------------------------------------------------------------


def crossing_ring(n: int, prefix: str = "x") -> WeightSystem:
    return WeightSystem(tuple(f"{prefix}{i}" for i in range(1, n + 1)), (1,) * n)


def normal_crossing_partition(n: int, groups: Sequence[Sequence[int]]) -> SeparatedDivisor:
    """The normal crossing divisor x_1...x_n grouped into monomial components.

    Each group contributes the product of its variables as one component;
    its first variable carries the separating field x d/dx, and the other
    variables contribute completion fields x_i d/dx_i - x_first d/dx_first.
    """
    ring = crossing_ring(n)
    seen: list[int] = []
    for g in groups:
        for i in g:
            if i < 1 or i > n or i in seen:
                raise ValueError("groups must partition 1..n")
            seen.append(i)
    if len(seen) != n:
        raise ValueError("groups must cover 1..n")
    comps = []
    separating = []
    completing = []
    for g in groups:
        f = ring.one()
        for i in g:
            f = f * ring.var(f"x{i}")
        comps.append(f)
        rep = g[0]
        separating.append(
            Derivation.from_dict(ring, {f"x{rep}": ring.var(f"x{rep}")})
        )
        for i in g[1:]:
            completing.append(
                Derivation.from_dict(
                    ring,
                    {f"x{i}": ring.var(f"x{i}"), f"x{rep}": -ring.var(f"x{rep}")},
                )
            )
    return SeparatedDivisor(ring, tuple(comps), tuple(separating) + tuple(completing))


def elementary_symmetric(ring: WeightSystem, r: int) -> Polynomial:
    gens = ring.gens()
    out = ring.zero()
    for combo in itertools.combinations(gens, r):
        term = ring.one()
        for g in combo:
            term = term * g
        out = out + term
    return out


@dataclass(frozen=True)
class CrossingAdjointResult:
    target: TargetPair
    certificate: FreenessCertificate
    commutators: CheckReport
    determinant: Polynomial


def normal_crossing_adjoint(k: int) -> CrossingAdjointResult:
    """The adjoint of the normal crossing divisor, with its banded basis.

    The Saito matrix has first column (y_1, ..., y_k) and, in column j >= 2,
    the band y_{j-1}^2 at row j-1 over -y_j^2 at row j.  Its determinant is
    a reduced equation for crossing + adjoint, and the band fields past the
    Euler column commute pairwise.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    ring = crossing_ring(k, prefix="y")
    ys = ring.gens()
    fields = [Derivation(ring, tuple(ys))]
    for j in range(2, k + 1):
        coeffs = {f"y{j - 1}": ys[j - 2] ** 2, f"y{j}": -(ys[j - 1] ** 2)}
        fields.append(Derivation.from_dict(ring, coeffs))
    from freediv.derivations import SaitoMatrix

    s_matrix = SaitoMatrix(tuple(fields)).matrix()
    det = s_matrix.det()
    cert = verify_saito(det.monic(), fields)
    a_rows = []
    for i in range(k):
        row = []
        for j in range(k):
            q = exact_divide(s_matrix.entry(i, j), ys[i])
            if q is None:
                raise AssertionError("row not divisible by its coordinate")
            row.append(q)
        a_rows.append(row)
    tp = TargetPair(ring, PolyMatrix.from_rows(a_rows))
    commutators = CheckReport(f"commutators (k={k})")
    for a in range(1, k):
        for b in range(a + 1, k):
            br = lie_bracket(fields[a], fields[b])
            commutators.add(f"[delta_{a + 1}, delta_{b + 1}] = 0", br.is_zero())
    return CrossingAdjointResult(
        target=tp, certificate=cert, commutators=commutators, determinant=det
    )


def target_pair_from_curve(g: Polynomial) -> TargetPair:
    """Saito factorization for normal crossing + V(g) found by the solver.

    g must be weighted homogeneous, nonzero, and coprime to each
    coordinate; every logarithmic field of the union is tangent to each
    coordinate hyperplane, so the certified Saito matrix factors through
    diag(y) exactly.
    """
    ring = g.ring
    h = g
    for y in ring.gens():
        h = h * y
    gens = solve_logarithmic(h, h.weighted_degree() - sum(ring.weights))
    cert = find_saito_basis(h, gens)
    if cert is None:
        raise CheckFailure("normal crossing + curve is not certified free within the bound")
    s_matrix = cert.basis.matrix()
    rows = []
    for i, y in enumerate(ring.gens()):
        row = []
        for j in range(ring.nvars):
            q = exact_divide(s_matrix.entry(i, j), y)
            if q is None:
                raise AssertionError("logarithmic field row not divisible by its coordinate")
            row.append(q)
        rows.append(row)
    return TargetPair(ring, PolyMatrix.from_rows(rows))


def arrangement_target_pair(forms: Sequence[Polynomial]) -> Optional[TargetPair]:
    """TargetPair for a central arrangement containing all coordinate axes.

    The forms must include every coordinate (up to scalar); the remaining
    forms multiply to the E equation.  Freeness is decided by the graded
    solver: None means no Saito basis exists within the forced weight
    bound, i.e. the arrangement is not free.
    """
    if not forms:
        raise ValueError("empty arrangement")
    ring = forms[0].ring
    k = ring.nvars
    coords = [False] * k
    extra = []
    from freediv.polyring import MIXED

    for f in forms:
        if f.is_zero() or f.weighted_degree() is MIXED:
            raise ValueError("forms must be nonzero and weighted homogeneous")
        hit = None
        for i, y in enumerate(ring.gens()):
            q = exact_divide(f, y)
            if q is not None and q.is_constant():
                hit = i
                break
        if hit is not None:
            if coords[hit]:
                raise ValueError("repeated coordinate hyperplane")
            coords[hit] = True
        else:
            extra.append(f)
    if not all(coords):
        raise ValueError("arrangement must contain every coordinate hyperplane")
    h = ring.one()
    for y in ring.gens():
        h = h * y
    for f in extra:
        h = h * f
    if not is_squarefree(h):
        raise ValueError("arrangement is not reduced")
    gens = solve_logarithmic(h, h.weighted_degree() - sum(ring.weights))
    cert = find_saito_basis(h, gens)
    if cert is None:
        return None
    s_matrix = cert.basis.matrix()
    rows = []
    for i, y in enumerate(ring.gens()):
        row = []
        for j in range(k):
            q = exact_divide(s_matrix.entry(i, j), y)
            if q is None:
                raise AssertionError("logarithmic field row not divisible by its coordinate")
            row.append(q)
        rows.append(row)
    return TargetPair(ring, PolyMatrix.from_rows(rows))


def arrangement_pullback(
    dsep: SeparatedDivisor, forms: Sequence[Polynomial]
) -> Optional[ComposeResult]:
    """Pull a free arrangement back along the component map; None if the
    arrangement has no Saito basis within the solver bound (not free)."""
    tp = arrangement_target_pair(forms)
    if tp is None:
        return None
    return compose(dsep, tp)
