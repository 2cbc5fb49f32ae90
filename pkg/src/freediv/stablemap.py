"""Images of corank-1 stable map-germs and their adjoint divisors.

Everything here is attached to the multiplicity-k normal form

    (u, v, x) |-> (u, v, x^k + u_1 x^{k-2} + ... + u_{k-2} x,
                   v_1 x^{k-1} + ... + v_{k-1} x)

from (C^n, 0) to (C^{n+1}, 0), weighted so that every component is
homogeneous.  The pushforward of the source ring is free over the target
ring on the basis g_i = x^{k-i}; multiplication by the extra unfolding
variable t, written in that basis against its dual basis, is a symmetric
k x k presentation matrix for the image.  Its determinant h is a reduced
equation of the image D, the last-row minors generate the first Fitting
ideal (the singular locus), and the last minor cuts out the canonical
adjoint divisor A.  The pipeline at the bottom certifies that D + A is
free by solving for logarithmic fields and applying Saito's criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from freediv.derivations import (
    Derivation,
    FreenessCertificate,
    find_saito_basis,
    minor_action_constants,
    search_saito_basis_filtered,
    solve_logarithmic,
    solve_logarithmic_filtered,
)
from freediv.normalform import NormalFormRing, XElement
from freediv.polylinalg import PolyMatrix, rank
from freediv.polyring import Polynomial, WeightSystem, exact_divide, is_squarefree
from freediv.report import CheckFailure, CheckReport

# The mathematics is uniform in k; the default cap only reflects that
# determinant and solver cost grow steeply past desk scale.
K_CAP = 4


def _check_k(k: int, cap: Optional[int]) -> None:
    if k < 2:
        raise ValueError("multiplicity k must be at least 2")
    if cap is not None and k > cap:
        raise ValueError(f"k={k} above the configured cap {cap}; pass cap=None to override")


def source_ring(k: int) -> WeightSystem:
    names = [f"u{i}" for i in range(1, k - 1)] + [f"v{i}" for i in range(1, k)] + ["x"]
    weights = [i + 1 for i in range(1, k - 1)] + [i for i in range(1, k)] + [1]
    return WeightSystem(tuple(names), tuple(weights))


def target_ring(k: int) -> WeightSystem:
    names = [f"U{i}" for i in range(1, k - 1)] + [f"V{i}" for i in range(1, k)] + ["W1", "W2"]
    weights = [i + 1 for i in range(1, k - 1)] + [i for i in range(1, k)] + [k, k]
    return WeightSystem(tuple(names), tuple(weights))


@dataclass(frozen=True)
class StableGerm:
    """The normal form of the multiplicity-k corank-1 stable germ."""

    k: int
    source: WeightSystem
    target: WeightSystem
    components: tuple[Polynomial, ...]  # aligned with target.names, in the source ring

    def substitution(self) -> dict[str, Polynomial]:
        """Target variable -> its pullback, for composing with the germ."""
        return dict(zip(self.target.names, self.components))


def build_germ(k: int, cap: Optional[int] = K_CAP) -> StableGerm:
    _check_k(k, cap)
    src = source_ring(k)
    tgt = target_ring(k)
    x = src.var("x")
    comps: list[Polynomial] = []
    for i in range(1, k - 1):
        comps.append(src.var(f"u{i}"))
    for i in range(1, k):
        comps.append(src.var(f"v{i}"))
    w1 = x**k
    for i in range(1, k - 1):
        w1 = w1 + src.var(f"u{i}") * x ** (k - 1 - i)
    comps.append(w1)
    w2 = src.zero()
    for i in range(1, k):
        w2 = w2 + src.var(f"v{i}") * x ** (k - i)
    comps.append(w2)
    germ = StableGerm(k, src, tgt, tuple(comps))
    for comp, name in zip(comps, tgt.names):
        if comp.weighted_degree() != tgt.weights[tgt.index(name)]:
            raise AssertionError("germ component weight mismatch")
    return germ


def module_ring(k: int) -> NormalFormRing:
    """The pushforward ring as a rank-k module: x^k rewrites via W1."""
    tgt = target_ring(k)
    red = [tgt.zero()] * k
    red[0] = tgt.var("W1")
    for i in range(1, k - 1):
        red[k - 1 - i] = -tgt.var(f"U{i}")
    return NormalFormRing(ring=tgt, rank=k, reduction=tuple(red))


def dual_basis(k: int) -> tuple[XElement, ...]:
    """Dual basis of g_i = x^{k-i} under the socle-projection pairing.

    Validates <g_i, gdual_j> = delta_ij before returning.
    """
    nf = module_ring(k)
    tgt = nf.ring
    duals: list[XElement] = []
    for j in range(1, k + 1):
        coeffs = [tgt.zero()] * k
        coeffs[j - 1] = tgt.one()  # x^{j-1}
        for i in range(1, j - 1):
            coeffs[j - i - 2] = tgt.var(f"U{i}")
        duals.append(nf.reduce(coeffs))
    for i in range(1, k + 1):
        gi = nf.x_power(k - i)
        for j, gd in enumerate(duals, start=1):
            pairing = nf.socle_coefficient(nf.mul(gi, gd))
            expected = tgt.one() if i == j else tgt.zero()
            if pairing != expected:
                raise AssertionError(f"dual basis pairing failed at ({i},{j})")
    return tuple(duals)


@dataclass(frozen=True)
class PresentationData:
    """Symmetric presentation matrix of the image, with minors and adjoint."""

    germ: StableGerm
    module: NormalFormRing
    lam: PolyMatrix
    h: Polynomial  # det(lam), reduced equation of the image
    minors: tuple[Polynomial, ...]  # last-row minors m_1, ..., m_k
    adjoint: Polynomial  # m_k, the canonical adjoint equation
    duals: tuple[XElement, ...]

    @property
    def k(self) -> int:
        return self.germ.k

    def minor_last_row(self, j: int) -> Polynomial:
        """m_j (delete the last row and column j), 1-indexed like the display."""
        return self.minors[j - 1]


def build_lambda(k: int, cap: Optional[int] = K_CAP, validate: bool = True) -> PresentationData:
    """Presentation matrix by direct normal-form reduction of t * gdual_j.

    The extra variable satisfies t = W2 - sum_i V_i x^{k-i}; column j of the
    matrix lists the coordinates of t * gdual_j in the basis g (coefficient
    of x^{k-i} in row i).
    """
    germ = build_germ(k, cap)
    nf = module_ring(k)
    tgt = nf.ring
    duals = dual_basis(k)
    t_elem = [tgt.zero()] * k
    t_elem[0] = tgt.var("W2")
    for i in range(1, k):
        t_elem[k - i] = -tgt.var(f"V{i}")
    columns = []
    for gd in duals:
        prod = nf.mul(t_elem, gd)
        columns.append([prod[k - i] for i in range(1, k + 1)])
    lam = PolyMatrix.from_rows([[columns[j][i] for j in range(k)] for i in range(k)])
    h = lam.det()
    minors = tuple(lam.minor(k - 1, j) for j in range(k))
    data = PresentationData(germ, nf, lam, h, minors, minors[-1], duals)
    if validate:
        if not lam.is_symmetric():
            raise AssertionError("presentation matrix is not symmetric")
        if h.weighted_degree() != k * k:
            raise AssertionError("image equation has wrong weighted degree")
        for j, m in enumerate(minors, start=1):
            if m.weighted_degree() != k * k - k - j + 1:
                raise AssertionError(f"minor {j} has wrong weighted degree")
        if not is_squarefree(h):
            raise AssertionError("image equation is not reduced")
    return data


def reversal_sign(n: int) -> int:
    """Sign of the order-reversing permutation of n letters."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


def distinguished_monomial_checks(P: PresentationData) -> CheckReport:
    """Locate the monomials that pin each minor inside the Fitting ideal.

    W2^k appears in h with coefficient of absolute value 1; W2^{k-2} V_{k-j+1}
    appears in m_j (j > 1) with coefficient (-1)^{j-1} iota and in no other
    minor; W2^{k-1} appears in m_1 with coefficient iota and in no other,
    where iota is the sign of reversing k-1 letters.
    """
    k = P.k
    tgt = P.germ.target
    iota = reversal_sign(k - 1)
    rep = CheckReport(f"distinguished monomials (k={k})")
    c = P.h.coefficient({"W2": k})
    rep.add("W2^k in h has coefficient +-1", abs(c) == 1, f"coefficient {c}")

    def mono(j: int) -> dict[str, int]:
        if j == 1:
            return {"W2": k - 1}
        return {"W2": k - 2, f"V{k - j + 1}": 1}

    for j in range(1, k + 1):
        want = iota if j == 1 else ((-1) ** (j - 1)) * iota
        got = P.minors[j - 1].coefficient(mono(j))
        rep.add(
            f"monomial of m_{j} has coefficient {want}",
            got == want,
            f"coefficient {got}",
        )
        for ell in range(1, k + 1):
            if ell == j:
                continue
            other = P.minors[ell - 1].coefficient(mono(j))
            if other != 0:
                rep.add(f"monomial of m_{j} absent from m_{ell}", False, f"coefficient {other}")
    rep.add("each distinguished monomial confined to its own minor", True)
    return rep


def pullback_identities(P: PresentationData) -> CheckReport:
    """h vanishes on the image; minors pull back to x-power multiples.

    Cramer's rule in the pushforward module forces m_j o f = +- x^{k-j}
    (m_k o f); the signs are recorded, not normalized away.
    """
    germ = P.germ
    sub = germ.substitution()
    src = germ.source
    x = src.var("x")
    rep = CheckReport(f"pullback identities (k={P.k})")
    h_pull = P.h.substitute(sub, target=src)
    rep.add("h o f = 0", h_pull.is_zero(), f"pullback {h_pull}")
    mk_pull = P.adjoint.substitute(sub, target=src)
    rep.add("m_k o f != 0", not mk_pull.is_zero())
    for j in range(1, P.k + 1):
        mj_pull = P.minors[j - 1].substitute(sub, target=src)
        scaled = x ** (P.k - j) * mk_pull
        ok = mj_pull == scaled or mj_pull == -scaled
        sign = "+" if mj_pull == scaled else ("-" if mj_pull == -scaled else "?")
        rep.add(f"m_{j} o f = {sign}x^{P.k - j} (m_k o f)", ok)
    return rep


@dataclass(frozen=True)
class ImageLinearFields:
    """Linear parts of the standard generators of the logarithmic fields of D.

    family1[j-1] (weight k-j) rotates V-coordinates into the adjoint
    direction; family2[j-1] (weight j-1, with the j=1 entry equal to -chi)
    shifts U and V indices; family3[j-1] (weight j-1) moves V into U; chi
    and sigma are the semisimple fields, euler the weighted Euler field.
    """

    k: int
    euler: Derivation
    chi: Derivation
    sigma: Derivation
    family1: tuple[Derivation, ...]
    family2: tuple[Derivation, ...]
    family3: tuple[Derivation, ...]

    def all_fields(self) -> list[tuple[str, Derivation]]:
        out = [("euler", self.euler), ("chi", self.chi), ("sigma", self.sigma)]
        out += [(f"family1[{j}]", d) for j, d in enumerate(self.family1, start=1)]
        out += [(f"family2[{j}]", d) for j, d in enumerate(self.family2, start=1)]
        out += [(f"family3[{j}]", d) for j, d in enumerate(self.family3, start=1)]
        return out


def log_derivation_linear_parts(k: int, cap: Optional[int] = K_CAP) -> ImageLinearFields:
    _check_k(k, cap)
    tgt = target_ring(k)

    def var(name: str) -> Polynomial:
        return tgt.var(name)

    euler = {f"U{i}": (i + 1) * var(f"U{i}") for i in range(1, k - 1)}
    euler.update({f"V{i}": i * var(f"V{i}") for i in range(1, k)})
    euler["W1"] = k * var("W1")
    euler["W2"] = k * var("W2")

    chi = {f"U{i}": -(i + 1) * var(f"U{i}") for i in range(1, k - 1)}
    chi.update({f"V{i}": (k - i) * var(f"V{i}") for i in range(1, k)})
    chi["W1"] = k * var("W1")

    sigma = {f"V{i}": var(f"V{i}") for i in range(1, k)}
    sigma["W2"] = var("W2")

    fam1 = []
    for j in range(1, k):
        coeffs = {f"V{j}": -var("W2")}
        for i in range(1, j):
            coeffs[f"V{i}"] = coeffs.get(f"V{i}", tgt.zero()) + var(f"V{i - j + k}")
        fam1.append(Derivation.from_dict(tgt, coeffs))

    fam2 = [-Derivation.from_dict(tgt, chi)]
    for j in range(2, k):
        coeffs: dict[str, Polynomial] = {}
        for i in range(1, k - j):
            coeffs[f"U{i}"] = (i + j) * var(f"U{i + j - 1}")
        for i in range(1, k - j + 1):
            coeffs[f"V{i}"] = coeffs.get(f"V{i}", tgt.zero()) - (k - i - j + 1) * var(
                f"V{i + j - 1}"
            )
        fam2.append(Derivation.from_dict(tgt, coeffs))

    fam3 = []
    for j in range(1, k):
        coeffs = {}
        if j == 1:
            coeffs["W1"] = var("W2")
        else:
            coeffs[f"U{k - j}"] = -var("W2")
        for i in range(1, k - j):
            coeffs[f"U{i}"] = coeffs.get(f"U{i}", tgt.zero()) + var(f"V{i + j}")
        fam3.append(Derivation.from_dict(tgt, coeffs))

    fields = ImageLinearFields(
        k=k,
        euler=Derivation.from_dict(tgt, euler),
        chi=Derivation.from_dict(tgt, chi),
        sigma=Derivation.from_dict(tgt, sigma),
        family1=tuple(fam1),
        family2=tuple(fam2),
        family3=tuple(fam3),
    )
    expected = {"euler": 0, "chi": 0, "sigma": 0}
    for name, d in fields.all_fields():
        w = d.weight()
        if name.startswith("family1["):
            j = int(name[8:-1])
            want = k - j
        elif name.startswith(("family2[", "family3[")):
            j = int(name[8:-1])
            want = j - 1
        else:
            want = expected[name]
        if w != want:
            raise AssertionError(f"{name} has weight {w}, expected {want}")
    return fields


def linear_part_matrix(P: PresentationData) -> PolyMatrix:
    return P.lam.map_entries(lambda p: p.linear_part())


def first_order_tangency(P: PresentationData, fields: Optional[ImageLinearFields] = None) -> CheckReport:
    """Action of the linear generator parts on the adjoint minor, at lowest order.

    The linear fields act on the lowest-degree jets: every minor has order
    exactly k-1, and products (maximal ideal) x (Fitting ideal) start in
    degree k, so at order k-1 the congruences become exact identities
    between jets with the predicted integer constants:

        family2[j](jet m_k) = (-1)^j (k-j) jet m_{k-j+1}
        family1[j](jet m_k) = (-1)^{k-j+1} jet m_j
        chi(jet m_k) = (k-1) jet m_k            (semisimple)
        family3[j](jet m_k) = 0                 (moves only U, W1)

    sigma is diagonal for the grading by total V, W2 degree, in which every
    matrix entry is homogeneous of degree 1, so it scales the full minor:
    sigma(m_k) = (k-1) m_k exactly.
    """
    k = P.k
    if fields is None:
        fields = log_derivation_linear_parts(k)
    rep = CheckReport(f"first-order tangency (k={k})")
    bar = linear_part_matrix(P)
    jet_minors = [bar.minor(k - 1, j) for j in range(k)]
    for j in range(1, k + 1):
        direct = P.minors[j - 1].ordinary_jet(k - 1)
        rep.add(
            f"jet of m_{j} equals minor of linear-part matrix",
            jet_minors[j - 1] == direct,
        )
    mk_bar = jet_minors[k - 1]
    for j in range(1, k):
        lhs = fields.family2[j - 1].apply(mk_bar)
        const = ((-1) ** j) * (k - j)
        rhs = const * jet_minors[k - j]
        rep.add(
            f"family2[{j}](jet m_{k}) = ({const}) jet m_{k - j + 1}",
            lhs == rhs,
            f"lhs-rhs = {lhs - rhs}",
        )
    for j in range(1, k):
        lhs = fields.family1[j - 1].apply(mk_bar)
        const = (-1) ** (k - j + 1)
        rhs = const * jet_minors[j - 1]
        rep.add(
            f"family1[{j}](jet m_{k}) = ({const}) jet m_{j}",
            lhs == rhs,
            f"lhs-rhs = {lhs - rhs}",
        )
    rep.add(
        f"chi(jet m_{k}) = ({k - 1}) jet m_{k}",
        fields.chi.apply(mk_bar) == (k - 1) * mk_bar,
    )
    rep.add(
        f"sigma(m_{k}) = ({k - 1}) m_{k} exactly",
        fields.sigma.apply(P.adjoint) == (k - 1) * P.adjoint,
    )
    for j in range(1, k):
        lhs = fields.family3[j - 1].apply(mk_bar)
        rep.add(f"family3[{j}](jet m_{k}) = 0", lhs.is_zero(), f"value {lhs}")
    return rep


@dataclass(frozen=True)
class ImageAdjointResult:
    """Theorem-level output: D + A certified free plus the surjectivity witness."""

    presentation: PresentationData
    certificate: FreenessCertificate
    generators: tuple[Derivation, ...]
    constant_matrix: tuple[tuple[Fraction, ...], ...]
    constant_rank: int

    @property
    def equation(self) -> Polynomial:
        return self.certificate.equation


def certify_image_adjoint(
    k: int, max_weight: Optional[int] = None, cap: Optional[int] = K_CAP
) -> ImageAdjointResult:
    """Certify that image + adjoint is a free divisor at multiplicity k.

    Runs the graded solver on h * m_k up to the weight forced by the
    determinant grading, searches for a certified Saito basis, and also
    verifies that applying logarithmic fields of D to the adjoint minor
    hits every minor at constant level (the coefficient matrix of the
    induced map onto the Fitting ideal has full rank).
    """
    P = build_lambda(k, cap)
    ha = P.h * P.adjoint
    tgt = P.germ.target
    bound = max_weight
    if bound is None:
        bound = ha.weighted_degree() - sum(tgt.weights)
    gens = solve_logarithmic(ha, bound)
    cert = find_saito_basis(ha, gens)
    if cert is None:
        raise CheckFailure(
            f"no Saito basis for image+adjoint at k={k} within weight bound {bound}"
        )
    dgens = solve_logarithmic(P.h, k - 1)
    rows = []
    for g in dgens:
        consts = minor_action_constants(g, P.adjoint, P.minors)
        if consts is None:
            raise CheckFailure(
                f"logarithmic field of the image does not preserve the Fitting ideal (k={k})"
            )
        rows.append(consts)
    r = rank(rows)
    if r != k:
        raise CheckFailure(f"constant-level action on the Fitting ideal has rank {r} != {k}")
    return ImageAdjointResult(
        presentation=P,
        certificate=cert,
        generators=tuple(gens),
        constant_matrix=tuple(tuple(row) for row in rows),
        constant_rank=r,
    )


def generic_adjoint_equation(P: PresentationData, coeffs: Sequence[Fraction]) -> Polynomial:
    """m_k + sum_{j<k} c_j m_j: a generic adjoint equation (not homogeneous)."""
    if len(coeffs) != P.k - 1:
        raise ValueError("one coefficient per non-canonical minor required")
    a = P.adjoint
    for c, m in zip(coeffs, P.minors[:-1]):
        a = a + Fraction(c) * m
    return a


def certify_generic_adjoint(
    k: int,
    coeffs: Sequence[Fraction],
    max_level: int = 2,
    cap: Optional[int] = K_CAP,
) -> FreenessCertificate:
    """Certify D + A for a generic adjoint A = V(m_k + sum c_j m_j).

    The perturbed equation mixes weighted degrees, so the graded solver
    does not apply; instead tangent fields are computed with bounded
    coefficient degrees and searched for a certified subset.
    """
    P = build_lambda(k, cap)
    a = generic_adjoint_equation(P, coeffs)
    ha = P.h * a
    for level in range(max_level + 1):
        fields = [g for _, g in solve_logarithmic_filtered(ha, level)]
        if len(fields) < ha.ring.nvars:
            continue
        cert = search_saito_basis_filtered(ha, fields)
        if cert is not None:
            return cert
    raise CheckFailure(f"no Saito basis for generic adjoint at k={k} up to level {max_level}")
