"""Discriminants of one-variable singularities x^(mu+1) and their adjoints.

The versal unfolding F = x^(mu+1) + u_1 x^(mu-1) + ... + u_mu is weighted
homogeneous of degree d = mu+1 with wt(u_i) = i+1.  The critical-locus ring
is free over the base on the powers 1, x, ..., x^(mu-1); the monomial basis
g_i = x^(mu-i) is self-dual for the socle-projection pairing, and the
matrix of multiplication by F in that pair of bases is a symmetric Saito
matrix for the discriminant.  The last-row minors generate the first
Fitting ideal; the last minor is the canonical adjoint equation.

Certification mirrors the image case: the discriminant-plus-adjoint
equation goes through the graded solver and Saito search, and the exact
linear identities satisfied by the matrix columns on the minors (constants
d - d_1 + 2 d_i up to sign) are checked on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from freediv.derivations import (
    Derivation,
    FreenessCertificate,
    find_saito_basis,
    is_tangent,
    minor_action_constants,
    solve_logarithmic,
)
from freediv.normalform import NormalFormRing
from freediv.polylinalg import PolyMatrix
from freediv.polyring import Polynomial, WeightSystem, exact_divide, is_squarefree
from freediv.report import CheckFailure, CheckReport

MU_CAP = 6


def _check_mu(mu: int, minimum: int = 1) -> None:
    if mu < minimum:
        raise ValueError(f"mu must be at least {minimum}")
    if mu > MU_CAP:
        raise ValueError(f"mu={mu} above the configured cap {MU_CAP}")


def base_ring(mu: int) -> WeightSystem:
    return WeightSystem(
        tuple(f"u{i}" for i in range(1, mu + 1)),
        tuple(i + 1 for i in range(1, mu + 1)),
    )


@dataclass(frozen=True)
class MilnorData:
    """Combinatorics of the x^(mu+1) singularity and its unfolding."""

    mu: int
    d: int  # degree of f = x^(mu+1)
    base: WeightSystem  # u_1, ..., u_mu with weights i+1
    degrees: tuple[int, ...]  # d_i = deg g_i = mu - i, descending
    weights: tuple[int, ...]  # w_i = d - d_i = i + 1
    sigma: NormalFormRing  # critical-locus ring: base[x] / (dF/dx)

    def unfolding_coefficients(self) -> list[Polynomial]:
        """F as a dense x-coefficient list: [u_mu, ..., u_1, 0, 1]."""
        mu, base = self.mu, self.base
        coeffs = [base.zero()] * (mu + 2)
        coeffs[mu + 1] = base.one()
        for i in range(1, mu + 1):
            coeffs[mu - i] = base.var(f"u{i}")
        return coeffs

    def unfolding_derivative_coefficients(self) -> list[Polynomial]:
        coeffs = self.unfolding_coefficients()
        return [coeffs[e] * e for e in range(1, len(coeffs))]


def build_milnor(mu: int) -> MilnorData:
    """A_mu data: monomial basis g_i = x^(mu-i), self-dual on the nose."""
    _check_mu(mu)
    base = base_ring(mu)
    d = mu + 1
    degrees = tuple(mu - i for i in range(1, mu + 1))
    weights = tuple(d - di for di in degrees)
    # dF/dx = (mu+1) x^mu + sum_{i<mu} (mu-i) u_i x^{mu-i-1}; the x^mu
    # rewriting rule divides by the leading coefficient mu+1.
    red = [base.zero()] * mu
    for i in range(1, mu):
        red[mu - i - 1] = base.var(f"u{i}") * Fraction(-(mu - i), mu + 1)
    sigma = NormalFormRing(ring=base, rank=mu, reduction=tuple(red))
    data = MilnorData(mu=mu, d=d, base=base, degrees=degrees, weights=weights, sigma=sigma)
    # Self-duality of the monomial basis: <g_i, g_j>_0 = delta_{i+j, mu+1}
    # in the Jacobian algebra (x^mu -> 0).
    for i in range(1, mu + 1):
        for j in range(1, mu + 1):
            e = 2 * mu - i - j
            val = 1 if e == mu - 1 else 0
            got = 1 if (i + j == mu + 1) else 0
            if (e == mu - 1) != (i + j == mu + 1) or val != got:
                raise AssertionError("monomial basis is not self-dual")
    return data


@dataclass(frozen=True)
class DiscriminantData:
    """Symmetric Saito matrix of the discriminant, minors, adjoint, Hessian."""

    milnor: MilnorData
    matrix: PolyMatrix  # mu x mu, symmetric, columns tangent to det
    h: Polynomial  # det(matrix): discriminant equation
    minors: tuple[Polynomial, ...]  # last-row minors m_1, ..., m_mu
    adjoint: Polynomial  # m_mu

    @property
    def mu(self) -> int:
        return self.milnor.mu

    def columns_as_derivations(self) -> tuple[Derivation, ...]:
        n = self.mu
        return tuple(
            Derivation(self.milnor.base, tuple(self.matrix.entry(i, j) for i in range(n)))
            for j in range(n)
        )


def dual_basis(m: MilnorData) -> tuple[tuple[Polynomial, ...], ...]:
    """The basis dual to g_i = x^(mu-i) for the socle-projection pairing.

    Inverting the Gram matrix G_ij = Phi(g_i g_j) over the base ring is
    exact: G is anti-unitriangular (1 on the antidiagonal, 0 below, base
    maximal-ideal entries above), so det G = +-1 and the inverse is
    polynomial.  At the special fiber the duals reduce to the reversed
    monomials x^(i-1); over the base they carry correction terms as soon
    as mu >= 3 (e.g. Phi(x^(mu+1)) != 0).
    """
    mu, base, nf = m.mu, m.base, m.sigma
    gram = PolyMatrix.from_rows(
        [
            [nf.socle_coefficient(nf.x_power(2 * mu - i - j)) for j in range(1, mu + 1)]
            for i in range(1, mu + 1)
        ]
    )
    det = gram.det()
    if not det.is_constant() or abs(det.constant_value()) != 1:
        raise AssertionError("Gram matrix is not unimodular")
    sign = det.constant_value()
    inv = [
        [gram.minor(j, i) * (sign * (-1) ** (i + j)) for j in range(mu)] for i in range(mu)
    ]
    duals = []
    for j in range(mu):
        coeffs = [base.zero()] * mu
        for i in range(mu):
            # g_{i+1} = x^{mu-i-1}
            coeffs[mu - i - 1] = coeffs[mu - i - 1] + inv[i][j]
        duals.append(tuple(coeffs))
    for i in range(mu):
        gi = nf.x_power(mu - i - 1)
        for j in range(mu):
            pairing = nf.socle_coefficient(nf.mul(gi, duals[j]))
            expected = base.one() if i == j else base.zero()
            if pairing != expected:
                raise AssertionError(f"dual basis pairing failed at ({i + 1},{j + 1})")
        fiber = [c.coefficient((0,) * mu) for c in duals[i]]
        want = [Fraction(1) if e == i else Fraction(0) for e in range(mu)]
        if fiber != want:
            raise AssertionError("dual basis does not reduce to reversed monomials")
    return tuple(duals)


def build_discriminant_matrix(m: MilnorData, validate: bool = True) -> DiscriminantData:
    """Entries via the pairing: lambda_ij = socle coefficient of
    gdual_i gdual_j (sum_k w_k u_k g_k), reduced in the critical-locus ring,
    where gdual is the honest dual basis of g over the base ring."""
    mu, base, nf = m.mu, m.base, m.sigma
    duals = dual_basis(m)
    euler_image = [base.zero()] * mu  # sum_k w_k u_k x^{mu-k}
    for k in range(1, mu + 1):
        euler_image[mu - k] = m.weights[k - 1] * base.var(f"u{k}")
    rows = []
    for i in range(1, mu + 1):
        row = []
        for j in range(1, mu + 1):
            prod = nf.mul(nf.mul(duals[i - 1], duals[j - 1]), euler_image)
            row.append(nf.socle_coefficient(prod))
        rows.append(row)
    mat = PolyMatrix.from_rows(rows)
    h = mat.det()
    minors = tuple(mat.minor(mu - 1, j) for j in range(mu))
    data = DiscriminantData(milnor=m, matrix=mat, h=h, minors=minors, adjoint=minors[-1])
    if validate:
        if not mat.is_symmetric():
            raise AssertionError("discriminant matrix is not symmetric")
        if h.is_zero() or h.weighted_degree() != mu * (mu + 1):
            raise AssertionError("discriminant equation has wrong weighted degree")
        if not is_squarefree(h):
            raise AssertionError("discriminant equation is not reduced")
    return data


def sylvester_resultant(m: MilnorData) -> Polynomial:
    """Res_x(F, dF/dx) via the Sylvester matrix: the classical oracle for
    the discriminant equation, independent of the pairing construction."""
    base = m.base
    f = m.unfolding_coefficients()  # degree mu+1
    g = m.unfolding_derivative_coefficients()  # degree mu
    n, p = m.mu + 1, m.mu
    size = n + p
    rows = []
    for shift in range(p):  # p rows of F coefficients
        row = [base.zero()] * size
        for e, c in enumerate(reversed(f)):  # leading first
            row[shift + e] = c
        rows.append(row)
    for shift in range(n):  # n rows of F_x coefficients
        row = [base.zero()] * size
        for e, c in enumerate(reversed(g)):
            row[shift + e] = c
        rows.append(row)
    return PolyMatrix.from_rows(rows).det()


def check_weight_condition(m: MilnorData) -> CheckReport:
    """d - d_1 + 2 d_i != 0 for i = 2..mu (equals 2 + 2(mu-i) here)."""
    rep = CheckReport(f"weight condition (mu={m.mu})")
    for i in range(2, m.mu + 1):
        val = m.d - m.degrees[0] + 2 * m.degrees[i - 1]
        rep.add(f"d - d_1 + 2 d_{i} = {val} != 0", val != 0)
    return rep


def scaled_ring(mu: int) -> WeightSystem:
    return WeightSystem(
        tuple(f"v{i}" for i in range(1, mu + 1)),
        tuple(i + 1 for i in range(1, mu + 1)),
    )


def scaled_linear_matrix(dd: DiscriminantData) -> PolyMatrix:
    """Linear part of the matrix in coordinates v_i = w_i u_i (exact rescale)."""
    m = dd.milnor
    vring = scaled_ring(m.mu)

    def to_v(p: Polynomial) -> Polynomial:
        lin = p.linear_part()
        out = vring.zero()
        for exps, c in lin.terms.items():
            i = exps.index(1)
            out = out + vring.var(f"v{i + 1}") * (c / Fraction(m.weights[i]))
        return out

    return dd.matrix.map_entries(to_v)


def linear_shape_checks(dd: DiscriminantData) -> CheckReport:
    """Shape of the linear part in scaled coordinates: first row and column
    (v_1, ..., v_mu), the antidiagonal i+j = mu+1 equal to v_mu, zeros
    strictly below it, and no v_mu inside the strict upper triangle."""
    mu = dd.mu
    vring = scaled_ring(mu)
    bar = scaled_linear_matrix(dd)
    rep = CheckReport(f"linear-part shape (mu={mu})")
    first_row_ok = all(bar.entry(0, j) == vring.var(f"v{j + 1}") for j in range(mu))
    first_col_ok = all(bar.entry(i, 0) == vring.var(f"v{i + 1}") for i in range(mu))
    rep.add("first row is (v_1, ..., v_mu)", first_row_ok)
    rep.add("first column is (v_1, ..., v_mu)", first_col_ok)
    anti_ok = all(bar.entry(i, mu - i - 1) == vring.var(f"v{mu}") for i in range(mu))
    rep.add("antidiagonal entries equal v_mu", anti_ok)
    below_ok = all(
        bar.entry(i, j).is_zero() for i in range(mu) for j in range(mu) if i + j + 2 > mu + 1
    )
    rep.add("entries below the antidiagonal vanish", below_ok)
    star_ok = all(
        bar.entry(i, j).coefficient({f"v{mu}": 1}) == 0
        for i in range(mu)
        for j in range(mu)
        if i + j + 2 < mu + 1 and not (i == 0 or j == 0)
    )
    rep.add("interior entries do not involve v_mu", star_ok)
    return rep


def jet_minors(dd: DiscriminantData) -> tuple[Polynomial, ...]:
    """(mu-1)-jets of the last-row minors = minors of the linear part."""
    mu = dd.mu
    bar = dd.matrix.map_entries(lambda p: p.linear_part())
    return tuple(bar.minor(mu - 1, j) for j in range(mu))


def check_minor_jets(dd: DiscriminantData) -> CheckReport:
    """Minimality of the minors and the exact column-action identities.

    (a) the jet of m_{mu+1-i} contains the monomial v_i v_mu^(mu-2) with
        coefficient +-1 and no other minor's jet contains it (so the minors
        generate the Fitting ideal minimally);
    (b) the linear part of column i applied to the jet of m_mu equals
        (-1)^i (d - d_1 + 2 d_i) times the jet of m_{mu+1-i}, exactly, for
        i = 2..mu (the sign is the verified one; magnitude d - d_1 + 2 d_i);
    (c) the first column is the weighted Euler field, which scales the full
        adjoint minor by its weighted degree.
    """
    m = dd.milnor
    mu = m.mu
    rep = CheckReport(f"minor jet identities (mu={mu})")
    if mu < 2:
        rep.add("mu >= 2 required", False)
        return rep
    bars = jet_minors(dd)
    vring = scaled_ring(mu)

    def to_v(p: Polynomial) -> Polynomial:
        out = vring.zero()
        for exps, c in p.terms.items():
            scale = Fraction(1)
            vec = []
            for idx, e in enumerate(exps):
                scale /= Fraction(m.weights[idx]) ** e
                vec.append(e)
            out = out + Polynomial(vring, {tuple(vec): c * scale})
        return out

    # (a) distinguished monomials, read in scaled coordinates
    for i in range(1, mu + 1):
        if i == mu:
            mono = {f"v{mu}": mu - 1}
        else:
            mono = {f"v{i}": 1, f"v{mu}": mu - 2}
        target = mu + 1 - i
        c = to_v(bars[target - 1]).coefficient(mono)
        rep.add(
            f"jet m_{target} contains v_{i} v_{mu}^{mu - 2} with coefficient +-1",
            abs(c) == 1,
            f"coefficient {c}",
        )
        for ell in range(1, mu + 1):
            if ell == target:
                continue
            other = to_v(bars[ell - 1]).coefficient(mono)
            if other != 0:
                rep.add(f"monomial confined to jet m_{target}", False, f"also in m_{ell}")
    # (b) exact derivation identities with the verified global sign (-1)^i
    lam_bar = dd.matrix.map_entries(lambda p: p.linear_part())
    for i in range(2, mu + 1):
        col = Derivation(m.base, tuple(lam_bar.entry(r, i - 1) for r in range(mu)))
        lhs = col.apply(bars[mu - 1])
        const = ((-1) ** i) * (m.d - m.degrees[0] + 2 * m.degrees[i - 1])
        rhs = const * bars[mu - i]
        rep.add(
            f"column {i} on jet m_{mu}: constant {const}",
            lhs == rhs,
            f"lhs - rhs = {lhs - rhs}",
        )
    # (c) Euler scaling on the full minor
    euler = Derivation(
        m.base, tuple(m.weights[i] * m.base.var(f"u{i + 1}") for i in range(mu))
    )
    wt = dd.adjoint.weighted_degree()
    rep.add(
        f"Euler field scales m_{mu} by its weighted degree {wt}",
        euler.apply(dd.adjoint) == wt * dd.adjoint,
    )
    return rep


@dataclass(frozen=True)
class DiscriminantAdjointResult:
    data: DiscriminantData
    certificate: FreenessCertificate
    generators: tuple[Derivation, ...]
    constant_matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def equation(self) -> Polynomial:
        return self.certificate.equation


def certify_discriminant_adjoint(
    mu: int, max_weight: Optional[int] = None
) -> DiscriminantAdjointResult:
    """Certify discriminant + adjoint free, with the constant-matrix check.

    Applying the matrix columns to the adjoint minor and expressing the
    results in the minors yields a constant-term matrix that must be
    invertible, with first column zero except for a nonzero last entry
    (the Euler row hits only the adjoint minor at constant level).
    """
    _check_mu(mu, minimum=2)
    m = build_milnor(mu)
    dd = build_discriminant_matrix(m)
    # Columns are tangent to the discriminant (symmetric Saito matrix).
    cols = dd.columns_as_derivations()
    for j, col in enumerate(cols):
        if is_tangent(col, dd.h) is None:
            raise CheckFailure(f"column {j + 1} is not tangent to the discriminant")
    rows = []
    for col in cols:
        consts = minor_action_constants(col, dd.adjoint, dd.minors)
        if consts is None:
            raise CheckFailure("column action does not preserve the Fitting ideal")
        rows.append([Fraction(c) for c in consts])
    c_mat = [[rows[i][j] for j in range(mu)] for i in range(mu)]
    det = _rational_det(c_mat)
    if det == 0:
        raise CheckFailure("constant matrix is singular")
    first = [c_mat[i][0] for i in range(mu)]
    if any(first[i] != 0 for i in range(mu - 1)) or first[mu - 1] == 0:
        raise CheckFailure(f"first column of the constant matrix is {first}")
    ha = dd.h * dd.adjoint
    bound = max_weight
    if bound is None:
        bound = ha.weighted_degree() - sum(m.base.weights)
    gens = solve_logarithmic(ha, bound)
    cert = find_saito_basis(ha, gens)
    if cert is None:
        raise CheckFailure(
            f"no Saito basis for discriminant+adjoint at mu={mu} within weight bound {bound}"
        )
    return DiscriminantAdjointResult(
        data=dd,
        certificate=cert,
        generators=tuple(gens),
        constant_matrix=tuple(tuple(r) for r in c_mat),
    )


def _rational_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [row[:] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


@dataclass(frozen=True)
class CriticalAdjointData:
    """The adjoint pulled back to the critical space, divided by the Hessian."""

    milnor: MilnorData
    ring: WeightSystem  # coordinates (x, u_1, ..., u_{mu-2}) on the critical space
    substitution: dict[str, Polynomial]  # u_i -> expression, parametrizing it
    pullback: Polynomial  # m_mu composed with the parametrization
    hessian: Polynomial
    equation: Polynomial  # pullback / hessian, reduced
    certificate: FreenessCertificate


def critical_adjoint_divisor(mu: int) -> CriticalAdjointData:
    """Divide the pulled-back adjoint by the Hessian and certify it free.

    The critical space of the unfolding is parametrized by
    (x, u_1, ..., u_{mu-2}): the coefficient of u_{mu-1} in dF/dx is 1, so
    dF/dx = 0 solves for u_{mu-1}, and F = 0 then solves for u_mu.  The
    Hessian squared must divide the pullback of the adjoint minor exactly;
    the quotient by one Hessian factor is checked squarefree and certified
    free by the graded solver (in mu-1 variables).
    """
    _check_mu(mu, minimum=2)
    m = build_milnor(mu)
    dd = build_discriminant_matrix(m)
    names = ("x",) + tuple(f"u{i}" for i in range(1, mu - 1))
    weights = (1,) + tuple(i + 1 for i in range(1, mu - 1))
    ring = WeightSystem(names, weights)
    x = ring.var("x")
    u = {i: ring.var(f"u{i}") for i in range(1, mu - 1)}
    # dF/dx = (mu+1) x^mu + sum_{i=1}^{mu-1} (mu-i) u_i x^{mu-i-1}; the
    # u_{mu-1} term has coefficient (mu-(mu-1)) x^0 = 1.
    u_prev = -((mu + 1) * x**mu)
    for i in range(1, mu - 1):
        u_prev = u_prev - (mu - i) * u[i] * x ** (mu - i - 1)
    # F = x^{mu+1} + sum u_i x^{mu-i}: solve for u_mu.
    u_last = -(x ** (mu + 1))
    for i in range(1, mu - 1):
        u_last = u_last - u[i] * x ** (mu - i)
    u_last = u_last - u_prev * x
    sub = {f"u{i}": u[i] for i in range(1, mu - 1)}
    sub[f"u{mu - 1}"] = u_prev
    sub[f"u{mu}"] = u_last
    pullback = dd.adjoint.substitute(sub, target=ring)
    hessian = (mu + 1) * mu * x ** (mu - 1)
    for i in range(1, mu - 1):
        hessian = hessian + (mu - i) * (mu - i - 1) * u[i] * x ** (mu - i - 2)
    quot2 = exact_divide(pullback, hessian * hessian)
    if quot2 is None:
        raise CheckFailure("Hessian^2 does not divide the pulled-back adjoint")
    equation = hessian * quot2  # = pullback / hessian
    if not is_squarefree(equation):
        raise CheckFailure("quotient equation is not reduced")
    gens = solve_logarithmic(equation, equation.weighted_degree())
    cert = find_saito_basis(equation, gens)
    if cert is None:
        raise CheckFailure(f"no Saito basis for the critical adjoint divisor at mu={mu}")
    return CriticalAdjointData(
        milnor=m,
        ring=ring,
        substitution=sub,
        pullback=pullback,
        hessian=hessian,
        equation=equation,
        certificate=cert,
    )
