"""Radial perturbation families, exact boundary derivatives, shadow
systems, and the not-a-local-maximizer certificate pipeline.

A facewise affine vertex-value vector g induces a positively homogeneous
speed f with f(v) = g(v) at vertices; the radial family moves each vertex
to v / (1 + t g(v)) and tilts each facet normal to a + t c_F, where c_F
is the unique linear form agreeing with g on the facet.  First variations
of integrals over the family are boundary integrals weighted by the
distance of each facet plane from the origin, hence exactly rational:

    d/dt integral_{K_t} h dx |_0   = - sum_F (b/|a|) integral_F h f dsigma
    d^2/dt^2 vol |_0               = (n+1) sum_F (b/|a|) integral_F f^2
    d^2/dt^2 integral |x|^2 |_0    = (n+3) sum_F (b/|a|) integral_F f^2 |x|^2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .decomp import facewise_affine_space
from .errors import (
    CaseNotSupported,
    Degenerate,
    EpsilonTooLarge,
    NotCentered,
    NotFullDimensional,
    NotIsotropic,
    OriginNotInterior,
    PreconditionError,
    StepTooLarge,
    ValidationError,
)
from .exactnum import Matrix, Vec, dot, inverse, is_zero_vec, kernel_basis, rat, rref_rank, solve, vec
from .moments import (
    MomentData,
    body_moments,
    facet_moment,
    isotropy,
    poly_coord,
    poly_linear,
    poly_mul,
    poly_norm2,
)
from .polytope import Polytope, hull_facets, validate

ISOTROPY_TOLERANCE = 1e-8
CENTERING_TOLERANCE = 1e-8
DEFAULT_FD_STEP = Fraction(1, 1000)


@dataclass(frozen=True)
class RadialFamily:
    """Base body plus a facewise affine speed, valid on [-eps, eps]."""

    base: Polytope
    speed: Vec
    eps: Fraction


@dataclass(frozen=True)
class ShadowSystem:
    """Vertices moving linearly along a common direction: hull of
    {v + t * speed(v) * direction}."""

    base: Polytope
    direction: Vec
    speeds: Vec
    t_range: tuple[Fraction, Fraction]


@dataclass(frozen=True)
class DerivativeReport:
    d_vol: Fraction
    d_x: Vec
    d_xx: tuple[Vec, ...]
    d_x2: Fraction
    dd_vol: Fraction | None
    dd_x2: Fraction | None
    method: str


@dataclass(frozen=True)
class SecondDerivativeCertificate:
    value: float
    fd_value: float
    certificate: bool
    exact_value: Fraction
    exact_fd: Fraction


def _check_speed(p: Polytope, g: Sequence) -> Vec:
    g = vec(g)
    if len(g) != len(p.vertices):
        raise PreconditionError("speed vector length %d != %d vertices"
                                % (len(g), len(p.vertices)))
    return g


@lru_cache(maxsize=4096)
def _facet_linear_forms(p: Polytope, g: Vec) -> tuple[Vec, ...]:
    """Per facet, the unique linear form c with <c, v> = g(v) on its vertices.

    With the origin interior each facet's vertices linearly span R^n, so
    c exists iff g is facewise affine and is then unique.
    """
    forms = []
    for f in p.facets:
        rows = [p.vertices[i] for i in f.vertex_indices]
        rhs = [g[i] for i in f.vertex_indices]
        c = solve(Matrix.from_rows(rows, p.dim), rhs)
        if c is None:
            raise PreconditionError("speed vector is not facewise affine")
        forms.append(c)
    return tuple(forms)


@lru_cache(maxsize=4096)
def eps_bound(p: Polytope, g: Vec) -> Fraction:
    """Symmetric validity radius for the radial family of speed g.

    Takes half of the first parameter value at which a moving vertex
    meets a moving non-incident facet plane, intersected with the vertex
    condition |t g(v)| <= 1/2, capped at 1.  The zero speed has no
    breakpoints and returns the cap.
    """
    g = _check_speed(p, g)
    if not p.origin_interior:
        raise OriginNotInterior("radial families need the origin inside")
    forms = _facet_linear_forms(p, g)
    candidates: list[Fraction] = []
    max_speed = max(abs(x) for x in g)
    if max_speed != 0:
        candidates.append(Fraction(1, 2) / max_speed)
    for f, c in zip(p.facets, forms):
        incident = set(f.vertex_indices)
        for i, v in enumerate(p.vertices):
            if i in incident:
                continue
            denom = dot(c, v) - g[i]
            if denom != 0:
                t = (1 - dot(f.normal, v)) / denom
                candidates.append(abs(t) / 2)
    if not candidates:
        return Fraction(1)
    return min(min(candidates), Fraction(1))


def radial_family(p: Polytope, g: Sequence) -> RadialFamily:
    g = _check_speed(p, g)
    return RadialFamily(p, g, eps_bound(p, g))


def radial_polytope(p: Polytope, g: Sequence, t: Fraction) -> Polytope:
    """Body whose gauge is gauge(P) + t * f: vertices move radially to
    v / (1 + t g(v)), facet normals to a + t c_F, incidences unchanged."""
    g = _check_speed(p, g)
    t = rat(t)
    if abs(t) > eps_bound(p, g):
        raise EpsilonTooLarge("|t| = %s exceeds the validity radius %s"
                              % (t, eps_bound(p, g)))
    forms = _facet_linear_forms(p, g)
    verts = [tuple(x / (1 + t * g[i]) for x in v) for i, v in enumerate(p.vertices)]
    facets = [(tuple(a + t * c for a, c in zip(f.normal, cf)), Fraction(1), f.vertex_indices)
              for f, cf in zip(p.facets, forms)]
    try:
        return validate(verts, facets)
    except ValidationError as exc:  # unreachable inside the bound; defensive
        raise EpsilonTooLarge("radial body failed validation at t = %s: %s" % (t, exc)) from exc


def boundary_first_derivatives(p: Polytope, g: Sequence) -> DerivativeReport:
    """d/dt at t=0 of vol, int x, int x x^T, int |x|^2 along the family."""
    g = _check_speed(p, g)
    if not p.origin_interior:
        raise OriginNotInterior("boundary derivatives need the origin inside")
    forms = _facet_linear_forms(p, g)
    n = p.dim
    d_vol = Fraction(0)
    d_x = [Fraction(0)] * n
    d_xx = [[Fraction(0)] * n for _ in range(n)]
    for fi, c in enumerate(forms):
        fpoly = poly_linear(c)
        if not fpoly:
            continue
        d_vol -= facet_moment(p, fi, fpoly)
        for i in range(n):
            d_x[i] -= facet_moment(p, fi, poly_mul(poly_coord(i, n), fpoly))
            for j in range(i, n):
                xij = poly_mul(poly_coord(i, n), poly_coord(j, n))
                d_xx[i][j] -= facet_moment(p, fi, poly_mul(xij, fpoly))
    for i in range(n):
        for j in range(i):
            d_xx[i][j] = d_xx[j][i]
    d_x2 = sum(d_xx[i][i] for i in range(n))
    return DerivativeReport(
        d_vol=d_vol, d_x=tuple(d_x), d_xx=tuple(tuple(r) for r in d_xx),
        d_x2=d_x2, dd_vol=None, dd_x2=None, method="exact-facet")


def boundary_second_derivatives(p: Polytope, g: Sequence) -> DerivativeReport:
    """Adds the exact second derivatives of vol and int |x|^2 at t=0."""
    g = _check_speed(p, g)
    first = boundary_first_derivatives(p, g)
    forms = _facet_linear_forms(p, g)
    n = p.dim
    s_f2 = Fraction(0)
    s_f2x2 = Fraction(0)
    norm2 = poly_norm2(n)
    for fi, c in enumerate(forms):
        fpoly = poly_linear(c)
        if not fpoly:
            continue
        f2 = poly_mul(fpoly, fpoly)
        s_f2 += facet_moment(p, fi, f2)
        s_f2x2 += facet_moment(p, fi, poly_mul(f2, norm2))
    return DerivativeReport(
        d_vol=first.d_vol, d_x=first.d_x, d_xx=first.d_xx, d_x2=first.d_x2,
        dd_vol=(n + 1) * s_f2, dd_x2=(n + 3) * s_f2x2, method="exact-facet")


def gap_integral(p: Polytope, g: Sequence) -> Fraction:
    """Distance-weighted boundary integral of f^2 (|x|^2 - (n+2)).

    The second variation of int (|x|^2 - (n+2)) along the radial family
    strictly exceeds (n+3) times this value whenever g is nonzero; at a
    local maximizer the value itself must be nonnegative.
    """
    g = _check_speed(p, g)
    if not p.origin_interior:
        raise OriginNotInterior("the gap integral needs the origin inside")
    forms = _facet_linear_forms(p, g)
    n = p.dim
    total = Fraction(0)
    norm2 = poly_norm2(n)
    for fi, c in enumerate(forms):
        fpoly = poly_linear(c)
        if not fpoly:
            continue
        f2 = poly_mul(fpoly, fpoly)
        total += facet_moment(p, fi, poly_mul(f2, norm2))
        total -= (n + 2) * facet_moment(p, fi, f2)
    return total


def kernel_direction(p: Polytope) -> Vec | None:
    """Nonzero facewise affine speed killing all first moment derivatives.

    Kernel of the linear map g -> (d/dt int x_i x_j, d/dt int x_i) on
    F(P); nonempty whenever dim F(P) exceeds (n^2+3n)/2.  Exact.
    """
    if not p.origin_interior:
        raise OriginNotInterior("kernel search needs the origin inside")
    basis = facewise_affine_space(p).basis
    n = p.dim
    cols = []
    for b in basis:
        rep = boundary_first_derivatives(p, b)
        col = [rep.d_xx[i][j] for i in range(n) for j in range(i, n)]
        col.extend(rep.d_x)
        cols.append(col)
    rows = [[cols[k][r] for k in range(len(basis))] for r in range(len(cols[0]))]
    ker = kernel_basis(Matrix.from_rows(rows, len(basis)))
    if not ker:
        return None
    coeffs = ker[0]
    m = len(p.vertices)
    g = tuple(sum(coeffs[k] * basis[k][i] for k in range(len(basis))) for i in range(m))
    if is_zero_vec(g):
        return None
    return g


def isotropy_residual(p: Polytope) -> float:
    """max-norm distance of the centroid from 0 and covariance from I."""
    rep = isotropy(p)
    res = max(abs(float(x)) for x in rep.centroid)
    n = p.dim
    for i in range(n):
        for j in range(n):
            target = 1 if i == j else 0
            res = max(res, abs(float(rep.covariance.rows[i][j]) - target))
    return res


def lk_first_derivative(p: Polytope, g: Sequence) -> Fraction:
    """d/dt of L^(2n) at t=0 along the radial family, for isotropic P:
    (1/vol^3) * (d/dt int |x|^2 - (n+2) d/dt vol)."""
    if isotropy_residual(p) > ISOTROPY_TOLERANCE:
        raise NotIsotropic("body is not isotropic within %g" % ISOTROPY_TOLERANCE)
    rep = boundary_first_derivatives(p, g)
    v = body_moments(p).volume
    return (rep.d_x2 - (p.dim + 2) * rep.d_vol) / v ** 3


def l_pow_2n_exact(p: Polytope) -> Fraction:
    return isotropy(p).l_pow_2n


def lk_second_derivative(p: Polytope, g: Sequence,
                         fd_step: Fraction | None = None) -> SecondDerivativeCertificate:
    """d^2/dt^2 of L^(2n) at t=0 along the radial family of g, assembled
    exactly from boundary derivatives, with a finite-difference check.

    Requires P isotropic within tolerance and the variation centered
    (d/dt int x = 0).  A positive value certified by both routes means P
    is not a local maximizer along this family.
    """
    g = _check_speed(p, g)
    if isotropy_residual(p) > ISOTROPY_TOLERANCE:
        raise NotIsotropic("body is not isotropic within %g" % ISOTROPY_TOLERANCE)
    rep = boundary_second_derivatives(p, g)
    md = body_moments(p)
    v = md.volume
    n = p.dim
    center_scale = max(1.0, float(n * v))
    if max(abs(float(x)) for x in rep.d_x) > CENTERING_TOLERANCE * center_scale:
        raise NotCentered("d/dt of the first moments does not vanish")
    sq_sum = sum(rep.d_xx[i][j] ** 2 for i in range(n) for j in range(n))
    bracket = ((n * n + 5 * n + 6) * rep.d_vol ** 2 + rep.d_x2 ** 2
               - (2 * n + 4) * rep.d_vol * rep.d_x2 - sq_sum)
    exact_value = bracket / v ** 4 + (rep.dd_x2 - (n + 2) * rep.dd_vol) / v ** 3

    eps = eps_bound(p, g)
    h = fd_step if fd_step is not None else DEFAULT_FD_STEP
    h = min(rat(h), eps / 2)
    if h <= 0:
        raise StepTooLarge("no admissible finite-difference step")
    l0 = l_pow_2n_exact(p)

    def second_diff(step: Fraction) -> Fraction:
        lp = l_pow_2n_exact(radial_polytope(p, g, step))
        lm = l_pow_2n_exact(radial_polytope(p, g, -step))
        return (lp - 2 * l0 + lm) / step ** 2

    s_h = second_diff(h)
    s_2h = second_diff(2 * h) if 2 * h <= eps else None
    exact_fd = (4 * s_h - s_2h) / 3 if s_2h is not None else s_h
    certificate = exact_value > 0 and exact_fd > 0
    return SecondDerivativeCertificate(
        value=float(exact_value), fd_value=float(exact_fd),
        certificate=certificate, exact_value=exact_value, exact_fd=exact_fd)


# ---------------------------------------------------------------------------
# finite differences

def _quantity_value(md: MomentData, cov_l2n, quantity) -> Fraction:
    if quantity == "vol":
        return md.volume
    if quantity == "x2":
        return md.norm2_integral()
    if quantity == "l2n":
        return cov_l2n()
    if isinstance(quantity, tuple) and quantity and quantity[0] == "x":
        return md.first_moments[quantity[1]]
    if isinstance(quantity, tuple) and quantity and quantity[0] == "xx":
        return md.second_moments.rows[quantity[1]][quantity[2]]
    raise ValueError("unknown quantity %r" % (quantity,))


def finite_difference_oracle(p: Polytope, g: Sequence, quantity,
                             h: Fraction = DEFAULT_FD_STEP) -> float:
    """Richardson-extrapolated central difference of an exact quantity
    along the radial family; the independent check of the facet formulas.

    quantity is one of "vol", "x2", "l2n", ("x", i), ("xx", i, j).
    """
    g = _check_speed(p, g)
    h = rat(h)
    if h <= 0:
        raise StepTooLarge("step must be positive")
    if 2 * h > eps_bound(p, g):
        raise StepTooLarge("2h = %s exceeds the validity radius %s"
                           % (2 * h, eps_bound(p, g)))

    def q(t: Fraction) -> Fraction:
        body = radial_polytope(p, g, t)
        md = body_moments(body)
        return _quantity_value(md, lambda: isotropy(body).l_pow_2n, quantity)

    d_h = (q(h) - q(-h)) / (2 * h)
    d_2h = (q(2 * h) - q(-2 * h)) / (4 * h)
    return float((4 * d_h - d_2h) / 3)


def finite_difference_report(p: Polytope, g: Sequence,
                             h: Fraction = DEFAULT_FD_STEP) -> DerivativeReport:
    """All first derivatives (and second, for vol and |x|^2) by central
    differences of exact moments, sharing the four body evaluations."""
    g = _check_speed(p, g)
    h = rat(h)
    if 2 * h > eps_bound(p, g):
        raise StepTooLarge("2h = %s exceeds the validity radius %s"
                           % (2 * h, eps_bound(p, g)))
    n = p.dim
    md0 = body_moments(p)
    mds = {t: body_moments(radial_polytope(p, g, t * h)) for t in (-2, -1, 1, 2)}

    def first(read) -> Fraction:
        d_h = (read(mds[1]) - read(mds[-1])) / (2 * h)
        d_2h = (read(mds[2]) - read(mds[-2])) / (4 * h)
        return (4 * d_h - d_2h) / 3

    def second(read) -> Fraction:
        s_h = (read(mds[1]) - 2 * read(md0) + read(mds[-1])) / h ** 2
        s_2h = (read(mds[2]) - 2 * read(md0) + read(mds[-2])) / (4 * h ** 2)
        return (4 * s_h - s_2h) / 3

    d_xx = [[first(lambda m, i=i, j=j: m.second_moments.rows[i][j]) for j in range(n)]
            for i in range(n)]
    return DerivativeReport(
        d_vol=first(lambda m: m.volume),
        d_x=tuple(first(lambda m, i=i: m.first_moments[i]) for i in range(n)),
        d_xx=tuple(tuple(r) for r in d_xx),
        d_x2=first(lambda m: m.norm2_integral()),
        dd_vol=second(lambda m: m.volume),
        dd_x2=second(lambda m: m.norm2_integral()),
        method="finite-difference")


# ---------------------------------------------------------------------------
# shadow systems

def shadow_polytope(s: ShadowSystem, t: Fraction) -> Polytope:
    """Hull of the moved vertex set at parameter t; vertices may merge or
    become interior."""
    t = rat(t)
    lo, hi = s.t_range
    if not (lo <= t <= hi):
        raise PreconditionError("t = %s outside the declared range [%s, %s]" % (t, lo, hi))
    moved = [tuple(x + t * s.speeds[i] * u for x, u in zip(v, s.direction))
             for i, v in enumerate(s.base.vertices)]
    try:
        return hull_facets(moved, check=False)
    except NotFullDimensional as exc:
        raise Degenerate("shadow body degenerated at t = %s" % t) from exc


def _edges(p: Polytope) -> list[tuple[int, int]]:
    n = p.dim
    out = []
    for i in range(len(p.vertices)):
        for j in range(i + 1, len(p.vertices)):
            shared = [f.normal for f in p.facets
                      if i in f.vertex_indices and j in f.vertex_indices]
            if len(shared) >= n - 1 and rref_rank(Matrix.from_rows(shared, n))[1] == n - 1:
                out.append((i, j))
    return out


def rs_speed_space(p: Polytope, u: Sequence) -> int:
    """Dimension of the chord-affine shadow speed space in direction u,
    in the tractable case: no facet normal orthogonal to u and the shadow
    of P equal to its central slice.  Then restriction to the boundary
    identifies the space with F(P)."""
    u = vec(u)
    if is_zero_vec(u):
        raise PreconditionError("direction must be nonzero")
    if len(u) != p.dim:
        raise PreconditionError("direction dimension mismatch")
    for f in p.facets:
        if dot(f.normal, u) == 0:
            raise CaseNotSupported("vertical facet: normal orthogonal to the direction")

    n = p.dim
    basis = kernel_basis(Matrix.from_rows([u], n))
    b = Matrix.from_rows(basis, n)
    ginv = inverse(b.matmul(b.transpose()))

    def chart(x: Vec) -> Vec:
        return ginv.matvec(b.matvec(x))

    shadow = hull_facets([chart(v) for v in p.vertices], check=False)

    uu = dot(u, u)
    slice_points = [chart(v) for v in p.vertices if dot(u, v) == 0]
    for i, j in _edges(p):
        vi, vj = p.vertices[i], p.vertices[j]
        si, sj = dot(u, vi), dot(u, vj)
        if (si > 0 and sj < 0) or (si < 0 and sj > 0):
            lam = si / (si - sj)
            point = tuple(a + lam * (c - a) for a, c in zip(vi, vj))
            slice_points.append(chart(point))
    try:
        central = hull_facets(slice_points, check=False)
    except NotFullDimensional:
        raise CaseNotSupported("central slice is lower-dimensional in the chart")
    if central != shadow:
        raise CaseNotSupported("shadow differs from the central slice")
    return facewise_affine_space(p).dimension
