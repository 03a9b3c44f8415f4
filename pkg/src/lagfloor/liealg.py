"""Finite-dimensional Lie algebras by structure constants, plus a catalog.

The Poincare and Galilean tables are never typed in by hand: they are derived
once per process by symbolically commuting the defining vector fields on R^4
and reading coefficients off with an exact linear solve.  A golden test pins
the derived values, which removes transcription risk without freezing files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .calculus import VectorFieldExpr
from .expr import Expr, chart, parse_expr
from .exprspace import solve_linear_expr_system

F = Fraction


class UnknownName(Exception):
    pass


class BadParams(Exception):
    pass


@dataclass(frozen=True)
class StructureConstants:
    """Lie algebra given by c^k_{ij} for i<j (antisymmetry implied)."""

    dim: int
    basis_names: tuple[str, ...]
    c: dict = field(default_factory=dict)  # (i, j) i<j -> {k: Fraction}

    def __post_init__(self):
        assert len(self.basis_names) == self.dim
        for (i, j), comps in self.c.items():
            assert 0 <= i < j < self.dim
            for k, v in comps.items():
                assert 0 <= k < self.dim and isinstance(v, Fraction)

    def coeff(self, i, j, k) -> Fraction:
        """c^k_{ij} for arbitrary i, j."""
        if i == j:
            return F(0)
        if i < j:
            return self.c.get((i, j), {}).get(k, F(0))
        return -self.c.get((j, i), {}).get(k, F(0))

    def bracket_vector(self, i, j):
        """[e_i, e_j] as a coefficient tuple."""
        return tuple(self.coeff(i, j, k) for k in range(self.dim))

    def __hash__(self):
        items = tuple(sorted((ij, tuple(sorted(d.items()))) for ij, d in self.c.items()))
        return hash((self.dim, self.basis_names, items))

    def __eq__(self, other):
        if not isinstance(other, StructureConstants):
            return NotImplemented
        if (self.dim, self.basis_names) != (other.dim, other.basis_names):
            return False
        keys = set(self.c) | set(other.c)
        for ij in keys:
            a = {k: v for k, v in self.c.get(ij, {}).items() if v}
            b = {k: v for k, v in other.c.get(ij, {}).items() if v}
            if a != b:
                return False
        return True


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    violations: tuple  # of (i, j, k, l)


def jacobi_check(g: StructureConstants) -> JacobiReport:
    """Exact check of sum_m (c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj) = 0."""
    n = g.dim
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(n):
                    s = F(0)
                    for m in range(n):
                        s += g.coeff(i, j, m) * g.coeff(m, k, l)
                        s += g.coeff(j, k, m) * g.coeff(m, i, l)
                        s += g.coeff(k, i, m) * g.coeff(m, j, l)
                    if s:
                        bad.append((i, j, k, l))
    return JacobiReport(not bad, tuple(bad))


def bracket(g: StructureConstants, x, y):
    """([x, y])^k = c^k_{ij} x^i y^j for coefficient vectors x, y."""
    assert len(x) == len(y) == g.dim
    out = [F(0)] * g.dim
    for (i, j), comps in g.c.items():
        coeff = F(x[i]) * F(y[j]) - F(x[j]) * F(y[i])
        if coeff:
            for k, v in comps.items():
                out[k] += v * coeff
    return tuple(out)


def _sc(dim, names, entries):
    c = {}
    for i, j, k, v in entries:
        c.setdefault((i, j), {})[k] = F(v)
    return StructureConstants(dim, tuple(names), c)


_EPS = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}


R4 = chart(("t", "line"), ("x1", "line"), ("x2", "line"), ("x3", "line"))

POINCARE_BASIS = ("p0", "p1", "p2", "p3", "B1", "B2", "B3", "L1", "L2", "L3")


def poincare_fields(c_light: Fraction | None) -> tuple[VectorFieldExpr, ...]:
    """Fundamental fields on R^4 in the order (p0, p_i, B_i, L_i).

    ``c_light=None`` gives the Galilean contraction (the 1/c^2 terms of the
    boosts dropped).
    """

    def f(*comps):
        return VectorFieldExpr(R4, tuple(parse_expr(R4, s) for s in comps))

    fields = [f("1", "0", "0", "0"), f("0", "1", "0", "0"), f("0", "0", "1", "0"), f("0", "0", "0", "1")]
    inv_c2 = None if c_light is None else F(1) / (F(c_light) * F(c_light))
    for i in (1, 2, 3):
        comps = ["0", "0", "0", "0"]
        comps[i] = "t"
        boost = f(*comps)
        if inv_c2 is not None:
            extra = ["0"] * 4
            extra[0] = f"x{i}"
            boost = VectorFieldExpr(
                R4, tuple(a + b * inv_c2 for a, b in zip(boost.components, f(*extra).components))
            )
        fields.append(boost)
    # L_i = -eps_{ijk} x^j d/dx^k
    for i in range(3):
        comps = [Expr.const(R4, 0)] * 4
        for jj in range(3):
            for kk in range(3):
                e = _EPS.get((i, jj, kk), 0)
                if e:
                    comps[kk + 1] = comps[kk + 1] - Expr.var(R4, f"x{jj + 1}") * e
        fields.append(VectorFieldExpr(R4, tuple(comps)))
    return tuple(fields)


def _derive_constants(fields, names) -> StructureConstants:
    n = len(fields)
    columns = [list(fields[k].components) for k in range(n)]
    c = {}
    for i in range(n):
        for j in range(i + 1, n):
            br = fields[i].bracket(fields[j])
            sol = solve_linear_expr_system(columns, list(br.components))
            assert sol is not None, "bracket escaped the span of the fields"
            comps = {k: v for k, v in enumerate(sol) if v}
            if comps:
                c[(i, j)] = comps
    return StructureConstants(n, tuple(names), c)


_CATALOG_CACHE: dict = {}


def catalog(name: str, **params) -> StructureConstants:
    """Named algebras: abelian(n), l3, so3, galilean, poincare(c)."""
    key = (name, tuple(sorted((k, F(v)) for k, v in params.items())))
    if key in _CATALOG_CACHE:
        return _CATALOG_CACHE[key]
    g = _build_catalog(name, params)
    _CATALOG_CACHE[key] = g
    return g


def _build_catalog(name, params):
    if name == "abelian":
        n = int(params.get("n", 0))
        if n <= 0:
            raise BadParams("abelian requires n >= 1")
        return _sc(n, [f"e{i + 1}" for i in range(n)], [])
    if name == "l3":
        if params:
            raise BadParams("l3 takes no parameters")
        return _sc(3, ["e1", "e2", "e3"], [(0, 1, 2, 1)])
    if name == "so3":
        if params:
            raise BadParams("so3 takes no parameters")
        entries = []
        for (i, j, k), v in _EPS.items():
            if i < j:
                entries.append((i, j, k, v))
        return _sc(3, ["e1", "e2", "e3"], entries)
    if name == "galilean":
        if params:
            raise BadParams("galilean takes no parameters")
        return _derive_constants(poincare_fields(None), POINCARE_BASIS)
    if name == "poincare":
        c = F(params.get("c", 1))
        if c <= 0:
            raise BadParams("poincare requires a positive rational c")
        extra = set(params) - {"c"}
        if extra:
            raise BadParams(f"unknown parameters {sorted(extra)}")
        return _derive_constants(poincare_fields(c), POINCARE_BASIS)
    raise UnknownName(f"no catalog algebra named {name!r}")


def zero_one_cocycles(g: StructureConstants):
    """Basis of Z^1(G) = {t : c^k_{ij} t_k = 0}, i.e. H^1 with trivial coeffs."""
    from .linalg import Mat, kernel_basis

    rows = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            rows.append([g.coeff(i, j, k) for k in range(g.dim)])
    if not rows:
        return kernel_basis(Mat.zero(1, g.dim))
    return kernel_basis(Mat.from_rows(rows, g.dim))
