"""Vector calculus on charts: Lie derivatives, Euler-Lagrange covectors,
closedness, de Rham splitting and linear-ansatz potential finding.

Forms and vector fields are tuples of velocity-free expressions indexed by
the chart coordinates.  Lagrangians are plain expressions in coordinates and
velocities; the Euler-Lagrange covector is the only place accelerations
appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import AnsatzSpec, Chart, Expr, function_monomials, mono_expr
from .exprspace import common_denominator, solve_linear_expr_system

F = Fraction


class NotClosed(Exception):
    pass


class AnsatzExhausted(Exception):
    """The remainder is closed but no potential exists within the ansatz."""


def _check_velocity_free(chart, components):
    for c in components:
        assert c.chart is chart or c.chart == chart
        assert c.is_velocity_free(), "components must be velocity-free"


@dataclass(frozen=True)
class OneForm:
    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        assert len(self.components) == len(self.chart.names)
        _check_velocity_free(self.chart, self.components)

    def __add__(self, other):
        return OneForm(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        return OneForm(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, c):
        return OneForm(self.chart, tuple(x * c for x in self.components))

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        return isinstance(other, OneForm) and all(
            a == b for a, b in zip(self.components, other.components)
        )

    def as_lagrangian(self) -> Expr:
        """The rank-1 Lagrangian w_mu * dq^mu identified with this form."""
        ch = self.chart
        out = Expr.const(ch, 0)
        for name, comp in zip(ch.names, self.components):
            out = out + comp * Expr.var(ch, ch.velocity(name))
        return out


@dataclass(frozen=True)
class VectorFieldExpr:
    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        assert len(self.components) == len(self.chart.names)
        _check_velocity_free(self.chart, self.components)

    def __add__(self, other):
        return VectorFieldExpr(
            self.chart, tuple(a + b for a, b in zip(self.components, other.components))
        )

    def scale(self, c):
        return VectorFieldExpr(self.chart, tuple(x * c for x in self.components))

    def bracket(self, other) -> "VectorFieldExpr":
        """Commutator [X, Y], componentwise X(Y^mu) - Y(X^mu)."""
        ch = self.chart
        comps = []
        for mu in range(len(ch.names)):
            acc = Expr.const(ch, 0)
            for nu, name in enumerate(ch.names):
                acc = acc + self.components[nu] * other.components[mu].partial(name)
                acc = acc - other.components[nu] * self.components[mu].partial(name)
            comps.append(acc)
        return VectorFieldExpr(ch, tuple(comps))


@dataclass(frozen=True)
class ELForm:
    """Euler-Lagrange covector; components may carry accelerations dd<coord>."""

    chart: Chart
    components: tuple[Expr, ...]


@dataclass(frozen=True)
class TwoForm:
    """Antisymmetric 2-form, components indexed by coordinate pairs mu<nu."""

    chart: Chart
    components: tuple[Expr, ...]  # order: pairs (mu,nu), mu<nu, lexicographic

    @staticmethod
    def pairs(chart):
        names = chart.names
        return [(i, j) for i in range(len(names)) for j in range(i + 1, len(names))]


def lie_derivative_scalar(x: VectorFieldExpr, f: Expr) -> Expr:
    """L_X f = X^mu d f / d q^mu for a velocity-free function f."""
    assert f.is_velocity_free(), "lie_derivative_scalar needs a velocity-free function"
    ch = x.chart
    out = Expr.const(ch, 0)
    for comp, name in zip(x.components, ch.names):
        out = out + comp * f.partial(name)
    return out


def lie_derivative_lagrangian(x: VectorFieldExpr, L: Expr) -> Expr:
    """Lie derivative of a rank-1 Lagrangian along a point transformation.

    X^mu dL/dq^mu + (D_t X^mu) dL/d(dq^mu), with D_t X^mu = dq^nu dX^mu/dq^nu.
    """
    assert not L.has_accelerations(), "rank-1 Lagrangians only"
    ch = x.chart
    out = Expr.const(ch, 0)
    for mu, name in enumerate(ch.names):
        out = out + x.components[mu] * L.partial(name)
        dtx = Expr.const(ch, 0)
        for nu, nname in enumerate(ch.names):
            dtx = dtx + Expr.var(ch, ch.velocity(nname)) * x.components[mu].partial(nname)
        out = out + dtx * L.partial(ch.velocity(name))
    assert not out.has_accelerations()
    return out


def lie_derivative_oneform(x: VectorFieldExpr, w: OneForm) -> OneForm:
    """Cartan formula expanded in components: X^nu d_nu w_mu + w_nu d_mu X^nu."""
    ch = x.chart
    comps = []
    for mu, mname in enumerate(ch.names):
        acc = Expr.const(ch, 0)
        for nu, nname in enumerate(ch.names):
            acc = acc + x.components[nu] * w.components[mu].partial(nname)
            acc = acc + w.components[nu] * x.components[nu].partial(mname)
        comps.append(acc)
    return OneForm(ch, tuple(comps))


def euler_lagrange(L: Expr) -> ELForm:
    """Left-hand side of the motion equations of a rank-1 Lagrangian.

    Component mu is
      dL/dq^mu - (d2L/dq^nu d(dq^mu)) dq^nu - (d2L/d(dq^nu) d(dq^mu)) dd q^nu.
    """
    assert not L.has_accelerations()
    ch = L.chart
    comps = []
    for mu, name in enumerate(ch.names):
        dLdv = L.partial(ch.velocity(name))
        acc = L.partial(name)
        for nu, nname in enumerate(ch.names):
            acc = acc - dLdv.partial(nname) * Expr.var(ch, ch.velocity(nname))
            acc = acc - dLdv.partial(ch.velocity(nname)) * Expr.var(ch, ch.acceleration(nname))
        comps.append(acc)
    return ELForm(ch, tuple(comps))


def d_el(f: Expr) -> Expr:
    """d_EL on functions: the full-derivative Lagrangian dq^mu df/dq^mu."""
    assert f.is_velocity_free()
    return gradient(f).as_lagrangian()


def total_time_derivative(e: Expr, tau=False) -> Expr:
    """Chain-rule total derivative: q -> dq -> ddq (and tau -> 1 if enabled)."""
    ch = e.chart
    out = Expr.const(ch, 0)
    for name in ch.names:
        out = out + Expr.var(ch, ch.velocity(name)) * e.partial(name)
        out = out + Expr.var(ch, ch.acceleration(name)) * e.partial(ch.velocity(name))
    if tau:
        out = out + e.partial("tau")
    return out


def gradient(f: Expr) -> OneForm:
    assert f.is_velocity_free()
    ch = f.chart
    return OneForm(ch, tuple(f.partial(name) for name in ch.names))


def is_closed(w: OneForm) -> bool:
    ch = w.chart
    n = len(ch.names)
    for i in range(n):
        for j in range(i + 1, n):
            lhs = w.components[j].partial(ch.names[i])
            rhs = w.components[i].partial(ch.names[j])
            if not (lhs - rhs).is_zero():
                return False
    return True


def exterior_derivative(w: OneForm) -> TwoForm:
    ch = w.chart
    comps = []
    for i, j in TwoForm.pairs(ch):
        comps.append(w.components[j].partial(ch.names[i]) - w.components[i].partial(ch.names[j]))
    return TwoForm(ch, tuple(comps))


def lie_derivative_twoform(x: VectorFieldExpr, w2: TwoForm) -> TwoForm:
    ch = x.chart
    names = ch.names
    pairs = TwoForm.pairs(ch)
    index = {p: k for k, p in enumerate(pairs)}

    def comp(i, j):
        if i == j:
            return Expr.const(ch, 0)
        if i < j:
            return w2.components[index[(i, j)]]
        return -w2.components[index[(j, i)]]

    out = []
    for i, j in pairs:
        acc = Expr.const(ch, 0)
        for r, rname in enumerate(names):
            acc = acc + x.components[r] * comp(i, j).partial(rname)
            acc = acc + comp(r, j) * x.components[r].partial(names[i])
            acc = acc + comp(i, r) * x.components[r].partial(names[j])
        out.append(acc)
    return TwoForm(ch, tuple(out))


def default_ansatz(w: OneForm) -> AnsatzSpec:
    """Degree = max line-degree of w (numerator and denominator) + 1.

    d respects total degree in this algebra, so exact polynomial-trig forms
    have potentials within the bound; rational forms fix the denominator to
    the least common denominator of the components.
    """
    ch = w.chart
    deg = 0
    four = 0
    rational = False
    for c in w.components:
        deg = max(deg, c.num.degree_in(ch.line_names) + c.den.degree_in(ch.line_names))
        four = max(four, c.fourier_order())
        if not c.den.is_one():
            rational = True
    den_expr = None
    if rational:
        lcd, _ = common_denominator(list(w.components))
        den_expr = Expr(ch, lcd)
        deg += lcd.degree_in(ch.line_names)
    return AnsatzSpec(degree=deg + 1, fourier=four, denominator=den_expr)


def find_potential(w: OneForm, ansatz: AnsatzSpec | None = None) -> Expr | None:
    """Velocity-free f with df = w, searched over the ansatz basis; exact.

    Absence only means "not found within the ansatz".  Requires w closed.
    """
    if not is_closed(w):
        raise NotClosed("potential search requires a closed form")
    if ansatz is None:
        ansatz = default_ansatz(w)
    ch = w.chart
    monos = function_monomials(ch, ansatz.degree, ansatz.fourier)
    den = ansatz.denominator if ansatz.denominator is not None else Expr.const(ch, 1)
    columns = []
    for m in monos:
        me = mono_expr(ch, m)
        col = []
        for name in ch.names:
            # d(m/den) = (dm * den - m * d den)/den^2 ; cleared of den^2 below
            col.append(me.partial(name) * den - me * den.partial(name))
        columns.append(col)
    rhs = [w.components[i] * den * den for i in range(len(ch.names))]
    sol = solve_linear_expr_system(columns, rhs)
    if sol is None:
        return None
    f = Expr.const(ch, 0)
    for c, m in zip(sol, monos):
        if c:
            f = f + mono_expr(ch, m) * c
    f = f / den
    return f


def harmonic_coefficient(comp: Expr) -> Fraction:
    """Fourier-constant, line-coordinate-free part of an angle component."""
    if comp.den.is_one():
        return comp.num.coeff(((), ()))
    return F(0)


def derham_split(w: OneForm, ansatz: AnsatzSpec | None = None):
    """Split a closed form into harmonic angle part plus an exact potential.

    Returns ({angle: coefficient}, potential).  Raises NotClosed or
    AnsatzExhausted (never guesses).
    """
    ch = w.chart
    if not is_closed(w):
        raise NotClosed("derham_split requires a closed form")
    harmonic = {}
    rem = w
    for a in ch.angle_names:
        idx = ch.names.index(a)
        c = harmonic_coefficient(w.components[idx])
        harmonic[a] = c
        if c:
            delta = [Expr.const(ch, 0)] * len(ch.names)
            delta[idx] = Expr.const(ch, c)
            rem = rem - OneForm(ch, tuple(delta))
    f = find_potential(rem, ansatz)
    if f is None:
        raise AnsatzExhausted("closed remainder admits no potential within the ansatz")
    # exact reconstruction check
    rebuilt = gradient(f)
    for a, c in harmonic.items():
        if c:
            idx = ch.names.index(a)
            comps = list(rebuilt.components)
            comps[idx] = comps[idx] + c
            rebuilt = OneForm(ch, tuple(comps))
    assert rebuilt == w, "derham_split reconstruction failed"
    return harmonic, f
