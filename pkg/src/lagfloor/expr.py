"""Exact expression algebra on charts R^a x T^b.

Expressions are fractions of *trig polynomials*: rational-coefficient
polynomials in the line coordinates, velocities ``d<coord>``, accelerations
``dd<coord>`` (and the time symbol ``tau`` in Noether outputs), times at most
one Fourier factor ``sin(k*phi)`` / ``cos(k*phi)`` per angle coordinate.
Products of trig factors are normalized to Fourier form on the fly
(product-to-sum identities), so a trig polynomial has one canonical
representation and equality of expressions is decided exactly: identical
numerator/denominator pairs, or cross multiplication.

Angle coordinates never appear bare: ``phi`` is not a function on the
circle, only ``sin(k*phi)``, ``cos(k*phi)`` and the velocity ``dphi`` are.
This is precisely what makes ``dphi`` closed but not exact.

Denominators are reduced by content/sign normalization, common monomial
factors and exact trial division (full, and divisor-vs-divisor when adding),
which keeps every fraction arising from the supported Lagrangian families in
lowest terms; equality never relies on reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

F = Fraction

LINE = "line"
ANGLE = "angle"


class ParseError(Exception):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


class UnknownSymbol(ParseError):
    pass


class EvaluationPole(Exception):
    """Denominator vanishes at the evaluation point."""


@dataclass(frozen=True)
class Chart:
    """Ordered chart coordinates; kind is 'line' or 'angle'."""

    coords: tuple[tuple[str, str], ...]

    def __post_init__(self):
        names = [n for n, _ in self.coords]
        assert len(set(names)) == len(names), "duplicate coordinate names"
        for n, k in self.coords:
            assert n and k in (LINE, ANGLE)

    @property
    def names(self):
        return tuple(n for n, _ in self.coords)

    @property
    def line_names(self):
        return tuple(n for n, k in self.coords if k == LINE)

    @property
    def angle_names(self):
        return tuple(n for n, k in self.coords if k == ANGLE)

    def kind(self, name):
        for n, k in self.coords:
            if n == name:
                return k
        raise KeyError(name)

    def velocity(self, name):
        return "d" + name

    def acceleration(self, name):
        return "dd" + name

    @property
    def velocity_names(self):
        return tuple("d" + n for n in self.names)

    @property
    def acceleration_names(self):
        return tuple("dd" + n for n in self.names)


def chart(*coords):
    """chart(('z','line'), ('phi','angle')) convenience constructor."""
    return Chart(tuple((n, k) for n, k in coords))


# ---------------------------------------------------------------------------
# monomials: (vars, trig)
#   vars: sorted tuple of (name, exponent>0)
#   trig: sorted tuple of (angle, 's'|'c', k>=1), at most one entry per angle
# ---------------------------------------------------------------------------

UNIT = ((), ())


def _merge_vars(a, b):
    d = dict(a)
    for n, e in b:
        d[n] = d.get(n, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e))


def _trig_pair_product(f1, f2):
    """Product of two Fourier factors of the same angle -> [(factor|None, coeff)]."""
    k1, k2 = f1[1], f2[1]

    def norm(kind, k, coeff):
        if k == 0:
            return (None, coeff) if kind == "c" else None
        if k < 0:
            k = -k
            if kind == "s":
                coeff = -coeff
        return ((kind, k), coeff)

    half = F(1, 2)
    if f1[0] == "s" and f2[0] == "s":
        raw = [("c", k1 - k2, half), ("c", k1 + k2, -half)]
    elif f1[0] == "c" and f2[0] == "c":
        raw = [("c", k1 - k2, half), ("c", k1 + k2, half)]
    elif f1[0] == "s" and f2[0] == "c":
        raw = [("s", k1 + k2, half), ("s", k1 - k2, half)]
    else:  # c * s
        raw = [("s", k1 + k2, half), ("s", k2 - k1, half)]
    out = []
    for kind, k, coeff in raw:
        r = norm(kind, k, coeff)
        if r is not None:
            out.append(r)
    return out


def _mono_mul(m1, m2):
    """Product of two monomials -> list of (monomial, coeff)."""
    vars_ = _merge_vars(m1[0], m2[0])
    t1, t2 = dict(), dict()
    for a, kind, k in m1[1]:
        t1[a] = (kind, k)
    for a, kind, k in m2[1]:
        t2[a] = (kind, k)
    angles = sorted(set(t1) | set(t2))
    per_angle = []
    for a in angles:
        if a in t1 and a in t2:
            opts = [(a, fac, co) for fac, co in _trig_pair_product(t1[a], t2[a])]
        else:
            kind, k = t1.get(a) or t2.get(a)
            opts = [(a, (kind, k), F(1))]
        per_angle.append(opts)
    results = []
    for combo in iproduct(*per_angle):
        coeff = F(1)
        trig = []
        for a, fac, co in combo:
            coeff *= co
            if fac is not None:
                trig.append((a, fac[0], fac[1]))
        results.append(((vars_, tuple(sorted(trig))), coeff))
    return results


class TP:
    """Trig polynomial in canonical Fourier normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # constructors -----------------------------------------------------
    @staticmethod
    def const(c):
        c = F(c)
        return TP({UNIT: c}) if c else TP()

    @staticmethod
    def var(name, exp=1):
        return TP({(((name, exp),), ()): F(1)})

    @staticmethod
    def trig(angle, kind, k=1):
        assert kind in ("s", "c") and k >= 1
        return TP({((), ((angle, kind, k),)): F(1)})

    # predicates ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_one(self):
        return self.terms == {UNIT: F(1)}

    def const_value(self):
        if not self.terms:
            return F(0)
        if set(self.terms) == {UNIT}:
            return self.terms[UNIT]
        return None

    def __eq__(self, other):
        return isinstance(other, TP) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, F(0)) + c
        return TP(out)

    def __neg__(self):
        return TP({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = F(c)
        if not c:
            return TP()
        return TP({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, extra in _mono_mul(m1, m2):
                    out[m] = out.get(m, F(0)) + c1 * c2 * extra
        return TP(out)

    # structure ----------------------------------------------------------
    def var_names(self):
        s = set()
        for vars_, _ in self.terms:
            for n, _e in vars_:
                s.add(n)
        return s

    def angle_names(self):
        s = set()
        for _, trig in self.terms:
            for a, _k, _n in trig:
                s.add(a)
        return s

    def has_any_var(self, names):
        names = set(names)
        return any(n in names for vars_, _ in self.terms for n, _e in vars_)

    def is_trig_free(self):
        return all(not trig for _, trig in self.terms)

    def degree_in(self, names):
        names = set(names)
        best = 0
        for vars_, _ in self.terms:
            d = sum(e for n, e in vars_ if n in names)
            best = max(best, d)
        return best

    def fourier_order(self):
        best = 0
        for _, trig in self.terms:
            for _a, _kind, k in trig:
                best = max(best, k)
        return best

    def lead_monomial(self):
        """Largest monomial in the canonical order (None for the zero poly)."""
        return max(self.terms) if self.terms else None

    def coeff(self, mono):
        return self.terms.get(mono, F(0))

    # calculus -----------------------------------------------------------
    def partial_var(self, name):
        out = {}
        for (vars_, trig), c in self.terms.items():
            d = dict(vars_)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            m = (tuple(sorted(d.items())), trig)
            out[m] = out.get(m, F(0)) + c * e
        return TP(out)

    def partial_angle(self, angle):
        out = {}
        for (vars_, trig), c in self.terms.items():
            for i, (a, kind, k) in enumerate(trig):
                if a != angle:
                    continue
                if kind == "s":
                    new = trig[:i] + ((a, "c", k),) + trig[i + 1 :]
                    coeff = c * k
                else:
                    new = trig[:i] + ((a, "s", k),) + trig[i + 1 :]
                    coeff = -c * k
                m = (vars_, new)
                out[m] = out.get(m, F(0)) + coeff
        return TP(out)

    # evaluation -----------------------------------------------------------
    def evaluate(self, var_values, angle_values):
        """Exact value; angles are given as rational (sin, cos) pairs."""
        total = F(0)
        cache = {}
        for (vars_, trig), c in self.terms.items():
            val = c
            for n, e in vars_:
                val *= var_values[n] ** e
            for a, kind, k in trig:
                key = (a, k)
                if key not in cache:
                    # sin/cos of k*theta by the angle-addition recurrence
                    s1, c1 = angle_values[a]
                    s, co = s1, c1
                    for _ in range(k - 1):
                        s, co = s * c1 + co * s1, co * c1 - s * s1
                    cache[key] = (s, co)
                s, co = cache[key]
                val *= s if kind == "s" else co
            total += val
        return total

    # exact division -------------------------------------------------------
    def divide_by(self, d):
        """Exact quotient self/d for trig-free d, or None if not divisible."""
        if d.is_zero():
            raise ZeroDivisionError
        if not d.is_trig_free():
            return None
        dc = d.const_value()
        if dc is not None:
            return self.scale(F(1) / dc)
        groups = {}
        for (vars_, trig), c in self.terms.items():
            groups.setdefault(trig, {})[vars_] = c
        dpoly = {vars_: c for (vars_, _), c in d.terms.items()}
        names = sorted(set(n for v in dpoly for n, _ in v) | {n for g in groups.values() for v in g for n, _ in v})
        idx = {n: i for i, n in enumerate(names)}

        def dense(v):
            e = [0] * len(names)
            for n, k in v:
                e[idx[n]] = k
            return tuple(e)

        def sparse(e):
            return tuple((names[i], k) for i, k in enumerate(e) if k)

        dd = {dense(v): c for v, c in dpoly.items()}
        dlead = max(dd)
        out = {}
        for trig, g in groups.items():
            rem = {dense(v): c for v, c in g.items()}
            quo = {}
            while rem:
                m = max(rem)
                if any(a < b for a, b in zip(m, dlead)):
                    return None
                qm = tuple(a - b for a, b in zip(m, dlead))
                qc = rem[m] / dd[dlead]
                quo[qm] = qc
                for dm, dc2 in dd.items():
                    t = tuple(a + b for a, b in zip(qm, dm))
                    nv = rem.get(t, F(0)) - qc * dc2
                    if nv:
                        rem[t] = nv
                    else:
                        rem.pop(t, None)
            for qm, qc in quo.items():
                mono = (sparse(qm), trig)
                out[mono] = out.get(mono, F(0)) + qc
        return TP(out)

    def common_var_factor(self):
        """Largest monomial in the plain variables dividing every term."""
        common = None
        for vars_, _ in self.terms:
            d = dict(vars_)
            if common is None:
                common = d
            else:
                common = {n: min(e, d.get(n, 0)) for n, e in common.items() if d.get(n, 0)}
            if not common:
                return {}
        return common or {}

    def divide_var_factor(self, factor):
        out = {}
        for (vars_, trig), c in self.terms.items():
            d = dict(vars_)
            for n, e in factor.items():
                d[n] = d.get(n, 0) - e
                assert d[n] >= 0
            out[(tuple(sorted((n, e) for n, e in d.items() if e)), trig)] = c
        return TP(out)

    def __repr__(self):
        return f"TP({self.terms!r})"


TP_ONE = TP.const(1)
TP_ZERO = TP()


class Expr:
    """Canonical fraction of two trig polynomials on a fixed chart."""

    __slots__ = ("chart", "num", "den")

    def __init__(self, chart_, num, den=None):
        den = den if den is not None else TP_ONE
        if den.is_zero():
            raise ZeroDivisionError("expression denominator is identically zero")
        if num.is_zero():
            num, den = TP_ZERO, TP_ONE
        else:
            num, den = _reduce_fraction(num, den)
        self.chart = chart_
        self.num = num
        self.den = den

    # constructors ---------------------------------------------------------
    @staticmethod
    def const(chart_, c):
        return Expr(chart_, TP.const(c))

    @staticmethod
    def var(chart_, name):
        return Expr(chart_, TP.var(name))

    # predicates -------------------------------------------------------------
    def is_zero(self):
        return self.num.is_zero()

    def const_value(self):
        """The Fraction this expression equals identically, or None."""
        if self.den.is_one():
            return self.num.const_value()
        lead = self.den.lead_monomial()
        c = self.num.coeff(lead) / self.den.coeff(lead)
        return c if (self.num - self.den.scale(c)).is_zero() else None

    def is_constant(self):
        return self.const_value() is not None

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        return (self.num * other.den - other.num * self.den).is_zero()

    # equality is by cross multiplication, which a reduced-pair hash cannot
    # honor for every rational pair; expressions are not hashable
    __hash__ = None

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if self.den.is_one() and other.den.is_one():
            return Expr(self.chart, self.num + other.num)
        if self.den == other.den:
            return Expr(self.chart, self.num + other.num, self.den)
        q = self.den.divide_by(other.den)
        if q is not None:
            return Expr(self.chart, self.num + other.num * q, self.den)
        q = other.den.divide_by(self.den)
        if q is not None:
            return Expr(self.chart, self.num * q + other.num, other.den)
        return Expr(self.chart, self.num * other.den + other.num * self.den, self.den * other.den)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return Expr(self.chart, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1.is_one() and d2.is_one():
            return Expr(self.chart, n1 * n2)
        q = n1.divide_by(d2) if not d2.is_one() else None
        if q is not None:
            n1, d2 = q, TP_ONE
        q = n2.divide_by(d1) if not d1.is_one() else None
        if q is not None:
            n2, d1 = q, TP_ONE
        return Expr(self.chart, n1 * n2, d1 * d2)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero expression")
        return self * Expr(self.chart, other.den, other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        assert isinstance(k, int)
        if k < 0:
            return Expr.const(self.chart, 1) / self ** (-k)
        out = Expr.const(self.chart, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def _coerce(self, other):
        if isinstance(other, Expr):
            return other
        return Expr.const(self.chart, other)

    # calculus -----------------------------------------------------------
    def partial(self, gen):
        """Exact partial derivative by a coordinate, velocity or acceleration.

        For an angle coordinate the derivative acts through the sin/cos
        generators by the chain rule.
        """
        ch = self.chart
        if gen in ch.names and ch.kind(gen) == ANGLE:
            dnum = self.num.partial_angle(gen)
            dden = self.den.partial_angle(gen)
        elif gen in ch.names or gen in ch.velocity_names or gen in ch.acceleration_names or gen == "tau":
            dnum = self.num.partial_var(gen)
            dden = self.den.partial_var(gen)
        else:
            raise UnknownSymbol(f"unknown generator {gen!r}", 0)
        if dden.is_zero():
            return Expr(ch, dnum, self.den)
        return Expr(ch, dnum * self.den - self.num * dden, self.den * self.den)

    # structure ----------------------------------------------------------
    def is_velocity_free(self):
        vel = set(self.chart.velocity_names) | set(self.chart.acceleration_names)
        return not (self.num.has_any_var(vel) or self.den.has_any_var(vel))

    def has_accelerations(self):
        acc = set(self.chart.acceleration_names)
        return self.num.has_any_var(acc) or self.den.has_any_var(acc)

    def line_degree(self):
        return max(self.num.degree_in(self.chart.line_names), self.den.degree_in(self.chart.line_names))

    def fourier_order(self):
        return max(self.num.fourier_order(), self.den.fourier_order())

    def subs_zero(self, names):
        """Set the given plain generators to zero (exactly)."""
        names = set(names)

        def kill(tp):
            return TP({m: c for m, c in tp.terms.items() if not any(n in names for n, _ in m[0])})

        den = kill(self.den)
        if den.is_zero():
            raise EvaluationPole("denominator vanishes after substitution")
        return Expr(self.chart, kill(self.num), den)

    def evaluate(self, point):
        """point: {line/velocity/acc name: Fraction, angle name: (sin, cos)}."""
        var_values, angle_values = {}, {}
        for k, v in point.items():
            if isinstance(v, tuple):
                s, c = F(v[0]), F(v[1])
                assert s * s + c * c == 1, f"angle values for {k} not on the unit circle"
                angle_values[k] = (s, c)
            else:
                var_values[k] = F(v)
        den = self.den.evaluate(var_values, angle_values)
        if den == 0:
            raise EvaluationPole(f"denominator vanishes at {point}")
        return self.num.evaluate(var_values, angle_values) / den

    def __repr__(self):
        return f"Expr({to_string(self)!r})"


def _reduce_fraction(num, den):
    # common monomial factor in the plain variables
    fn = num.common_var_factor()
    fd = den.common_var_factor()
    common = {n: min(e, fd.get(n, 0)) for n, e in fn.items() if fd.get(n, 0)}
    common = {n: e for n, e in common.items() if e}
    if common:
        num = num.divide_var_factor(common)
        den = den.divide_var_factor(common)
    if den.is_one():
        return num, den
    if num == den:
        return TP_ONE, TP_ONE
    q = num.divide_by(den)
    if q is not None:
        return q, TP_ONE
    # monic denominator (leading coefficient 1) for a canonical pair
    lead = den.coeff(den.lead_monomial())
    if lead != 1:
        inv = F(1) / lead
        num, den = num.scale(inv), den.scale(inv)
    return num, den


# ---------------------------------------------------------------------------
# ansatz enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzSpec:
    """Search space for potentials/invariants: line-degree and Fourier bounds.

    ``denominator`` (a velocity-free Expr), when set, fixes candidate
    functions to p/denominator with p ranging over the monomial basis.
    """

    degree: int
    fourier: int
    denominator: "Expr | None" = None


def function_monomials(chart_, degree, fourier):
    """All velocity-free basis monomials with line-degree<=degree, order<=fourier."""
    line = chart_.line_names
    angles = chart_.angle_names
    line_parts = []

    def rec(i, remaining, current):
        if i == len(line):
            line_parts.append(tuple((n, e) for n, e in current if e))
            return
        for e in range(remaining + 1):
            rec(i + 1, remaining - e, current + [(line[i], e)])

    rec(0, degree, [])
    trig_opts = []
    for a in angles:
        opts = [None]
        for k in range(1, fourier + 1):
            opts.append((a, "s", k))
            opts.append((a, "c", k))
        trig_opts.append(opts)
    out = []
    for lp in line_parts:
        for combo in iproduct(*trig_opts):
            trig = tuple(sorted(x for x in combo if x is not None))
            out.append((tuple(sorted(lp)), trig))
    out.sort()
    return out


def mono_expr(chart_, mono):
    return Expr(chart_, TP({mono: F(1)}))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], i))
            i = j
            continue
        if ch in _OPS:
            toks.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, chart_, text, extra_names=()):
        self.chart = chart_
        self.toks = _tokenize(text)
        self.pos = 0
        self.extra = set(extra_names)

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected trailing input {t[1]!r}", t[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.factor()
            if op == "*":
                e = e * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", self.peek()[2])
                e = e / rhs
        return e

    def factor(self):
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.next()[0] == "-":
                sign = -sign
        e = self.power()
        return e if sign > 0 else -e

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.next()
            neg = False
            if self.peek()[0] == "-":
                self.next()
                neg = True
            t = self.expect("int")
            k = -t[1] if neg else t[1]
            return base**k
        return base

    def atom(self):
        t = self.next()
        kind, val, pos = t
        if kind == "int":
            return Expr.const(self.chart, val)
        if kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if val in ("sin", "cos"):
                return self.trig_call(val, pos)
            return self.symbol(val, pos)
        raise ParseError(f"unexpected token {val!r}", pos)

    def trig_call(self, fn, pos):
        self.expect("(")
        t = self.next()
        k = 1
        if t[0] == "int":
            k = t[1]
            self.expect("*")
            t = self.next()
        if t[0] != "name":
            raise ParseError(f"{fn} argument must be an angle coordinate", t[2])
        name = t[1]
        if name not in self.chart.angle_names:
            raise UnknownSymbol(f"{fn} argument {name!r} is not an angle coordinate", t[2])
        self.expect(")")
        if k < 1:
            raise ParseError(f"{fn} harmonic must be a positive integer", pos)
        return Expr(self.chart, TP.trig(name, "s" if fn == "sin" else "c", k))

    def symbol(self, name, pos):
        ch = self.chart
        if name in ch.names:
            if ch.kind(name) == ANGLE:
                raise ParseError(
                    f"angle coordinate {name!r} cannot appear bare; use sin({name})/cos({name}) or d{name}",
                    pos,
                )
            return Expr.var(ch, name)
        if name in ch.velocity_names or name in ch.acceleration_names or name in self.extra:
            return Expr.var(ch, name)
        raise UnknownSymbol(f"unknown symbol {name!r}", pos)


def parse_expr(chart_, text, params=None, extra_names=()):
    """Parse ``text`` against a chart.

    ``params`` maps parameter names to exact rationals, substituted before
    parsing (the expression algebra itself is parameter-free).
    """
    if params:
        for name, value in params.items():
            value = F(value)
            text = _substitute_name(text, name, f"({value.numerator}/{value.denominator})")
    return _Parser(chart_, text, extra_names).parse()


def _substitute_name(text, name, replacement):
    out = []
    i, n = 0, len(text)
    while i < n:
        j = text.find(name, i)
        if j < 0:
            out.append(text[i:])
            break
        before_ok = j == 0 or not (text[j - 1].isalnum() or text[j - 1] == "_")
        after = j + len(name)
        after_ok = after >= n or not (text[after].isalnum() or text[after] == "_")
        if before_ok and after_ok:
            out.append(text[i:j])
            out.append(replacement)
            i = after
        else:
            out.append(text[i : j + 1])
            i = j + 1
    return "".join(out)


# ---------------------------------------------------------------------------
# printing (round-trips through parse_expr)
# ---------------------------------------------------------------------------

def _mono_to_string(mono, coeff):
    vars_, trig = mono
    parts = []
    for n, e in vars_:
        parts.append(n if e == 1 else f"{n}^{e}")
    for a, kind, k in trig:
        fn = "sin" if kind == "s" else "cos"
        parts.append(f"{fn}({a})" if k == 1 else f"{fn}({k}*{a})")
    body = "*".join(parts)
    c = abs(coeff)
    if not body:
        return _frac_str(c)
    if c == 1:
        return body
    return f"{_frac_str(c)}*{body}"


def _frac_str(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _tp_to_string(tp):
    if tp.is_zero():
        return "0"
    items = sorted(tp.terms.items(), reverse=True)
    out = []
    for i, (m, c) in enumerate(items):
        piece = _mono_to_string(m, c)
        if i == 0:
            out.append(piece if c > 0 else f"-{piece}")
        else:
            out.append(f" + {piece}" if c > 0 else f" - {piece}")
    return "".join(out)


def to_string(e):
    num = _tp_to_string(e.num)
    if e.den.is_one():
        return num
    den = _tp_to_string(e.den)
    return f"({num})/({den})"
