import random
from fractions import Fraction

import pytest

from lagfloor.calculus import OneForm, gradient, is_closed
from lagfloor.cecohom import cohomology
from lagfloor.expr import AnsatzSpec, parse_expr
from lagfloor.pairs import (
    CapExceeded,
    FunctionCochain,
    NotACocycle,
    closure_module,
    function_cochain_to_module_cochain,
    invariant_closed_forms,
    invariant_functions,
    pi_map,
    restrict_cocycle,
    scalar_coboundary,
    stability_subalgebra,
    stability_values_of_constant_cocycles,
    standard_pair,
    validate_pair,
)

F = Fraction

L3 = standard_pair("l3_cylinder")
SO3R3 = standard_pair("so3_r3")
SPHERE = standard_pair("so3_sphere")
GAL = standard_pair("galilean_r4")
POI = standard_pair("poincare_r4", c=1)
TRANS2 = standard_pair("translations", n=2)


def P(text, pair=L3):
    return parse_expr(pair.chart, text)


def oneform(pair, *comps):
    return OneForm(pair.chart, tuple(P(c, pair) for c in comps))


# -- pair validation ------------------------------------------------------------

@pytest.mark.parametrize("pair", [L3, SO3R3, SPHERE, GAL, POI, TRANS2], ids=lambda p: p.name)
def test_standard_pairs_validate(pair):
    assert validate_pair(pair).ok


def test_broken_pair_reports_failures():
    from lagfloor.pairs import GMPair

    bad = GMPair(L3.algebra, L3.chart, (L3.fields[0], L3.fields[2], L3.fields[1]))
    report = validate_pair(bad)
    assert not report.ok
    assert report.failures


# -- pi map -----------------------------------------------------------------------

def test_pi_of_dphi_on_cylinder():
    out = pi_map(L3, oneform(L3, "0", "1"))
    assert out.components[0].is_zero()
    assert out.components[1] == P("z")
    assert out.components[2] == P("1")


def test_pi_of_gradient_is_coboundary():
    f = P("z^2*sin(phi)")
    out = pi_map(L3, gradient(f))
    want = scalar_coboundary(L3, f)
    assert all((a - b).is_zero() for a, b in zip(out.components, want.components))


def test_pi_naturality_random_closed_forms():
    rng = random.Random(31)
    monos = ["1", "z", "z^2", "sin(phi)", "cos(2*phi)", "z*cos(phi)"]
    for _ in range(20):
        f = P("0")
        for m in monos:
            if rng.random() < 0.5:
                f = f + P(m) * F(rng.randint(-3, 3), rng.randint(1, 2))
        c = F(rng.randint(-2, 2))
        w = gradient(f)
        comps = list(w.components)
        comps[1] = comps[1] + c  # harmonic c*dphi keeps it closed
        w = OneForm(L3.chart, tuple(comps))
        assert is_closed(w)
        out = pi_map(L3, w)  # asserts naturality internally
        assert out.is_cocycle()


def test_monopole_contraction_consistency():
    # alpha = (-g u, -g v, g) restricted against the radial section gives -g
    g = F(3)
    alpha = FunctionCochain(
        SPHERE, (P("-3*u", SPHERE), P("-3*v", SPHERE), P("3", SPHERE))
    )
    assert alpha.is_cocycle()
    values = restrict_cocycle(SPHERE, alpha, SPHERE.sample_points[0])
    assert list(values.values()) == [-g]


# -- closure modules -----------------------------------------------------------------

def test_closure_of_z_on_cylinder():
    fm = closure_module(L3, [P("z")])
    assert fm.dim == 2
    labels = [str(e) for e in fm.basis_exprs]
    assert any("z" in s for s in labels)


def test_closure_spin1_on_r3():
    fm = closure_module(SO3R3, [parse_expr(SO3R3.chart, "x1")])
    assert fm.dim == 3
    h1 = cohomology(SO3R3.algebra, fm.module, 1)
    h2 = cohomology(SO3R3.algebra, fm.module, 2)
    assert h1.dim == 0 and h2.dim == 0  # Whitehead at spin 1


def test_closure_spin2_whitehead():
    seeds = [parse_expr(SO3R3.chart, s) for s in ("x1*x2", "x1^2 - x2^2")]
    fm = closure_module(SO3R3, seeds)
    assert fm.dim == 5
    assert cohomology(SO3R3.algebra, fm.module, 1).dim == 0
    assert cohomology(SO3R3.algebra, fm.module, 2).dim == 0


def test_closure_cap_exceeded_on_fourier_seed():
    with pytest.raises(CapExceeded):
        closure_module(L3, [P("z*sin(phi)")], cap=8)


def test_module_cochain_conversion():
    fm = closure_module(L3, [P("z")])
    alpha = FunctionCochain(L3, (P("0"), P("2*z + 3"), P("2")))
    z = function_cochain_to_module_cochain(fm, alpha)
    d = __import__("lagfloor.cecohom", fromlist=["ce_differential"]).ce_differential(
        L3.algebra, fm.module, 1
    )
    assert not any(d.mul_vec(z.to_vector()))


# -- invariants ------------------------------------------------------------------------

def test_invariant_functions_cylinder_constants_only():
    inv = invariant_functions(L3, AnsatzSpec(3, 3))
    assert len(inv.basis) == 1
    assert inv.basis[0].is_constant()


def test_invariant_functions_translations_constants_only():
    inv = invariant_functions(TRANS2, AnsatzSpec(3, 0))
    assert len(inv.basis) == 1


def test_invariant_functions_so3_r3_radius():
    inv = invariant_functions(SO3R3, AnsatzSpec(2, 0))
    assert len(inv.basis) == 2  # constants and x.x
    degs = sorted(f.line_degree() for f in inv.basis)
    assert degs == [0, 2]


def test_invariant_forms_cylinder():
    res = invariant_closed_forms(L3, AnsatzSpec(3, 3))
    assert res.h1_inv.dim == 1
    rep = res.representatives[0]
    # generated by dz: z-component constant, phi-component zero
    assert rep.components[0].is_constant()
    assert rep.components[1].is_zero()


def test_invariant_forms_translations():
    res = invariant_closed_forms(TRANS2, AnsatzSpec(2, 0))
    assert res.h1_inv.dim == 2  # constant-coefficient dx^i mod d(constants)


def test_invariant_forms_so3_r3_quotient_kills_radial():
    res = invariant_closed_forms(SO3R3, AnsatzSpec(2, 0))
    # closed invariant forms contain d(x.x); invariant functions contain x.x
    assert res.h1_inv.dim == 0


# -- stability subalgebras ---------------------------------------------------------------

def test_stability_cylinder_is_e2_minus_z_e3():
    z0 = F(1, 2)
    stab = stability_subalgebra(L3, {"z": z0, "phi": (F(3, 5), F(4, 5))})
    assert stab.dim == 1
    v = stab.basis[0]
    # proportional to e2 - z0 e3
    assert v[0] == 0 and v[1] != 0 and v[2] == -z0 * v[1]


def test_stability_translations_trivial():
    stab = stability_subalgebra(TRANS2, TRANS2.sample_points[0])
    assert stab.dim == 0


def test_stability_so3_r3_is_rotation_axis():
    pt = {"x1": F(1), "x2": F(2), "x3": F(2)}
    stab = stability_subalgebra(SO3R3, pt)
    assert stab.dim == 1
    v = stab.basis[0]
    # proportional to (x1, x2, x3)
    assert v[1] * F(1) == v[0] * F(2) and v[2] * F(1) == v[0] * F(2)


def test_stability_constant_dim_along_orbits():
    for pair in (L3, SPHERE, TRANS2, GAL, POI):
        dims = {stability_subalgebra(pair, pt).dim for pt in pair.sample_points}
        assert len(dims) == 1


def test_galilean_stability_is_six_dimensional():
    stab = stability_subalgebra(GAL, GAL.sample_points[0])
    assert stab.dim == 6


# -- cocycle restriction -----------------------------------------------------------------

def test_restrict_l3_cocycle_gives_b():
    a, b = F(2), F(5)
    alpha = FunctionCochain(L3, (P("0"), P("2*z + 5"), P("2")))
    values = restrict_cocycle(L3, alpha, L3.sample_points[0])
    assert list(values.values()) == [b]
    assert (F(0), F(1), -L3.sample_points[0]["z"]) in values


def test_restrict_coboundary_is_zero():
    f = P("z^2*cos(phi)")
    cob = scalar_coboundary(L3, f)
    values = restrict_cocycle(L3, cob, L3.sample_points[1])
    assert all(v == 0 for v in values.values())


def test_restrict_descends_to_cohomology():
    alpha = FunctionCochain(L3, (P("0"), P("2*z + 5"), P("2")))
    shifted = alpha + scalar_coboundary(L3, P("z*sin(phi)"))
    v1 = restrict_cocycle(L3, alpha, L3.sample_points[0])
    v2 = restrict_cocycle(L3, shifted, L3.sample_points[0])
    assert list(v1.values()) == list(v2.values())


def test_restrict_requires_cocycle():
    # delta(bad)_{12} = -c^3_{12} * z = -z != 0
    bad = FunctionCochain(L3, (P("0"), P("0"), P("z")))
    assert not bad.is_cocycle()
    with pytest.raises(NotACocycle):
        restrict_cocycle(L3, bad, L3.sample_points[0])


def test_constant_cocycle_values_on_stability():
    # Z^1(l3) restricted to the stability line: t(e2 - z e3) = t2, all of R
    vals, _ = stability_values_of_constant_cocycles(L3, L3.sample_points[0])
    assert vals.dim == 1
    # for so3 there are no constant cocycles: the value space is zero
    vals, _ = stability_values_of_constant_cocycles(SPHERE, SPHERE.sample_points[0])
    assert vals.dim == 0
