"""Multi-angle coverage: translations acting on the 2-torus.

Every angle-related code path (harmonic extraction per angle, K1 as a true
tensor product, Fourier-closed truncations of the invariance complex) gets
exercised with two independent circles at once.
"""

from fractions import Fraction

from lagfloor.calculus import OneForm, VectorFieldExpr, d_el, derham_split, gradient
from lagfloor.expr import chart, parse_expr
from lagfloor.hierarchy import (
    ClassifyOptions,
    build_invariance_double_complex,
    classify,
    k_spaces,
)
from lagfloor.liealg import catalog
from lagfloor.pairs import GMPair, validate_pair
from lagfloor.spectral import abutment_check, page

F = Fraction

T2 = chart(("a", "angle"), ("b", "angle"))


def torus_pair():
    fields = (
        VectorFieldExpr(T2, (parse_expr(T2, "1"), parse_expr(T2, "0"))),
        VectorFieldExpr(T2, (parse_expr(T2, "0"), parse_expr(T2, "1"))),
    )
    points = (
        {"a": (F(3, 5), F(4, 5)), "b": (F(0), F(1))},
        {"a": (F(0), F(-1)), "b": (F(-4, 5), F(3, 5))},
        {"a": (F(1), F(0)), "b": (F(5, 13), F(12, 13))},
    )
    return GMPair(catalog("abelian", n=2), T2, fields, True, (), points, "torus")


PAIR = torus_pair()


def P(text):
    return parse_expr(T2, text)


def test_pair_validates():
    assert validate_pair(PAIR).ok


def test_derham_split_two_angles():
    w = gradient(P("sin(a)*cos(b)"))
    comps = list(w.components)
    comps[0] = comps[0] + 2
    comps[1] = comps[1] - 3
    harmonic, pot = derham_split(OneForm(T2, tuple(comps)))
    assert harmonic == {"a": F(2), "b": F(-3)}
    assert gradient(pot) == gradient(P("sin(a)*cos(b)"))


def test_k_spaces_torus():
    rep = k_spaces(PAIR, ClassifyOptions(degree=0, fourier=2))
    # K1 = H^1(T^2) (x) H^1(R^2) is honestly 2 x 2
    assert rep.dims == (2, 4, 1, 0, 0)


def test_classify_fourier_lagrangian_floor4():
    L = P("da^2 + db^2") + d_el(P("sin(a)*cos(b)"))
    rep = classify(PAIR, L, ClassifyOptions(degree=0, fourier=2))
    assert (rep.floor, rep.sign) == (4, "+")


def test_classify_constant_form_is_invariant_floor4():
    # constant-coefficient forms are translation-invariant on the nose
    L = P("da + 2*db")
    rep = classify(PAIR, L, ClassifyOptions(degree=0, fourier=2))
    assert (rep.floor, rep.sign) == (4, "+")


def test_nonclosed_variation_form_is_caught():
    # delta_{e2}(sin(b) da) = cos(b) da, which is not closed:
    # d(cos(b) da) = sin(b) da^db != 0
    L = P("sin(b)*da")
    rep = classify(PAIR, L, ClassifyOptions(degree=0, fourier=2))
    assert rep.status == "not_weakly_invariant"
    gen, residue = rep.failure
    assert gen == "e2"
    assert isinstance(residue, OneForm)


def test_invariance_complex_on_torus():
    ic = build_invariance_double_complex(PAIR, ClassifyOptions(degree=0, fourier=2))
    dc = ic.dc
    p2 = page(dc, 2)
    # E_2^{p,0} = H^p(R^2-translations) = (1, 2, 1)
    assert p2.dim(0, 0) == 1
    assert p2.dim(1, 0) == 2
    assert p2.dim(2, 0) == 1
    assert abutment_check(dc).ok
    # Fourier modes survive the truncation shrink: the function column is
    # the full Fourier space, closed under translations
    assert len(ic.bases[0]) == 25  # (1 + 2*2)^2 monomials at fourier = 2
