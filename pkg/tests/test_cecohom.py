import random
from fractions import Fraction

import pytest

from lagfloor.cecohom import (
    Cochain,
    GModule,
    NotACocycle,
    ce_differential,
    coboundary_witness,
    cochain_dim,
    cohomology,
    is_cocycle,
    validate_module,
)
from lagfloor.liealg import catalog
from lagfloor.linalg import Mat

F = Fraction


def so3_spin1():
    """Action of so(3) on linear functions span{x1,x2,x3}: rho_i = matrix of L_i."""
    g = catalog("so3")
    eps = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}
    mats = []
    for i in range(3):
        ent = [[F(0)] * 3 for _ in range(3)]
        # L_i = -eps_{ijk} x^j d/dx^k acts on x^s: L_i x^s = -eps_{ijs} x^j... read off
        for j in range(3):
            for k in range(3):
                e = eps.get((i, j, k), 0)
                if e:
                    # field term -e * x^j d/dx^k sends x^k -> -e x^j
                    ent[j][k] -= F(e)
        mats.append(Mat.from_rows(ent))
    return GModule(3, g, tuple(mats))


def test_trivial_module_validates():
    for name in ("l3", "so3", "galilean"):
        g = catalog(name)
        assert validate_module(GModule.trivial(g)).ok


def test_spin1_module_validates():
    assert validate_module(so3_spin1()).ok


def test_corrupted_module_detected():
    a = so3_spin1()
    bad_action = list(a.action)
    rows = bad_action[0].row_lists()
    rows[0][0] += 1
    bad_action[0] = Mat.from_rows(rows)
    report = validate_module(GModule(3, a.algebra, tuple(bad_action)))
    assert not report.ok
    assert (0, 1) in report.violations


def test_differential_degree_zero_trivial_coeffs():
    g = catalog("l3")
    d0 = ce_differential(g, GModule.trivial(g), 0)
    assert d0.is_zero()


def test_differential_degree_one_trivial_coeffs():
    # (delta c)(h_i, h_j) = -c_k c^k_{ij}
    g = catalog("l3")
    d1 = ce_differential(g, GModule.trivial(g), 1)
    c = (F(0), F(0), F(1))  # the e^3 cochain
    out = d1.mul_vec(c)
    # pairs in lex order: (0,1), (0,2), (1,2); [e1,e2] = e3
    assert out == (F(-1), F(0), F(0))


def test_so3_trivial_h1_h2_zero():
    g = catalog("so3")
    triv = GModule.trivial(g)
    assert cohomology(g, triv, 1).dim == 0
    assert cohomology(g, triv, 2).dim == 0


def test_l3_trivial_h1_h2():
    g = catalog("l3")
    triv = GModule.trivial(g)
    h1 = cohomology(g, triv, 1)
    assert h1.dim == 2
    for rep in h1.representatives:
        # components (a, b, 0): nothing on e3
        assert rep.value((2,)) == (F(0),)
    assert cohomology(g, triv, 2).dim == 2


def test_abelian_trivial_hq_binomial():
    from math import comb

    for n in (2, 3):
        g = catalog("abelian", n=n)
        triv = GModule.trivial(g)
        for q in range(n + 1):
            assert cohomology(g, triv, q).dim == comb(n, q)


def bargmann_pattern(g):
    """delta_ij pairing of p_i with B_j, all other components zero."""
    idx = {n: i for i, n in enumerate(g.basis_names)}
    comps = {}
    for i in range(1, 4):
        a, b = idx[f"p{i}"], idx[f"B{i}"]
        comps[(min(a, b), max(a, b))] = (F(1) if a < b else F(-1),)
    return comps


def test_galilean_h2_is_bargmann():
    g = catalog("galilean")
    triv = GModule.trivial(g)
    h2 = cohomology(g, triv, 2)
    assert h2.dim == 1
    # the Bargmann pattern is a nontrivial cocycle...
    z = Cochain(2, triv, bargmann_pattern(g))
    assert is_cocycle(g, triv, z)
    assert coboundary_witness(g, triv, z) is None
    # ...and spans the quotient: reducing it gives a nonzero coordinate
    assert any(h2.quotient.reduce(z.to_vector()))


def test_poincare_h2_zero_and_witness_exists():
    g = catalog("poincare", c=1)
    triv = GModule.trivial(g)
    assert cohomology(g, triv, 1).dim == 0
    assert cohomology(g, triv, 2).dim == 0
    z = Cochain(2, triv, bargmann_pattern(g))
    # same component pattern is NOT a cocycle of the Poincare algebra; the
    # honest statement is that every Poincare 2-cocycle is a coboundary
    if is_cocycle(g, triv, z):
        assert coboundary_witness(g, triv, z) is not None
    h2 = cohomology(g, triv, 2)
    assert h2.dim == 0


def test_witness_roundtrip_random_coboundaries():
    rng = random.Random(11)
    g = catalog("l3")
    triv = GModule.trivial(g)
    d1 = ce_differential(g, triv, 1)
    for _ in range(10):
        b = tuple(F(rng.randint(-5, 5)) for _ in range(cochain_dim(g, triv, 1)))
        z = Cochain.from_vector(triv, 2, d1.mul_vec(b))
        w = coboundary_witness(g, triv, z)
        assert w is not None
        assert d1.mul_vec(w.to_vector()) == z.to_vector()


def test_witness_requires_cocycle():
    g = catalog("so3")
    triv = GModule.trivial(g)
    z = Cochain(1, triv, {(0,): (F(1),)})
    # delta z != 0 for so3: z(e3)=0 but z([e1,e2]) = z(e3) = 0... pick one that fails
    z = Cochain(1, triv, {(2,): (F(1),)})
    with pytest.raises(NotACocycle):
        coboundary_witness(g, triv, z)


def test_whitehead_spin1():
    a = so3_spin1()
    g = a.algebra
    assert cohomology(g, a, 1).dim == 0
    assert cohomology(g, a, 2).dim == 0


def random_conjugate(rng, module):
    """Valid module in a random basis: rho -> P rho P^{-1}."""
    n = module.dim
    while True:
        rows = [[F(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        p = Mat.from_rows(rows)
        from lagfloor.linalg import kernel_basis

        if kernel_basis(p).dim == 0:
            break
    from lagfloor.linalg import solve

    # P^{-1} column by column
    inv_cols = [solve(p, [F(i == j) for i in range(n)]) for j in range(n)]
    pinv = Mat.from_rows([[inv_cols[j][i] for j in range(n)] for i in range(n)])
    return GModule(n, module.algebra, tuple(p.mul(m).mul(pinv) for m in module.action))


def test_delta_squared_zero_fuzz():
    rng = random.Random(2024)
    from lagfloor.cecohom import _sparse_product_is_zero
    from lagfloor.pairs import closure_module, standard_pair
    from lagfloor.expr import parse_expr

    l3_pair = standard_pair("l3_cylinder")
    l3_module = closure_module(l3_pair, [parse_expr(l3_pair.chart, "z")]).module
    for base in (GModule.trivial(catalog("l3")), l3_module, so3_spin1()):
        for _ in range(3):
            a = random_conjugate(rng, base)
            assert validate_module(a).ok
            g = a.algebra
            for q in range(g.dim):
                d_q = ce_differential(g, a, q)
                d_next = ce_differential(g, a, q + 1)
                assert _sparse_product_is_zero(d_next, d_q)


def test_euler_characteristic_identity():
    # sum (-1)^q dim C^q = sum (-1)^q dim H^q, exactly, for every finite
    # complex: an independent structural check on kernel/image bookkeeping
    from math import comb

    cases = [
        (catalog("l3"), GModule.trivial(catalog("l3"))),
        (catalog("so3"), so3_spin1()),
        (catalog("abelian", n=3), GModule.trivial(catalog("abelian", n=3))),
    ]
    for g, a in cases:
        chi_cochains = sum((-1) ** q * comb(g.dim, q) * a.dim for q in range(g.dim + 1))
        chi_cohomology = sum((-1) ** q * cohomology(g, a, q).dim for q in range(g.dim + 1))
        assert chi_cochains == chi_cohomology


def test_dims_invariant_under_module_basis_permutation():
    a = so3_spin1()
    g = a.algebra
    perm = [2, 0, 1]
    P = Mat.from_rows([[F(j == perm[i]) for j in range(3)] for i in range(3)])
    Pinv = P.transpose()
    conj = tuple(P.mul(m).mul(Pinv) for m in a.action)
    b = GModule(3, g, conj)
    assert validate_module(b).ok
    for q in (1, 2):
        assert cohomology(g, b, q).dim == cohomology(g, a, q).dim
