"""Bracket axioms and the two independent bracket implementations."""
import random

from helpers import build_qed, gamma_matrices, random_homogeneous, small_basis
from supermech.brackets import SimplecticMetric, berezin, simpletic_bracket
from supermech.superalgebra import (
    Generator,
    Kind,
    Parity,
    const_poly,
    gen_poly,
    parity_of,
)


def test_even_pair():
    basis = small_basis()
    q, p = basis.pairs[0]
    assert berezin(gen_poly(q), gen_poly(p), basis) == const_poly(1)
    assert berezin(gen_poly(p), gen_poly(q), basis) == const_poly(-1)


def test_odd_pair_symmetric():
    basis = small_basis()
    th, pth = basis.pairs[2]
    assert berezin(gen_poly(th), gen_poly(pth), basis) == const_poly(1)
    assert berezin(gen_poly(pth), gen_poly(th), basis) == const_poly(1)


def test_reduced_model_constraint_pair_bracket():
    # {(phi2)_b, (phi3)_a} = -i gamma0[a][b] component-wise
    qed = build_qed()
    legres = qed.legres
    basis = qed.model.phase_basis()
    g0 = gamma_matrices()[0]
    primaries = dict(legres.primary_constraints())
    for b in range(4):
        phi2 = primaries[qed.gens["psi"][b][0]]
        for a in range(4):
            phi3 = primaries[qed.gens["psibar"][a][0]]
            value = berezin(phi2, phi3, basis)
            from supermech.superalgebra import C_I
            assert value == const_poly(-(C_I * g0[a][b]))


def test_simpletic_entries():
    basis = small_basis()
    metric = SimplecticMetric(basis)
    signs = {(str(a), str(b)): s for a, b, s in metric.entries}
    assert signs[("q1", "p1")] == 1
    assert signs[("p1", "q1")] == -1
    assert signs[("th", "pth")] == 1
    assert signs[("pth", "th")] == 1


def test_simpletic_equals_berezin_randomized():
    rng = random.Random(21)
    basis = small_basis()
    metric = SimplecticMetric(basis)
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(400):
        f = random_homogeneous(rng, gens)
        g = random_homogeneous(rng, gens)
        assert simpletic_bracket(f, g, metric) == berezin(f, g, basis)


def test_graded_antisymmetry():
    rng = random.Random(22)
    basis = small_basis()
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(400):
        f = random_homogeneous(rng, gens)
        g = random_homogeneous(rng, gens)
        sign = -1 if (parity_of(f) and parity_of(g)) else 1
        assert (berezin(f, g, basis) + sign * berezin(g, f, basis)).is_zero


def test_graded_leibniz():
    rng = random.Random(23)
    basis = small_basis()
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(300):
        f = random_homogeneous(rng, gens)
        g = random_homogeneous(rng, gens)
        k = random_homogeneous(rng, gens)
        sign = -1 if (parity_of(f) and parity_of(g)) else 1
        lhs = berezin(f, g * k, basis)
        rhs = berezin(f, g, basis) * k + sign * (g * berezin(f, k, basis))
        assert lhs == rhs


def test_graded_jacobi():
    rng = random.Random(24)
    basis = small_basis()
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(300):
        f = random_homogeneous(rng, gens)
        g = random_homogeneous(rng, gens)
        k = random_homogeneous(rng, gens)
        pf, pg, pk = parity_of(f), parity_of(g), parity_of(k)
        s1 = -1 if (pf and pk) else 1
        s2 = -1 if (pg and pf) else 1
        s3 = -1 if (pk and pg) else 1
        total = (s1 * berezin(f, berezin(g, k, basis), basis)
                 + s2 * berezin(g, berezin(k, f, basis), basis)
                 + s3 * berezin(k, berezin(f, g, basis), basis))
        assert total.is_zero


def test_bracket_parity_rule():
    rng = random.Random(25)
    basis = small_basis()
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(400):
        f = random_homogeneous(rng, gens)
        g = random_homogeneous(rng, gens)
        out = berezin(f, g, basis)
        if out.is_zero:
            continue
        assert parity_of(out) == Parity((parity_of(f) + parity_of(g)) & 1)


def test_extended_basis_consistency():
    rng = random.Random(26)
    basis = small_basis()
    t0 = Generator("t0", Parity.EVEN, Kind.COORDINATE, None, 100)
    p0 = Generator("P0", Parity.EVEN, Kind.MOMENTUM, None, 100)
    extended = basis.extend([(t0, p0)])
    gens = [g for pair in basis.pairs for g in pair]
    for _ in range(200):
        f = random_homogeneous(rng, gens)
        h0 = random_homogeneous(rng, gens)
        if parity_of(h0) != Parity.EVEN:
            continue
        lhs = berezin(f, gen_poly(p0) + h0, extended)
        rhs = berezin(f, h0, basis)
        assert lhs == rhs
