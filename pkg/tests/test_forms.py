import random
from fractions import Fraction

import pytest

from dcohom.algebra import AlgebraElement
from dcohom.errors import DegreeOverflow, NotClosed
from dcohom.forms import (
    DerivationVector,
    DifferentialForm,
    apply_derivation,
    de_rham_d,
    dr_cohomology_dims,
    find_potential,
    kunneth_dr,
    lie_bracket,
    potential_with_certificate,
)
from dcohom.spaces import affine, localized, mixed, product, torus
from oracles import convolve, power_rule

F = Fraction
A1, A2, T1, T2 = affine(1), affine(2), torus(1), torus(2)
LOC = localized({2: F(1), 0: F(1)})


def mono(space, *alpha):
    return AlgebraElement.make(space, {tuple(alpha): F(1)})


def form(space, degree, data):
    return DifferentialForm.make(space, degree, data)


def test_apply_derivation_polynomial():
    v = DerivationVector.coordinate(A1, 0)
    assert apply_derivation(v, mono(A1, 2)) == mono(A1, 1).scale(2)


def test_apply_derivation_laurent_quotient_rule():
    v = DerivationVector.coordinate(T1, 0)
    a, da = power_rule(-1)
    assert apply_derivation(v, mono(T1, -1)) == mono(T1, da).scale(a)


def test_apply_derivation_kills_constants():
    v = DerivationVector.make(A1, [mono(A1, 1)])  # x d/dx
    assert apply_derivation(v, AlgebraElement.constant(A1, 5)).is_zero


def test_apply_derivation_leibniz_random():
    rng = random.Random(5)
    for _ in range(30):
        g = AlgebraElement.make(T1, {(rng.randint(-3, 3),): F(rng.randint(-3, 3)) for _ in range(2)})
        h = AlgebraElement.make(T1, {(rng.randint(-3, 3),): F(rng.randint(-3, 3)) for _ in range(2)})
        v = DerivationVector.make(T1, [mono(T1, rng.randint(-2, 2))])
        assert apply_derivation(v, g * h) == g * apply_derivation(v, h) + apply_derivation(v, g) * h


def test_lie_bracket_coordinates_commute():
    dx = DerivationVector.coordinate(A2, 0)
    dy = DerivationVector.coordinate(A2, 1)
    assert all(c.is_zero for c in lie_bracket(dx, dy).components)


def test_lie_bracket_euler_field():
    euler = DerivationVector.make(A1, [mono(A1, 1)])
    ddx = DerivationVector.coordinate(A1, 0)
    out = lie_bracket(euler, ddx)
    assert out.components[0] == AlgebraElement.constant(A1, -1)


def test_lie_bracket_antisymmetry_and_jacobi():
    rng = random.Random(9)

    def rand_vec():
        return DerivationVector.make(
            A2, [AlgebraElement.make(A2, {(rng.randint(0, 3), rng.randint(0, 3)): F(rng.randint(-2, 2))})
                 for _ in range(2)]
        )

    for _ in range(15):
        u, v, w = rand_vec(), rand_vec(), rand_vec()
        assert all(c.is_zero for c in lie_bracket(u, u).components)
        jac = lie_bracket(u, lie_bracket(v, w)).components
        jac2 = lie_bracket(v, lie_bracket(w, u)).components
        jac3 = lie_bracket(w, lie_bracket(u, v)).components
        for a, b, c in zip(jac, jac2, jac3):
            assert (a + b + c).is_zero


def test_de_rham_d_product_rule():
    phi = form(A2, 0, {(): mono(A2, 1, 1)})
    out = de_rham_d(phi).coeff_dict()
    assert out[(0,)] == mono(A2, 0, 1)
    assert out[(1,)] == mono(A2, 1, 0)


def test_de_rham_d_closed_log_form():
    # -x^-2 dx ^ dx = 0; needs rank >= 2 so the answer is an honest 2-form
    phi = form(T2, 1, {(0,): mono(T2, -1, 0)})
    assert de_rham_d(phi).is_zero


def test_de_rham_d_x_dy():
    phi = form(A2, 1, {(1,): mono(A2, 1, 0)})
    out = de_rham_d(phi)
    assert out.coeff_dict() == {(0, 1): AlgebraElement.one(A2)}


def test_d_squared_zero_random_monomial_forms():
    rng = random.Random(21)
    spaces = [A2, T2, mixed(2, [0])]
    for _ in range(60):
        sp = rng.choice(spaces)
        lo = -6
        coeff = {}
        deg = rng.randint(0, sp.num_vars - 2) if sp.num_vars > 1 else 0
        idx = tuple(sorted(rng.sample(range(sp.num_vars), deg)))
        alpha = tuple(
            rng.randint(lo if i in sp.laurent else 0, 6) for i in range(sp.num_vars)
        )
        coeff[idx] = AlgebraElement.make(sp, {alpha: F(rng.randint(-3, 3))})
        phi = form(sp, deg, coeff)
        assert de_rham_d(de_rham_d(phi)).is_zero


def test_degree_overflow_at_top():
    top = form(A1, 1, {(0,): mono(A1, 2)})
    with pytest.raises(DegreeOverflow):
        de_rham_d(top)


def test_dr_dims_golden():
    assert dr_cohomology_dims(A1) == [1, 0]
    assert dr_cohomology_dims(T1) == [1, 1]
    assert dr_cohomology_dims(LOC) == [1, 2]
    assert dr_cohomology_dims(A2) == [1, 0, 0]
    assert dr_cohomology_dims(T2) == [1, 2, 1]
    assert dr_cohomology_dims(mixed(2, [0])) == [1, 1, 0]


def test_dr_dims_products_match_kunneth():
    prod = product(T1, A1)
    dims = dr_cohomology_dims(prod)
    assert dims == kunneth_dr(dr_cohomology_dims(T1), dr_cohomology_dims(A1)) == [1, 1, 0]
    # flattening the product gives the same answer through the atomic route
    assert dims == dr_cohomology_dims(prod.flatten())
    assert dr_cohomology_dims(product(LOC, A1)) == [1, 2, 0]


def test_kunneth_examples():
    assert kunneth_dr([1, 0], [1, 0]) == convolve([1, 0], [1, 0]) == [1, 0, 0]
    assert kunneth_dr([1, 1], [1, 1]) == [1, 2, 1]
    assert kunneth_dr([1, 2], [1, 0]) == convolve([1, 2], [1, 0]) == [1, 2, 0]


def test_find_potential_area_form_gives_x1_dx2():
    omega = form(A2, 2, {(0, 1): AlgebraElement.one(A2)})
    beta = find_potential(omega)
    assert beta.coeff_dict() == {(1,): mono(A2, 1, 0)}  # exactly x1 dx2
    assert de_rham_d(beta) == omega


def test_find_potential_log_form_fails_with_certificate():
    phi = form(T1, 1, {(0,): mono(T1, -1)})
    beta, cert = potential_with_certificate(phi)
    assert beta is None
    assert cert.candidate_dim == 1
    assert not cert.residual.is_zero


def test_find_potential_zero_form():
    z = DifferentialForm.zero(A2, 2)
    assert find_potential(z).is_zero


def test_find_potential_torus_volume_certificate():
    omega = form(T2, 2, {(0, 1): mono(T2, -1, -1)})
    beta, cert = potential_with_certificate(omega)
    assert beta is None
    assert cert.candidate_dim == 2  # dx1/x1 and dx2/x2, both killed by d


def test_find_potential_hermite_exact():
    # d(1/f) = -2x/f^2 dx
    phi = form(LOC, 1, {(0,): AlgebraElement.make(LOC, {(1,): F(-2)}, den_power=2)})
    beta = find_potential(phi)
    assert beta == AlgebraElement.inverse_denominator(LOC)
    assert beta.derivative(0) == phi.coeff_dict()[(0,)]


def test_find_potential_hermite_residue():
    phi = form(LOC, 1, {(0,): AlgebraElement.make(LOC, {(1,): F(2)}, den_power=1)})
    beta, cert = potential_with_certificate(phi)
    assert beta is None
    assert cert.candidate_dim == 2


def test_find_potential_requires_closed():
    phi = form(A2, 1, {(1,): mono(A2, 1, 0)})  # x dy is not closed
    with pytest.raises(NotClosed):
        find_potential(phi)


def test_potential_round_trip_random():
    rng = random.Random(33)
    for _ in range(25):
        sp = rng.choice([A2, T2])
        lo = -4
        alpha = tuple(rng.randint(lo if i in sp.laurent else 0, 4) for i in range(2))
        beta0 = form(sp, 1, {(rng.randint(0, 1),): AlgebraElement.make(sp, {alpha: F(rng.randint(1, 3))})})
        phi = de_rham_d(beta0)
        beta = find_potential(phi)
        assert beta is not None
        assert de_rham_d(beta) == phi


def test_dr_dims_window_guard():
    with pytest.raises(ValueError):
        dr_cohomology_dims(A1, 0)


def test_d_squared_exhaustive_small_monomials():
    # exhaustive d o d = 0 over monomial 0-forms with |exponent| <= 6, r = 1
    for sp in (A1, T1):
        lo = -6 if 0 in sp.laurent else 0
        for e in range(lo, 7):
            phi = form(sp, 0, {(): mono(sp, e)})
            d1 = de_rham_d(phi)
            # top degree is closed by definition on the line
            assert d1.degree == 1
