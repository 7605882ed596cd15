"""Acceptance suite: the exit criteria, one test per criterion.

Each test prints a PASS line on success (run with -s to see them); arithmetic
is exact so every comparison is equality.  Criteria that carry a runtime
budget assert it with time.monotonic.
"""

import random
import time
from fractions import Fraction

from dcohom.algebra import AlgebraElement
from dcohom.catalog import CATALOG, catalog_entry
from dcohom.deformations import DeformedOperator, deformed_multiply
from dcohom.errors import NotStabilized
from dcohom.forms import (
    DifferentialForm,
    de_rham_d,
    dr_cohomology_dims,
    kunneth_dr,
)
from dcohom.grammar import parse_form, parse_space
from dcohom.hochschild import (
    Chain,
    Cochain,
    Derivation,
    c1_derivation,
    connes_B,
    cup,
    delta_chain,
    delta_cochain,
    is_inner_within,
    solve_derivations,
)
from dcohom.koszul import (
    KoszulCochain,
    hh_homology_via_koszul,
    hh_via_de_rham,
    hh_via_koszul,
    koszul_differential,
)
from dcohom.deformations import derivation_to_automorphism
from dcohom.engine import run_command
from dcohom.operators import (
    DiffOperator,
    Filtration,
    center_operators,
    commutator,
    commutator_reduction,
    multiply,
    op_basis_keys,
)
from dcohom.spaces import affine, product, torus

F = Fraction
WINDOW = 6


def _entry(name):
    return catalog_entry(name).spec


def _report(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS  ({detail})")


def _random_monomial_op(rng, space, max_deg=3):
    r = space.num_vars
    alpha = tuple(rng.randint(-max_deg if i in space.laurent else 0, max_deg) for i in range(r))
    beta = tuple(rng.randint(0, max_deg) for _ in range(r))
    c = rng.choice([1, -1, 2, -2, 3])
    return DiffOperator.make(space, {beta: AlgebraElement.make(space, {alpha: F(c)})})


def test_criterion_1_de_rham_golden_table():
    t0 = time.monotonic()
    for entry in CATALOG:
        assert dr_cohomology_dims(entry.spec, WINDOW) == list(entry.expected), entry.name
    # torus(2) doubles as the Künneth check
    assert kunneth_dr([1, 1], [1, 1]) == list(catalog_entry("torus2").expected)
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0, f"golden table took {elapsed:.1f}s"
    _report("1 (de Rham golden table)", f"{elapsed:.2f}s for six entries")


def test_criterion_2_hh_equals_de_rham_cross_route():
    times = {}
    for entry in CATALOG:
        t0 = time.monotonic()
        try:
            report = hh_via_koszul(entry.spec, Filtration(WINDOW, WINDOW))
        except NotStabilized:
            report = hh_via_koszul(entry.spec, Filtration(WINDOW + 2, WINDOW + 2))
        dr = hh_via_de_rham(entry.spec, WINDOW)
        padded = list(dr) + [0] * (len(report.dims) - len(dr))
        assert list(report.dims) == padded, entry.name
        assert all(report.stabilized), entry.name
        times[entry.name] = time.monotonic() - t0
        assert times[entry.name] < 120.0, f"{entry.name} took {times[entry.name]:.1f}s"
    # the runtime clause is pinned at window 8: re-run cold (caches cleared)
    from dcohom import koszul as _koszul

    worst8 = 0.0
    for entry in CATALOG:
        _koszul._dims_cache.clear()
        t0 = time.monotonic()
        report8 = hh_via_koszul(entry.spec, Filtration(8, 8))
        elapsed = time.monotonic() - t0
        dr = hh_via_de_rham(entry.spec, WINDOW)
        padded = list(dr) + [0] * (len(report8.dims) - len(dr))
        assert list(report8.dims) == padded, entry.name
        assert elapsed < 120.0, f"{entry.name} took {elapsed:.1f}s at window 8"
        worst8 = max(worst8, elapsed)
    worst = max(times, key=times.get)
    _report(
        "2 (HH = de Rham cross-route)",
        f"six entries, worst {worst} {times[worst]:.1f}s; cold window-8 worst {worst8:.1f}s",
    )


def test_criterion_3_van_den_bergh_duality_and_hh0():
    duality_spaces = ["affine1", "torus1", "affine2", "torus2"]
    for name in duality_spaces:
        spec = _entry(name)
        wf = Filtration(WINDOW, WINDOW)
        coh = hh_via_koszul(spec, wf)
        hom = hh_homology_via_koszul(spec, wf)
        two_r = len(coh.dims) - 1
        r = two_r // 2
        assert all(coh.dims[n] == hom.dims[two_r - n] for n in range(two_r + 1)), name
        for n in range(two_r + 1):
            if hom.dims[n]:
                assert r <= n <= two_r, f"{name}: HH_{n} outside [r, 2r]"
        assert hom.dims[0] == 0, f"{name}: HH_0 nonzero"
    reductions = 0
    for name in duality_spaces:
        spec = _entry(name)
        for key in op_basis_keys(spec, Filtration(WINDOW, WINDOW)):
            u = DiffOperator.from_op_key(spec, key)
            pairs = commutator_reduction(u)
            total = DiffOperator.zero(spec)
            for p, q in pairs:
                total = total + commutator(p, q)
            assert total == u
            reductions += 1
    _report(
        "3 (VdB duality, concentration, HH_0 = 0)",
        f"4 spaces, {reductions} basis elements reduced to commutators",
    )


def test_criterion_4_center_is_span_one():
    atomic = ["affine1", "affine2", "torus1", "torus2", "localized_x2p1"]
    for name in atomic:
        ops = center_operators(_entry(name), Filtration(6, 6))
        assert len(ops) == 1, name
        value = ops[0].constant_value()
        assert value is not None and value != 0, name
    _report("4 (center = span{1})", "five atomic entries at bound (6,6)")


def test_criterion_5_outer_derivations_match_h1():
    expected = {
        "affine1": 0,
        "affine2": 0,
        "torus1": 1,
        "torus2": 2,
        "localized_x2p1": 2,
        "torus1_x_affine1": 1,
    }
    for entry in CATALOG:
        # solve_derivations verifies stabilization between bound and bound+2
        _, _, outer = solve_derivations(entry.spec, Filtration(WINDOW, WINDOW))
        h1 = dr_cohomology_dims(entry.spec, WINDOW)[1]
        assert outer == h1 == expected[entry.name], entry.name
    # the log form's derivation is certified non-inner at bound 8
    t1 = _entry("torus1")
    lam = DifferentialForm.make(t1, 1, {(0,): AlgebraElement.coordinate(t1, 0, -1)})
    d = c1_derivation(lam)
    assert not is_inner_within(d, Filtration(8, 8))
    _report("5 (outer derivations = H^1_dR)", "six entries; log class non-inner at bound 8")


def test_criterion_6_deformation_dichotomy():
    doc = run_command("deform", parse_space("affine(2)"), window=3, omega="dx1^dx2")
    kinds = {w["kind"]: w["expr"] for w in doc.witnesses}
    assert kinds["potential"] == "x1*dx2"
    assert doc.dims["class-nonzero"] == [0]

    doc2 = run_command(
        "deform",
        parse_space("product(torus(1), torus(1))"),
        window=3,
        omega="x1^-1 x2^-1 dx1^dx2",
    )
    assert doc2.dims["class-nonzero"] == [1]
    kinds2 = {w["kind"] for w in doc2.witnesses}
    assert "certificate" in kinds2

    rng = random.Random(2024)
    a2 = affine(2)
    gm2 = product(torus(1), torus(1)).flatten()
    omega_a = parse_form(a2, "dx1^dx2")
    omega_t = parse_form(gm2, "x1^-1 x2^-1 dx1^dx2")
    checks = 0
    for space, omega in [(a2, omega_a), (gm2, omega_t)]:
        for _ in range(1000):
            ops = [
                DeformedOperator.make(
                    space, omega, _random_monomial_op(rng, space), _random_monomial_op(rng, space)
                )
                for _ in range(3)
            ]
            lhs = deformed_multiply(deformed_multiply(ops[0], ops[1]), ops[2])
            rhs = deformed_multiply(ops[0], deformed_multiply(ops[1], ops[2]))
            assert (lhs - rhs).is_zero
            checks += 1
    _report("6 (deformation dichotomy)", f"witness x1*dx2; certificate on Gm^2; {checks} associativity samples")


def test_criterion_7_complex_identities():
    t0 = time.monotonic()
    rng = random.Random(777)
    a1, t1 = affine(1), torus(1)
    n = 500

    # delta o delta = 0 on cochains
    for _ in range(n):
        m = _random_monomial_op(rng, a1, 2)
        ddc = delta_cochain(delta_cochain(Cochain.structural(a1, 0, lambda m=m: m)))
        args = (_random_monomial_op(rng, a1, 2), _random_monomial_op(rng, a1, 2))
        assert ddc.evaluate(args).is_zero

    # delta o delta = 0 on chains
    for _ in range(n):
        tup = tuple(_random_monomial_op(rng, a1, 2) for _ in range(3))
        c = Chain.from_operators(a1, 2, [(tup, F(1))])
        assert delta_chain(delta_chain(c)).is_zero

    # d o d = 0 for de Rham
    t2 = torus(2)
    for _ in range(n):
        alpha = (rng.randint(-3, 3), rng.randint(-3, 3))
        phi = DifferentialForm.make(t2, 0, {(): AlgebraElement.make(t2, {alpha: F(rng.randint(1, 3))})})
        assert de_rham_d(de_rham_d(phi)).is_zero

    # d o d = 0 for the Koszul differential
    for _ in range(n):
        op = _random_monomial_op(rng, t1, 2)
        c = KoszulCochain.make(t1, 0, {(): op})
        assert koszul_differential(koszul_differential(c)).is_zero

    # B o B = 0 and the anticommutation B delta + delta B = 0
    for _ in range(n):
        degree = rng.randint(0, 2)
        tup = tuple(_random_monomial_op(rng, t1, 2) for _ in range(degree + 1))
        c = Chain.from_operators(t1, degree, [(tup, F(1))])
        assert connes_B(connes_B(c)).is_zero
        if degree > 0:
            assert (delta_chain(connes_B(c)) + connes_B(delta_chain(c))).is_zero

    # cup-delta Leibniz
    u = multiply(DiffOperator.coordinate(a1, 0), DiffOperator.partial(a1, 0))
    f = Cochain.structural(a1, 1, lambda a: multiply(a, u))
    g = Cochain.structural(a1, 1, lambda a: a)
    lhs = delta_cochain(cup(f, g))
    r1 = cup(delta_cochain(f), g)
    r2 = cup(f, delta_cochain(g))
    for _ in range(n):
        args = tuple(_random_monomial_op(rng, a1, 1) for _ in range(3))
        assert lhs.evaluate(args) == r1.evaluate(args) - r2.evaluate(args)

    # infinitesimal automorphisms compose abelianly
    lam = DifferentialForm.make(t1, 1, {(0,): AlgebraElement.coordinate(t1, 0, -1)})
    phi_d = derivation_to_automorphism(c1_derivation(lam), Filtration(2, 2))
    phi_e = derivation_to_automorphism(
        Derivation.make(t1, {('d', 0): DiffOperator.coordinate(t1, 0, 2)}), Filtration(2, 2)
    )
    zero2 = DifferentialForm.zero(t1, 2)
    for _ in range(n):
        el = DeformedOperator.make(
            t1, zero2, _random_monomial_op(rng, t1, 2), _random_monomial_op(rng, t1, 2)
        )
        assert (phi_d.apply(phi_e.apply(el)) - phi_e.apply(phi_d.apply(el))).is_zero

    elapsed = time.monotonic() - t0
    assert elapsed < 30.0, f"identity suite took {elapsed:.1f}s"
    _report("7 (complex identities)", f"7 identities x {n} instances in {elapsed:.1f}s")


def test_criterion_8_out_of_scope_exclusions():
    # Stein-space sheaf theory, nuclearity, Fréchet strictness, co-admissible
    # equivalences and the spectral sequence are excluded by construction:
    # nothing in the public API accepts or produces them.
    import dcohom

    banned = ("stein", "nuclear", "frechet", "coadmissible", "spectral")
    exported = [name.lower() for name in dcohom.__all__]
    for word in banned:
        assert not any(word in name for name in exported)
    _report("8 (desk-scale exclusions)", "no analytic functionality exposed")
