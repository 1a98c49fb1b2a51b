import itertools
import random

import pytest

from resbinar.algebra import (
    CounterAssignment,
    FiniteBinar,
    NotResiduated,
    OrderInconsistent,
    SizeMismatch,
    UnboundVariable,
    UnknownOp,
    are_isomorphic,
    binar_from_dict,
    binar_to_dict,
    check_identity,
    check_lattice,
    check_residuation,
    covering_relation,
    derive_order,
    derive_residuals,
    eval_term,
    load_model,
    order_from_tables,
    save_model,
    table_isomorphism,
)
from resbinar.terms import builtin, parse_term

from conftest import M3_LEQ, chain_tables, lattice_tables_from_leq, make_binar


def test_derive_order_two_chain(two_chain_min):
    order = derive_order(two_chain_min)
    assert order.leq == ((True, True), (False, True))
    assert order.holds(0, 1) and not order.holds(1, 0)


def test_order_from_tables_rejects_disagreeing_join():
    meet, _ = chain_tables(2)
    with pytest.raises(OrderInconsistent):
        order_from_tables(
            tuple(tuple(r) for r in meet), tuple(tuple(r) for r in meet)
        )


def test_order_from_tables_rejects_nonpartial_order():
    # These tables induce both 0<=1 and 1<=0.
    meet = ((0, 0), (1, 1))
    join = ((0, 1), (0, 1))
    with pytest.raises(OrderInconsistent) as info:
        order_from_tables(meet, join)
    assert "not antisymmetric" in str(info.value)


def test_check_lattice_passes_on_chain(two_chain_min):
    assert check_lattice(two_chain_min).passed
    assert check_lattice(two_chain_min).verdict == "pass"


def test_check_lattice_flags_constant_join():
    meet, _ = chain_tables(2)
    const0 = [[0, 0], [0, 0]]
    b = FiniteBinar(2, meet, const0, const0, const0, const0)
    report = check_lattice(b)
    assert not report.passed
    hits = [v for v in report.violations if v.axiom == "join-absorption"]
    assert any(v.env == (("x", 1), ("y", 0)) for v in hits)


def test_check_residuation_passes(two_chain_min, m3_zero):
    assert check_residuation(two_chain_min).passed
    assert check_residuation(m3_zero).passed


def test_check_residuation_flags_bad_mult():
    # With mult=max on the 2-chain, {y : max(1,y) <= 0} is empty, so the
    # triple (1,0,0) disagrees no matter what lres table is supplied.
    meet, join = chain_tables(2)
    bad = (("x", 1), ("y", 0), ("z", 0))
    for cells in itertools.product(range(2), repeat=4):
        lres = (tuple(cells[:2]), tuple(cells[2:]))
        b = FiniteBinar(2, meet, join, join, lres, lres)
        report = check_residuation(b)
        assert not report.passed
        assert any(
            v.env == bad and v.axiom == "residuation:mult-lres"
            for v in report.violations
        )


def test_eval_term_on_m3(m3_zero):
    t = parse_term("x ^ (y v z)")
    assert eval_term(t, {"x": 1, "y": 2, "z": 3}, m3_zero) == 1


def test_eval_term_unbound_variable(two_chain_min):
    with pytest.raises(UnboundVariable):
        eval_term(parse_term("x ^ y"), {"x": 0}, two_chain_min)


def test_check_identity_ld_fails_on_m3(m3_zero):
    hit = check_identity(m3_zero, builtin("LD"))
    assert isinstance(hit, CounterAssignment)
    # lexicographically first counterexample
    assert hit.env == (("x", 1), ("y", 2), ("z", 3))
    assert (hit.lhs, hit.rhs) == (1, 0)


def test_check_identity_ld_holds_on_chain(two_chain_min):
    assert check_identity(two_chain_min, builtin("LD")) is None


def test_derive_residuals_two_chain_min():
    meet, join = chain_tables(2)
    order = order_from_tables(
        tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
    )
    lres, rres = derive_residuals(order, tuple(tuple(r) for r in meet))
    assert lres == ((1, 1), (0, 1))
    assert rres == ((1, 0), (1, 1))


def test_derive_residuals_rejects_join_mult():
    meet, join = chain_tables(2)
    order = order_from_tables(
        tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
    )
    with pytest.raises(NotResiduated) as info:
        derive_residuals(order, tuple(tuple(r) for r in join))
    assert info.value.cell == (1, 0) and info.value.side == "left"


def test_derive_residuals_constant_bottom_gives_constant_top():
    meet, join = lattice_tables_from_leq(M3_LEQ)
    order = order_from_tables(
        tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
    )
    zero = tuple((0,) * 5 for _ in range(5))
    lres, rres = derive_residuals(order, zero)
    assert lres == tuple((4,) * 5 for _ in range(5))
    assert rres == tuple((4,) * 5 for _ in range(5))


def test_derive_residuals_requires_downward_closed_satisfaction():
    # On the 4-chain let mult[0][y] be 0 except mult[0][1]=3.  The set
    # {y : 0*y <= 0} = {0,2,3} has join 3 but is not a down-set (1 <= 3
    # fails it), so no residual exists even though the join lies in the set.
    meet, join = chain_tables(4)
    order = order_from_tables(
        tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
    )
    mult = [[0] * 4 for _ in range(4)]
    mult[0][1] = 3
    with pytest.raises(NotResiduated):
        derive_residuals(order, tuple(tuple(r) for r in mult))


def test_derive_residuals_round_trips_through_check():
    # Whenever derive_residuals succeeds, the assembled algebra must pass
    # check_residuation.  Exercised over every mult table on the 2-chain
    # and a sample on the 2x2 diamond.
    meet, join = chain_tables(2)
    order = order_from_tables(
        tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
    )
    ok = 0
    for cells in itertools.product(range(2), repeat=4):
        mult = (tuple(cells[:2]), tuple(cells[2:]))
        try:
            lres, rres = derive_residuals(order, mult)
        except NotResiduated:
            continue
        b = FiniteBinar(2, meet, join, mult, lres, rres)
        assert check_residuation(b).passed
        ok += 1
    assert ok == 2  # mult=min and mult=constant-0

    rng = random.Random(3)
    leq = [[x | y == y for y in range(4)] for x in range(4)]  # bitmask diamond
    meet4, join4 = lattice_tables_from_leq(leq)
    order4 = order_from_tables(
        tuple(tuple(r) for r in meet4), tuple(tuple(r) for r in join4)
    )
    # x & y & c is residuated on the Boolean diamond for every constant c;
    # random tables mostly are not and exercise the failure path.
    candidates = [
        tuple(tuple(x & y & c for y in range(4)) for x in range(4)) for c in range(4)
    ] + [
        tuple(tuple(rng.randrange(4) for _ in range(4)) for _ in range(4))
        for _ in range(300)
    ]
    found = 0
    for mult in candidates:
        try:
            lres, rres = derive_residuals(order4, mult)
        except NotResiduated:
            continue
        b = FiniteBinar(4, meet4, join4, mult, lres, rres)
        assert check_residuation(b).passed
        found += 1
    assert found >= 4


def test_mult_monotone_on_residuated_models(two_chain_min, m3_zero, n5_zero):
    # Residuation forces mult to preserve order in both arguments.
    for b in (two_chain_min, m3_zero, n5_zero):
        order = derive_order(b)
        for x, y, u in itertools.product(range(b.size), repeat=3):
            if order.holds(x, y):
                assert order.holds(b.mult[x][u], b.mult[y][u])
                assert order.holds(b.mult[u][x], b.mult[u][y])


def test_covering_relation_m3(m3_zero):
    covers = set(covering_relation(derive_order(m3_zero)))
    assert covers == {(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)}


def test_covering_relation_chain():
    meet, join = chain_tables(4)
    b = make_binar(meet, join, meet)
    assert set(covering_relation(derive_order(b))) == {(0, 1), (1, 2), (2, 3)}


def test_are_isomorphic_identity(m3_zero):
    assert are_isomorphic(m3_zero, m3_zero) == (0, 1, 2, 3, 4)


def test_are_isomorphic_atom_swap(m3_zero):
    # Relabeling the three atoms of M3 commutes with all operations.
    perm = (0, 2, 3, 1, 4)
    tables = {}
    for op, table in m3_zero.ops().items():
        out = [[0] * 5 for _ in range(5)]
        for x in range(5):
            for y in range(5):
                out[perm[x]][perm[y]] = perm[table[x][y]]
        tables[op] = tuple(tuple(r) for r in out)
    other = FiniteBinar(5, **tables)
    found = are_isomorphic(m3_zero, other)
    assert found is not None
    for op, table in m3_zero.ops().items():
        for x in range(5):
            for y in range(5):
                assert other.table(op)[found[x]][found[y]] == found[table[x][y]]


def test_are_isomorphic_distinguishes_mult(two_chain_min):
    meet, join = chain_tables(2)
    zero = make_binar(meet, join, [[0, 0], [0, 0]])
    assert are_isomorphic(two_chain_min, zero) is None


def test_are_isomorphic_size_mismatch(two_chain_min, m3_zero):
    with pytest.raises(SizeMismatch):
        are_isomorphic(two_chain_min, m3_zero)


def test_table_isomorphism_relabeled_chain():
    a = {"meet": ((0, 0), (0, 1)), "join": ((0, 1), (1, 1)), "mult": ((0, 0), (0, 1))}
    # same algebra with labels 0 and 1 swapped: min becomes max
    b = {"meet": ((0, 1), (1, 1)), "join": ((0, 0), (0, 1)), "mult": ((0, 1), (1, 1))}
    assert table_isomorphism(2, a, b) == (1, 0)
    with pytest.raises(ValueError):
        table_isomorphism(2, a, {"meet": a["meet"], "join": a["join"]})


def test_finite_binar_validates_shape():
    meet, join = chain_tables(2)
    with pytest.raises(ValueError):
        FiniteBinar(2, meet, join, [[0, 0]], meet, meet)
    with pytest.raises(ValueError):
        FiniteBinar(2, meet, join, [[0, 2], [0, 0]], meet, meet)


def test_table_lookup_unknown_op(two_chain_min):
    with pytest.raises(UnknownOp):
        two_chain_min.table("plus")


def test_model_json_roundtrip(tmp_path, m3_zero):
    data = binar_to_dict(m3_zero)
    assert data["size"] == 5
    assert set(data["ops"]) == {"meet", "join", "mult", "lres", "rres"}
    assert binar_from_dict(data) == m3_zero

    path = tmp_path / "m3.json"
    save_model(m3_zero, path)
    assert load_model(path) == m3_zero
