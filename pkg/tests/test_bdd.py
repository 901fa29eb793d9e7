import gc
import itertools
import random

import numpy as np
import pytest

from lisaforge.bdd import BDD
from lisaforge.errors import NodeBudgetExceeded

from oracles import bdd_table, expr_bdd, expr_table, random_bool_expr


@pytest.fixture
def m():
    return BDD()


def declare(m, n):
    return [m.declare(f"x{i}") for i in range(n)]


def test_terminals_and_literals(m):
    x, y = declare(m, 2)
    assert m.true.is_true and m.false.is_false
    assert (m.var(x) & ~m.var(x)).is_false
    assert (m.var(x) | m.nvar(x)).is_true
    assert m.var("x0") == m.var(x)
    assert m.var(x).var == x
    with pytest.raises(TypeError):
        bool(m.var(x))


def test_duplicate_and_unknown_variables(m):
    declare(m, 1)
    with pytest.raises(ValueError):
        m.declare("x0")
    with pytest.raises(ValueError):
        m.var("nope")


def test_canonical_form_is_order_independent(m):
    x, y, z = (m.var(v) for v in declare(m, 3))
    f = (x & y) | (x & z)
    g = x & (y | z)
    assert f == g
    assert f.node == g.node
    assert hash(f) == hash(g)


def test_ite_and_apply_operators(m):
    x, y, z = (m.var(v) for v in declare(m, 3))
    assert m.ite(x, y, z) == (x & y) | (~x & z)
    assert m.apply("implies", x, y) == ~x | y
    assert m.apply("iff", x, y) == ~(x ^ y)
    assert x.implies(y) == (~x | y) and x.iff(y) == ~(x ^ y)
    with pytest.raises(ValueError):
        m.apply("nand", x, y)


def test_managers_do_not_mix():
    a, b = BDD(), BDD()
    a.declare("x")
    b.declare("x")
    with pytest.raises(ValueError):
        a.var("x") & b.var("x")


def test_quantifiers(m):
    x, y, z = (m.var(v) for v in declare(m, 3))
    f = (x & y) | (~x & z)
    assert m.exists(f, ["x0"]) == y | z
    assert m.forall(f, ["x0"]) == y & z
    assert m.and_exists(x | y, ~x | z, ["x0"]) == m.exists((x | y) & (~x | z), ["x0"])


def test_rename_and_compose(m):
    x, y, z = declare(m, 3)
    f = m.var(x) & ~m.var(y)
    assert m.rename(f, {x: z}) == m.var(z) & ~m.var(y)
    # swapping two variables at once is allowed
    assert m.rename(f, {x: y, y: x}) == m.var(y) & ~m.var(x)
    with pytest.raises(ValueError):
        m.rename(f, {x: z, y: z})
    with pytest.raises(ValueError):
        m.rename(f, {x: y})  # y is already in the support
    assert m.compose(f, {x: m.var(z) | m.var(y)}) == m.var(z) & ~m.var(y)


def test_restrict_cube_and_cofactors(m):
    x, y = declare(m, 2)
    f = m.var(x) ^ m.var(y)
    assert m.restrict(f, {x: True}) == ~m.var(y)
    assert m.cube({x: True, y: False}) == m.var(x) & ~m.var(y)
    table = m.cofactor_table(f, [x, y])
    assert [t.is_true for t in table] == [False, True, True, False]


def test_sat_queries(m):
    x, y, z = declare(m, 3)
    f = m.var(y) | m.var(z)
    assert m.count(f, [x, y, z]) == 6
    assert m.count(m.true, [x, y]) == 4
    assert m.any_sat(f, [x, y, z]) == {x: False, y: False, z: True}
    assert m.support(f) == {y, z}
    with pytest.raises(ValueError):
        m.any_sat(m.false, [x])
    with pytest.raises(ValueError):
        m.count(f, [x, y])


def test_dag_size(m):
    vs = [m.var(v) for v in declare(m, 4)]
    f = m.conjoin(vs)
    assert m.dag_size(f) == 4
    assert m.dag_size(m.true) == 0
    assert m.dag_size(f, vs[3]) == 4


def test_reference_counting_frees_dead_nodes(m):
    vs = [m.var(v) for v in declare(m, 8)]
    f = m.disjoin(a & b for a, b in zip(vs[:4], vs[4:]))
    live = len(m)
    del f
    gc.collect()
    freed = m.collect()
    assert freed > 0
    assert len(m) < live
    # nodes reachable from live handles survive
    g = vs[0] & vs[1]
    m.collect()
    assert m.evaluate(g, {0: True, 1: True})


def test_node_budget():
    m = BDD(node_budget=20)
    vs = [m.var(v) for v in declare(m, 12)]
    with pytest.raises(NodeBudgetExceeded):
        m.disjoin(a & b for a, b in zip(vs[:6], vs[6:]))


def test_sifting_shrinks_bad_order():
    # x_i & y_i paired across the order is exponential; interleaving is linear
    n = 6
    m = BDD()
    xs = [m.declare(f"x{i}") for i in range(n)]
    ys = [m.declare(f"y{i}") for i in range(n)]
    f = m.disjoin(m.var(x) & m.var(y) for x, y in zip(xs, ys))
    before = m.dag_size(f)
    table = bdd_table(m, f, xs + ys)
    m.reorder()
    assert m.dag_size(f) < before
    assert m.dag_size(f) <= 2 * n
    assert (bdd_table(m, f, xs + ys) == table).all()
    assert sorted(m.order) == sorted(m.var_name(v) for v in xs + ys)


def test_auto_reorder_preserves_functions():
    m = BDD(auto_reorder=True)
    xs = [m.declare(f"x{i}") for i in range(7)]
    ys = [m.declare(f"y{i}") for i in range(7)]
    f = m.false
    for x, y in zip(xs, ys):
        f = f | (m.var(x) & m.var(y))
    g = m.disjoin(m.var(x) & m.var(y) for x, y in zip(xs, ys))
    assert f == g


@pytest.mark.parametrize("seed", range(25))
def test_random_expressions_match_truth_tables(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    m = BDD()
    vs = declare(m, n)
    e = random_bool_expr(rng, n, 5)
    f = expr_bdd(e, m, vs)
    assert (bdd_table(m, f, vs) == expr_table(e, n)).all()
