import itertools

import pytest
from hypothesis import given, settings, strategies as st

from combench import solvers
from combench.core import ObjectiveSense
from combench.model import (Hubo, LinearConstraint, Model, Polynomial, Qubo, Relation, VariableSpec, add_slack,
                            binarize_integers, binary_weights, model_stats, penalty_unconstrain, quadratize,
                            read_hubo, read_model, swap_distances, swap_mask, write_hubo, write_model)

monomials = st.lists(st.integers(0, 5), min_size=0, max_size=3).map(lambda v: tuple(sorted(v)))
polys = st.dictionaries(monomials, st.integers(-20, 20), max_size=6).map(Polynomial)
points = st.lists(st.integers(-3, 3), min_size=6, max_size=6)


@given(polys, polys, points)
def test_polynomial_ring_ops(p, q, x):
    assert (p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x)
    assert (p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x)
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)


@given(polys, st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_reduce_binary_agrees_on_bits(p, x):
    assert p.reduce_binary().evaluate(x) == p.evaluate(x)


@given(st.integers(0, 300))
def test_binary_weights_cover_range_exactly(span):
    ws = binary_weights(span)
    sums = {sum(c) for r in range(len(ws) + 1) for c in itertools.combinations(ws, r)}
    assert sums == set(range(span + 1))


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(0, 20)), min_size=1, max_size=4), st.data())
def test_binarize_surjective_with_left_inverse(bounds, data):
    variables = [VariableSpec.integer(lo, lo + w) for lo, w in bounds]
    model = Model(ObjectiveSense.MINIMIZE, variables, Polynomial.linear({0: 1}))
    bmodel, enc = binarize_integers(model)
    values = [data.draw(st.integers(lo, lo + w)) for lo, w in bounds]
    bits = enc.encode(values)
    assert enc.decode(bits) == values
    assert bmodel.evaluate(bits) == model.evaluate(values)


def test_encode_rejects_out_of_range():
    _, enc = binarize_integers(Model(ObjectiveSense.MINIMIZE, [VariableSpec.integer(0, 5)]))
    with pytest.raises(ValueError):
        enc.encode([6])


def test_add_slack_preserves_feasible_set():
    model = Model(ObjectiveSense.MINIMIZE, [VariableSpec.integer(0, 3), VariableSpec.binary()],
                  Polynomial.linear({0: 1, 1: -2}),
                  [LinearConstraint({0: 1, 1: 2}, Relation.LE, 4, "le"),
                   LinearConstraint({0: 1, 1: -1}, Relation.GE, 1, "ge")])
    slacked = add_slack(model)
    assert all(c.relation is Relation.EQ for c in slacked.constraints)
    assert solvers.brute_force(slacked).best_energy == solvers.brute_force(model).best_energy


def test_penalty_weight_certification():
    model = Model(ObjectiveSense.MINIMIZE, [VariableSpec.binary()] * 2, Polynomial.linear({0: 5, 1: -5}),
                  [LinearConstraint({0: 1, 1: 1}, Relation.EQ, 1)])
    res = penalty_unconstrain(model)
    assert res.penalty_min == 11 and res.certified
    assert not penalty_unconstrain(model, M=2).certified
    with pytest.raises(ValueError):
        penalty_unconstrain(Model(ObjectiveSense.MINIMIZE, [VariableSpec.binary()],
                                  constraints=[LinearConstraint({0: 1}, Relation.LE, 1)]))


def test_quadratize_labs_size():
    from combench import labs
    for n in (5, 8, 12, 20):
        q, aux = quadratize(labs.to_hubo(n))
        assert q.degree() <= 2 and q.n == n + len(aux) <= n + n * (n - 1) // 2
    assert quadratize(labs.to_hubo(40))[0].n == 820


def test_quadratize_leaves_qubo_alone():
    q = Qubo(3, {(0, 1): 2, (2,): -1})
    out, aux = quadratize(q)
    assert aux == {} and dict(out.terms) == dict(q.terms)


@pytest.mark.parametrize("n", range(2, 12))
def test_swap_network_meets_every_pair_by_n_minus_2(n):
    dist = swap_distances(n)
    assert len(dist) == n * (n - 1) // 2
    assert max(dist.values()) == max(n - 2, 0)
    assert all(dist[(i, i + 1)] == 0 for i in range(n - 1))


def test_swap_mask_refuses_to_disconnect():
    q = Qubo(4, {(0, 3): 1, (0, 1): 1})
    with pytest.raises(ValueError):
        swap_mask(q, 0)
    assert swap_mask(Qubo(4, {(0, 1): 1, (2, 3): 1}), 0).swap_layers == 0


@settings(max_examples=50)
@given(st.dictionaries(monomials, st.integers(-9, 9), max_size=6), st.integers(-5, 5),
       st.sampled_from([ObjectiveSense.MINIMIZE, ObjectiveSense.MAXIMIZE]))
def test_hubo_text_round_trip(terms, offset, sense):
    h = Hubo(6, terms, offset, sense)
    assert read_hubo(write_hubo(h)) == h


def test_model_text_round_trip():
    model = Model(ObjectiveSense.MAXIMIZE, [VariableSpec.binary(), VariableSpec.integer(-2, 7)],
                  Polynomial({(0, 1): 3, (1,): -1, (): 4}),
                  [LinearConstraint({0: 2, 1: -1}, Relation.GE, -3, "row")], objective_scale=7)
    assert read_model(write_model(model)) == model


def test_model_stats_counts():
    model = Model(ObjectiveSense.MINIMIZE, [VariableSpec.binary()] * 3, Polynomial.linear({0: 2, 1: -7}),
                  [LinearConstraint({0: 1, 2: 3}, Relation.EQ, 1)])
    s = model_stats(model)
    assert (s.n_vars, s.n_constraints, s.n_nonzeros, s.coeff_min, s.coeff_max) == (3, 1, 4, 1, 7)
