import math

import pytest
from hypothesis import given, settings, strategies as st

from combench import birkhoff

perms = st.integers(1, 8).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


@given(perms)
def test_lehmer_round_trip(p):
    idx = birkhoff.lehmer_encode(p)
    assert 0 <= idx < math.factorial(len(p))
    assert birkhoff.lehmer_decode(idx, len(p)) == tuple(p)


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, math.factorial(n) - 1))))
def test_lehmer_bijection_from_index(case):
    n, idx = case
    assert birkhoff.lehmer_encode(birkhoff.lehmer_decode(idx, n)) == idx


@given(st.sets(st.integers(0, 500), min_size=1, max_size=8))
def test_cns_round_trip(s):
    code = birkhoff.cns_encode(s)
    assert birkhoff.cns_decode(code, len(s)) == sorted(s)


def test_cns_is_a_bijection_on_small_universe():
    import itertools
    codes = sorted(birkhoff.cns_encode(c) for c in itertools.combinations(range(7), 3))
    assert codes == list(range(math.comb(7, 3)))


def test_bitstrings_beyond_n_factorial_rejected():
    with pytest.raises(ValueError):
        birkhoff.permutation_from_bits("11000", 4)


def test_identity_and_permutation_inputs():
    D = birkhoff.ScaledDoublyStochastic(7, ((7, 0, 0), (0, 7, 0), (0, 0, 7)))
    assert birkhoff.verify(D, birkhoff.Decomposition(((7, (1, 2, 3)),))) == (1, 0)
    assert birkhoff.greedy_decompose(D).length == 1


def test_eq6_matrix_greedy_within_bound():
    D = birkhoff.ScaledDoublyStochastic(10, ((2, 3, 5), (6, 2, 2), (2, 5, 3)))
    dec = birkhoff.greedy_decompose(D)
    assert birkhoff.is_exact(D, dec) and dec.length <= 5


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.sampled_from(["sparse", "dense"]), st.integers(0, 10**6))
def test_generated_witness_and_greedy(n, density, seed):
    D, witness = birkhoff.generate(n, density, seed)
    assert birkhoff.is_exact(D, witness)
    if density == "sparse":
        assert witness.length <= n
    dec = birkhoff.greedy_decompose(D)
    assert birkhoff.is_exact(D, dec) and dec.length <= (n - 1) ** 2 + 1


def test_validation_errors():
    with pytest.raises(ValueError):
        birkhoff.ScaledDoublyStochastic(3, ((1, 2), (1, 1)))
    with pytest.raises(ValueError):
        birkhoff.Decomposition(((1, (1, 1, 2)),))
    with pytest.raises(ValueError):
        birkhoff.Decomposition(((1, (1, 2)), (2, (1, 2))))
    D = birkhoff.ScaledDoublyStochastic(1, ((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        birkhoff.verify(D, birkhoff.Decomposition(((1, (1, 2, 3)),)))


def test_qubit_count_small():
    assert birkhoff.qubit_count(3, 1) == 3
    assert birkhoff.qubit_count(3, 6) == 0


def test_text_round_trip():
    D, dec = birkhoff.generate(5, "dense", 3)
    assert birkhoff.read_matrix(birkhoff.write_matrix(D)) == D
    assert birkhoff.read_decomposition(birkhoff.write_decomposition(dec)) == dec
