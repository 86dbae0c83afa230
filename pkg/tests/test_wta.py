import random
import warnings

import pytest
from hypothesis import given, settings

from conftest import BINARY, exact_carriers, one_state, seeds
from oracles import count_trees, run_weight
from wtasim.errors import InputError, TreeError
from wtasim.generate import DEFAULT_ALPHABET, RandomWtaConfig, random_wta
from wtasim.semiring import BOOL, INT, NAT
from wtasim.textio import parse_tree
from wtasim.wta import (
    RankedAlphabet, Tree, Wta, enumerate_trees, eval_vector, evaluate, evaluate_many, is_trim,
    support, trim,
)

A = Tree("alpha")


def sig(*kids):
    return Tree("sigma", kids)


def test_eval_examples(m_one, m_two):
    assert evaluate(m_one, sig(A, A)) == 1
    assert evaluate(m_two, sig(A, sig(A, A))) == 4
    assert eval_vector(m_two, A).values() == tuple(m_two.mu["alpha"].data[0])


def test_eval_rejects_bad_trees(m_two):
    with pytest.raises(TreeError):
        evaluate(m_two, Tree("beta"))
    with pytest.raises(TreeError):
        evaluate(m_two, Tree("sigma", [A]))


def test_deep_tree_does_not_recurse(m_one):
    t = A
    for _ in range(3000):
        t = sig(A, t)
    assert evaluate(m_one, t) == 1


def test_enumerate_examples():
    assert enumerate_trees(RankedAlphabet([("alpha", 0)]), 3) == [A]
    assert enumerate_trees(BINARY, 3) == [A, sig(A, A)]
    assert enumerate_trees(RankedAlphabet([("alpha", 0), ("gamma", 1)]), 2) == [
        A, Tree("gamma", [A])]


@pytest.mark.parametrize("size", range(1, 9))
def test_enumerate_is_complete_and_duplicate_free(size):
    trees = enumerate_trees(DEFAULT_ALPHABET, size)
    assert len(set(trees)) == len(trees)
    assert len(trees) == sum(count_trees(DEFAULT_ALPHABET, n) for n in range(1, size + 1))
    keys = [(t.size, t.preorder()) for t in trees]
    assert keys == sorted(keys)


def test_alphabet_without_constants_warns():
    with pytest.warns(UserWarning):
        RankedAlphabet([("gamma", 1)])
    with pytest.raises(InputError):
        RankedAlphabet([("a", 0), ("a", 1)])


def test_support_examples(m_two):
    S = support(m_two)
    assert S.semiring is BOOL
    assert S.mu["sigma"].tolist() == [[1]] and S.final.values() == (1,)
    Z = Wta.build(NAT, BINARY, ["q"])
    assert all(x == 0 for x in support(Z).mu["sigma"].data.flat)
    M = Wta.build(INT, BINARY, ["q", "p"], {("sigma", ("q", "q"), "p"): -3}, {"q": 0})
    assert set(support(M).mu["sigma"].data.flat) == {0, 1}


def test_trim_examples(m_two):
    alph = RankedAlphabet([("alpha", 0), ("gamma", 1)])
    M = Wta.build(NAT, alph, ["q", "r", "d"],
                  {("alpha", (), "q"): 1, ("alpha", (), "d"): 1, ("gamma", ("q",), "q"): 2,
                   ("gamma", ("r",), "q"): 5},
                  {"q": 1})
    T, removed = trim(M)
    assert removed == ["r", "d"] and list(T.states) == ["q"] and is_trim(T)
    assert trim(m_two) == (m_two, [])
    Z = Wta.build(NAT, alph, ["q"])
    T, removed = trim(Z)
    assert T.n_states == 0 and removed == ["q"]


@settings(max_examples=60)
@given(seed=seeds, sr=exact_carriers)
def test_trim_preserves_series(seed, sr):
    rng = random.Random(seed)
    M = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 4), density=0.3))
    T, _ = trim(M)
    assert is_trim(T)
    trees = enumerate_trees(M.alphabet, 7)
    assert evaluate_many(M, trees) == evaluate_many(T, trees)


@settings(max_examples=60)
@given(seed=seeds, sr=exact_carriers)
def test_eval_matches_run_enumeration(seed, sr):
    rng = random.Random(seed)
    M = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 3)))
    for t in enumerate_trees(M.alphabet, 5):
        assert evaluate(M, t) == run_weight(M, t)


@settings(max_examples=60)
@given(seed=seeds)
def test_support_and_positive_weights(seed):
    rng = random.Random(seed)
    M = random_wta(rng, NAT, RandomWtaConfig(rng.randint(1, 3), density=0.3))
    S = support(M)
    for t in enumerate_trees(M.alphabet, 5):
        assert (evaluate(M, t) != 0) == (evaluate(S, t) == 1)
        assert evaluate(S, t) == run_weight(S, t)


def test_parse_tree_forms():
    assert parse_tree("sigma(alpha, sigma(alpha(), alpha))") == sig(A, sig(A, A))
