import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import BINARY, exact_carriers, one_state, seeds
from oracles import oi_product_weight
from wtasim.constructions import (
    Construction, ConstructionTag, functor_laws, hadamard_tm, hadamard_wta, sigma_product_wta,
    sigma_star_factor, sigma_star_wta, sum_tm, sum_wta,
)
from wtasim.errors import DivergentStarError, InputError
from wtasim.generate import (
    DEFAULT_ALPHABET, RandomWtaConfig, backward_split, diagonal_target, forward_split,
    random_simulation, random_wta,
)
from wtasim.linalg import Matrix, Vec, dot, matmul
from wtasim.semiring import BOOL, INT, NAT, RAT
from wtasim.simulation import TransferMatrix, check_simulation
from wtasim.wta import Tree, Wta, enumerate_trees, evaluate, evaluate_many


def scale_final(M, c):
    sr = M.semiring
    return Wta(M.alphabet, M.states, M.mu,
               Vec(M.states, [sr.mul(x, c) for x in M.final.data], sr), sr)


def composable(rng, sr, max_states=3):
    """Two chained simulations ``A ->X B ->X2 C``."""
    inst = random_simulation(rng, sr, core_states=rng.randint(1, 2), max_states=max_states,
                             steps=2)
    if rng.random() < 0.5:
        nxt = backward_split(rng, inst.target, inst.target.n_states + rng.randint(0, 1),
                             prefix="n")
    else:
        nxt = diagonal_target(rng, inst.target, prefix="n")
    return (TransferMatrix(inst.matrix, inst.source, inst.target),
            TransferMatrix(nxt.matrix, nxt.source, nxt.target))


# -- sum ------------------------------------------------------------------------

def test_sum_examples(m_one, m_two):
    zero = Wta.build(NAT, BINARY, [])
    S = sum_wta(m_one, zero)
    trees = enumerate_trees(BINARY, 6)
    assert evaluate_many(S, trees) == evaluate_many(m_one, trees)
    S = sum_wta(m_two, m_one)
    assert list(S.states) == ["q.L", "q.R"]
    for t in trees:
        assert evaluate(S, t) == evaluate(m_two, t) + evaluate(m_one, t)
    I = sum_tm(Matrix.identity(["q"], NAT), Matrix.identity(["p"], NAT))
    assert I == Matrix.identity(["q", "p"], NAT)


def test_alphabet_mismatch(m_one):
    other = Wta.build(NAT, [("alpha", 0)], ["q"])
    with pytest.raises(InputError):
        sum_wta(m_one, other)


# -- Hadamard -------------------------------------------------------------------

def test_hadamard_examples(m_two):
    H = hadamard_wta(m_two, m_two)
    for t in enumerate_trees(BINARY, 5):
        assert evaluate(H, t) == evaluate(m_two, t) ** 2
    unit = one_state(1, name="u")
    H = hadamard_wta(m_two, unit)
    assert list(H.states) == [("q", "u")]
    for s in BINARY:
        assert H.mu[s].same_values(m_two.mu[s])


@settings(max_examples=40)
@given(seed=seeds, sr=st.sampled_from([BOOL, NAT, INT, RAT]))
def test_sum_and_hadamard_match_pointwise_oracles(seed, sr):
    rng = random.Random(seed)
    M = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 3)))
    N = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 3)), prefix="p")
    trees = enumerate_trees(M.alphabet, 5)
    a, b = evaluate_many(M, trees), evaluate_many(N, trees)
    s = evaluate_many(sum_wta(M, N), trees)
    h = evaluate_many(hadamard_wta(M, N), trees)
    for t in trees:
        assert s[t] == sr.add(a[t], b[t])
        assert h[t] == sr.mul(a[t], b[t])


# -- sigma0-product -------------------------------------------------------------------

def test_sigma_product_counts_cuts(m_one):
    P = sigma_product_wta(m_one, m_one, "alpha")
    for t in enumerate_trees(BINARY, 5):
        assert evaluate(P, t) == oi_product_weight(m_one, m_one, "alpha", t)
    # alpha: one cut; sigma(alpha, alpha): cut at the root or at both leaves
    assert evaluate(P, Tree("alpha")) == 1
    assert evaluate(P, Tree("sigma", [Tree("alpha"), Tree("alpha")])) == 2


def test_sigma_product_zero_inner_finals(m_one):
    silent = Wta.build(NAT, BINARY, ["p"], {("alpha", (), "p"): 1,
                                            ("sigma", ("p", "p"), "p"): 1})
    P = sigma_product_wta(m_one, silent, "alpha")
    assert all(x == 0 for x in P.mu["sigma"].data[-1][:1])
    for t in enumerate_trees(BINARY, 5):
        assert evaluate(P, t) == 0  # every tree has an alpha leaf, which must be substituted


def test_sigma_product_needs_nullary(m_one):
    with pytest.raises(InputError):
        sigma_product_wta(m_one, m_one, "sigma")
    with pytest.raises(InputError):
        sigma_star_wta(m_one, "beta")


@settings(max_examples=40)
@given(seed=seeds, sr=exact_carriers, s0=st.sampled_from(["alpha", "beta"]))
def test_sigma_product_matches_oi_substitution(seed, sr, s0):
    rng = random.Random(seed)
    M = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 2)))
    N = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 2)), prefix="p")
    P = sigma_product_wta(M, N, s0)
    for t in enumerate_trees(DEFAULT_ALPHABET, 5):
        assert evaluate(P, t) == oi_product_weight(M, N, s0, t)


# -- sigma0-iteration -----------------------------------------------------------------

def test_sigma_star_examples():
    # [[M]](alpha) = 0: star factor 1, completed subtrees re-enter with mu(alpha)
    M = Wta.build(RAT, BINARY, ["q", "r"],
                  {("alpha", (), "q"): 1, ("sigma", ("q", "q"), "r"): 1}, {"r": 1})
    assert sigma_star_factor(M, "alpha") == 1
    S = sigma_star_wta(M, "alpha")
    assert S.mu["sigma"][("q", "q"), "q"] == 1  # (mu F)_{qq} * mu(alpha)_q
    assert S.mu["sigma"][("q", "q"), "r"] == 1
    assert S.mu["alpha"] == M.mu["alpha"]
    half = one_state(1, RAT)
    half = scale_final(half, Fraction(1, 2))
    assert sigma_star_factor(half, "alpha") == 2
    assert sigma_star_factor(one_state(1, BOOL), "alpha") == 1
    with pytest.raises(DivergentStarError):
        sigma_star_wta(one_state(1, RAT), "alpha")


def literal_sigma_star(M, s0):
    """The iteration with the added weight independent of the target state."""
    sr = M.semiring
    star = sigma_star_factor(M, s0)
    mu = {}
    for sym, m in M.mu.items():
        if sym == s0:
            mu[sym] = m
            continue
        data = m.data.copy()
        for r in range(data.shape[0]):
            extra = sr.mul(star, dot(Vec(M.states, m.data[r], sr, check=False), M.final))
            data[r] = [sr.add(x, extra) for x in data[r]]
        mu[sym] = Matrix(m.rows, m.cols, data, sr, check=False)
    return Wta(M.alphabet, M.states, mu, M.final, sr)


def test_literal_iteration_formula_breaks_on_a_merge():
    N = scale_final(one_state(1, RAT), Fraction(1, 2))
    f = forward_split(random.Random(0), N, 2)
    assert check_simulation(f.source, N, f.matrix)
    assert not check_simulation(literal_sigma_star(f.source, "alpha"),
                                literal_sigma_star(N, "alpha"), f.matrix)
    assert check_simulation(sigma_star_wta(f.source, "alpha"), sigma_star_wta(N, "alpha"),
                            f.matrix)


# -- functor laws ------------------------------------------------------------------------

def _star_ready(X, X2):
    """Rescale final weights so that the star at alpha converges."""
    s = evaluate(X.source, Tree("alpha"))
    if X.source.semiring is BOOL or abs(s) < 1:
        return X, X2
    c = Fraction(1, 2) / abs(s)
    A, B, C = (scale_final(T, c) for T in (X.source, X.target, X2.target))
    return TransferMatrix(X.matrix, A, B), TransferMatrix(X2.matrix, B, C)


@settings(max_examples=30)
@given(seed=seeds, sr=st.sampled_from([NAT, INT, RAT]),
       kind=st.sampled_from([Construction.SUM, Construction.HADAMARD,
                             Construction.SIGMA_PRODUCT]))
def test_binary_functor_laws(seed, sr, kind):
    rng = random.Random(seed)
    tag = ConstructionTag(kind, "alpha" if kind is Construction.SIGMA_PRODUCT else None)
    report = functor_laws(tag, composable(rng, sr), composable(rng, sr))
    assert report.identity and report.composition and report.preserves_simulation


@settings(max_examples=30)
@given(seed=seeds, sr=st.sampled_from([BOOL, RAT]))
def test_sigma_star_functor_laws(seed, sr):
    rng = random.Random(seed)
    X, X2 = _star_ready(*composable(rng, sr))
    report = functor_laws(ConstructionTag(Construction.SIGMA_STAR, "alpha"), (X, X2))
    assert report


def test_hadamard_tm_is_kronecker():
    X = Matrix(["a"], ["b", "c"], [[1, 2]], INT)
    Y = Matrix(["d", "e"], ["f"], [[3], [4]], INT)
    assert hadamard_tm(X, Y).tolist() == [[3, 6], [4, 8]]
