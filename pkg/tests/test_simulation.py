import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import BINARY, exact_carriers, one_state, seeds, values
from wtasim.errors import BudgetError, CapabilityError, InputError, PreconditionError
from wtasim.generate import (
    RandomWtaConfig, backward_split, forward_split, perturb, random_simulation, random_wta,
)
from wtasim.linalg import Matrix, Vec, classify, matmul, vecmat
from wtasim.semiring import BOOL, INT, NAT, RAT
from wtasim.simulation import (
    SimulationChain, StepKind, TransferMatrix, check_backward, check_forward,
    check_nondegenerate_consequence, check_simulation, compose, decompose_simulation,
    decompose_units, decomposition_chain, fill_matrix, find_backward, find_forward,
    identity_transfer, map_matrix,
)
from wtasim.wta import Wta, enumerate_trees, eval_vector, evaluate, evaluate_many, is_trim, trim


def merged_pair():
    """Two copies of the state of M_one, merged back by X = (1, 1)^T."""
    M = Wta.build(NAT, BINARY, ["q1", "q2"],
                  {("alpha", (), "q1"): 1,
                   **{("sigma", w, "q2" if w == ("q2", "q2") else "q1"): 1
                      for w in itertools.product(["q1", "q2"], repeat=2)}},
                  {"q1": 1, "q2": 1})
    N = one_state(1)
    X = Matrix(["q1", "q2"], ["q"], [[1], [1]], NAT)
    return M, N, X


def test_identity_simulation(m_two):
    assert check_simulation(m_two, m_two, Matrix.identity(m_two.states, NAT))
    rho = {"q": "q"}
    assert check_forward(m_two, m_two, rho) and check_backward(m_two, m_two, rho)


def test_merge_example():
    M, N, X = merged_pair()
    assert check_simulation(M, N, X)
    assert check_forward(M, N, {"q1": "q", "q2": "q"})


def test_violation_names_the_symbol():
    M, N, X = merged_pair()
    bad = Wta.build(NAT, BINARY, ["q"], {("alpha", (), "q"): 1, ("sigma", ("q", "q"), "q"): 2},
                    {"q": 1})
    res = check_simulation(M, bad, X)
    assert not res and res.violation.symbol == "sigma" and res.violation.condition == "transition"
    res = check_simulation(M, one_state(1), Matrix(["q1", "q2"], ["q"], [[1], [0]], NAT))
    assert res.violation.condition == "final" and res.violation.row == "q2"


def test_shape_errors(m_two):
    with pytest.raises(InputError):
        check_simulation(m_two, m_two, Matrix(["x"], ["q"], [[1]], NAT))
    with pytest.raises(InputError):
        check_simulation(m_two, one_state(1, INT), Matrix.identity(["q"], NAT))
    M, N, _ = merged_pair()
    with pytest.raises(InputError):
        check_forward(M, N, {"q1": "q"})
    with pytest.raises(InputError):
        check_forward(N, M, {"q": "q1"})


@settings(max_examples=80)
@given(seed=seeds, sr=exact_carriers)
def test_simulation_implies_equivalence(seed, sr):
    rng = random.Random(seed)
    inst = random_simulation(rng, sr, core_states=rng.randint(1, 2), max_states=4)
    M, N, X = inst.source, inst.target, inst.matrix
    assert check_simulation(M, N, X)
    memo_m, memo_n = {}, {}
    for t in enumerate_trees(M.alphabet, 5):
        hm, hn = eval_vector(M, t, memo_m), eval_vector(N, t, memo_n)
        assert vecmat(hm, X).values() == hn.values()
        assert evaluate(M, t) == evaluate(N, t)


@settings(max_examples=100)
@given(seed=seeds, sr=st.sampled_from([BOOL, NAT, INT, RAT]), spoil=st.booleans())
def test_forward_and_backward_match_transfer_matrices(seed, sr, spoil):
    rng = random.Random(seed)
    N = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 3)))
    f = forward_split(rng, N)
    M = perturb(rng, f.source) if spoil else f.source
    X = map_matrix(f.rho, M.states, N.states, sr)
    assert check_forward(M, N, f.rho).holds == check_simulation(M, N, X).holds
    b = backward_split(rng, N)
    B = perturb(rng, b.target) if spoil else b.target
    assert check_backward(B, N, b.rho).holds == check_simulation(
        N, B, map_matrix(b.rho, B.states, N.states, sr).T).holds


def test_trimness_note():
    M, N, _ = merged_pair()
    assert check_forward(M, N, {"q1": "q", "q2": "q"}).note is None
    dead = Wta.build(NAT, BINARY, ["q", "d"], {("alpha", (), "q"): 1}, {"q": 1})
    res = check_forward(dead, dead, {"q": "q", "d": "d"})
    assert res.holds and res.note


def test_find_examples(m_two):
    assert find_forward(m_two, m_two) == {"q": "q"}
    M, N, _ = merged_pair()
    rho = find_forward(M, N)
    assert rho is not None and check_forward(M, N, rho)
    assert find_forward(m_two, one_state(1)) is None
    assert find_backward(m_two, one_state(1)) is None
    assert find_forward(N, M) is None  # more target states than source states
    big = Wta.build(NAT, BINARY, [f"s{i}" for i in range(9)])
    with pytest.raises(BudgetError):
        find_forward(big, big)


@settings(max_examples=40)
@given(seed=seeds, sr=exact_carriers)
def test_find_forward_on_merge_pairs(seed, sr):
    rng = random.Random(seed)
    N = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 2)))
    f = forward_split(rng, N, N.n_states + rng.randint(0, 2))
    rho = find_forward(f.source, N)
    assert rho is not None and check_forward(f.source, N, rho)


@settings(max_examples=60)
@given(seed=seeds, sr=exact_carriers)
def test_nondegenerate_consequence(seed, sr):
    rng = random.Random(seed)
    N, _ = trim(random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 3))))
    assume(N.n_states > 0)
    f = forward_split(rng, N)
    M = f.source
    assume(is_trim(M))
    assert check_nondegenerate_consequence(M, N, f.matrix)
    if sr is NAT:
        inst = random_simulation(rng, NAT)
        A, _ = trim(inst.source)
        if A.states == inst.source.states and is_trim(inst.target):
            assert check_nondegenerate_consequence(inst.source, inst.target, inst.matrix)


def test_nondegenerate_consequence_rejects_non_trim():
    dead = Wta.build(NAT, BINARY, ["q", "d"], {("alpha", (), "q"): 1}, {"q": 1})
    X = Matrix(["q", "d"], ["q"], [[1], [0]], NAT)
    with pytest.raises(InputError):
        check_nondegenerate_consequence(dead, trim(dead)[0], X)


# -- unit decomposition -----------------------------------------------------

def test_decompose_units_examples():
    C, E, D = decompose_units(Matrix(["q"], ["p"], [[0]], INT))
    assert list(C.cols) == [("q", 1, "p"), ("q", 2, "p")]
    assert E.tolist() == [[1, 0], [0, -1]]
    assert matmul(matmul(C, E), D).tolist() == [[0]]
    C, E, D = decompose_units(Matrix(["q"], ["p"], [[3]], NAT))
    assert E.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert C.tolist() == [[1, 1, 1]] and D.tolist() == [[1], [1], [1]]
    X = Matrix(["a", "b"], ["x", "y"], [[1, -1], [0, 2]], INT)
    C, E, D = decompose_units(X)
    assert matmul(matmul(C, E), D) == X
    with pytest.raises(CapabilityError):
        decompose_units(Matrix(["q"], ["p"], [[1]], BOOL))


def random_matrix(rng, sr, rows, cols, lo=-5, hi=5):
    lo = 0 if sr is NAT else lo

    def val():
        v = rng.randint(lo, hi)
        return Fraction(v, rng.randint(1, 3)) if sr is RAT else v

    return Matrix([f"r{i}" for i in range(rows)], [f"c{j}" for j in range(cols)],
                  [[val() for _ in range(cols)] for _ in range(rows)], sr)


def check_unit_decomposition(X):
    C, E, D = decompose_units(X)
    assert matmul(matmul(C, E), D) == X
    assert classify(C.T).functional and classify(D).functional
    assert classify(E).invertible_diagonal
    if X.semiring.is_ring or classify(X).nondegenerate:
        assert classify(C.T).surjective and classify(D).surjective


@settings(max_examples=150)
@given(seed=seeds, sr=exact_carriers)
def test_decompose_units_property(seed, sr):
    rng = random.Random(seed)
    check_unit_decomposition(random_matrix(rng, sr, rng.randint(1, 4), rng.randint(1, 4)))


# -- matrices with prescribed sums ------------------------------------------

def test_fill_matrix_examples():
    assert fill_matrix(Vec(["a"], [5], NAT), Vec(["x"], [5], NAT)).tolist() == [[5]]
    X = fill_matrix(Vec(["a", "b"], [1, 2], NAT), Vec(["x", "y"], [2, 1], NAT))
    assert [sum(r) for r in X.tolist()] == [1, 2]
    assert [sum(c) for c in zip(*X.tolist())] == [2, 1]
    assert fill_matrix(Vec(["a", "b"], [0, 0], NAT),
                       Vec(["x", "y"], [0, 0], NAT)).tolist() == [[0, 0], [0, 0]]
    with pytest.raises(PreconditionError):
        fill_matrix(Vec(["a"], [1], NAT), Vec(["x"], [2], NAT))
    with pytest.raises(CapabilityError):
        fill_matrix(Vec(["a"], [1], BOOL), Vec(["x"], [1], BOOL))


def random_margins(rng, sr, rows, cols):
    if sr is NAT:
        R = [rng.randint(0, 6) for _ in range(rows)]
        total = sum(R)
        cuts = sorted(rng.randint(0, total) for _ in range(cols - 1))
        bounds = [0] + cuts + [total]
        C = [bounds[i + 1] - bounds[i] for i in range(cols)]
    else:
        R = [rng.randint(-6, 6) for _ in range(rows)]
        C = [rng.randint(-6, 6) for _ in range(cols - 1)]
        C.append(sum(R) - sum(C))
    return (Vec([f"r{i}" for i in range(rows)], R, sr),
            Vec([f"c{j}" for j in range(cols)], C, sr))


def check_fill(R, C):
    X = fill_matrix(R, C)
    assert [sum(r) for r in X.tolist()] == list(R.values())
    assert [sum(c) for c in zip(*X.tolist())] == list(C.values())


@settings(max_examples=150)
@given(seed=seeds, sr=st.sampled_from([NAT, INT]))
def test_fill_matrix_property(seed, sr):
    rng = random.Random(seed)
    check_fill(*random_margins(rng, sr, rng.randint(1, 5), rng.randint(1, 5)))


# -- decomposition of simulations ---------------------------------------------

def check_decomposition(M, N, X):
    chain = decomposition_chain(M, N, X)
    assert chain.validate()
    assert chain.total().matrix == X
    return chain


def test_decompose_identity(m_two):
    M1, N1, C, E, D = decompose_simulation(m_two, m_two, Matrix.identity(m_two.states, NAT))
    assert classify(E).invertible_diagonal and E == Matrix.identity(E.rows, NAT)
    trees = enumerate_trees(m_two.alphabet, 5)
    assert evaluate_many(M1, trees) == evaluate_many(N1, trees) == evaluate_many(m_two, trees)


def test_decompose_merge_pair_index_counts():
    M, N, X = merged_pair()
    chain = check_decomposition(M, N, X)
    assert len(chain.automata[1].states) == M.n_states  # nat: zero entries give no units
    MI = M.map_weights(int, INT)
    NI = N.map_weights(int, INT)
    XI = Matrix(X.rows, X.cols, X.data, INT)
    chain = check_decomposition(MI, NI, XI)
    assert len(chain.automata[1].states) == M.n_states  # X has no zero entries here
    # a functional matrix with zeros: each zero costs two units over int
    rng = random.Random(3)
    N2 = random_wta(rng, INT, RandomWtaConfig(2))
    f = forward_split(rng, N2, 3)
    chain = check_decomposition(f.source, N2, f.matrix)
    n_q, n_p = 3, 2
    assert len(chain.automata[1].states) == n_q + 2 * (n_q * n_p - n_q)


def test_decompose_nat_entry_two():
    # X = (2): M has twice the final weight of N on one state
    M = Wta.build(NAT, BINARY, ["q"], {("alpha", (), "q"): 2, ("sigma", ("q", "q"), "q"): 2},
                  {"q": 2})
    N = Wta.build(NAT, BINARY, ["p"], {("alpha", (), "p"): 4, ("sigma", ("p", "p"), "p"): 1},
                  {"p": 1})
    X = Matrix(["q"], ["p"], [[2]], NAT)
    assert check_simulation(M, N, X)
    chain = check_decomposition(M, N, X)
    assert len(chain.automata[1].states) == 2


def test_decompose_rejects_non_simulation(m_two):
    with pytest.raises(PreconditionError):
        decompose_simulation(m_two, one_state(1), Matrix.identity(["q"], NAT))


@settings(max_examples=40)
@given(seed=seeds, sr=exact_carriers)
def test_decompose_simulation_property(seed, sr):
    rng = random.Random(seed)
    inst = random_simulation(rng, sr, core_states=rng.randint(1, 2), max_states=3, steps=2)
    chain = check_decomposition(inst.source, inst.target, inst.matrix)
    kinds = [k for _, k in chain.steps]
    assert kinds == [StepKind.BACKWARD_FUNCTIONAL, StepKind.INVERTIBLE_DIAGONAL,
                     StepKind.FORWARD_FUNCTIONAL]


# -- simulations as a category --------------------------------------------------

def test_compose_examples():
    M, N, X = merged_pair()
    T = TransferMatrix(X, M, N)
    assert compose(identity_transfer(M), T).matrix == X
    assert compose(T, identity_transfer(N)).matrix == X
    with pytest.raises(InputError):
        compose(T, T)


def test_stacked_merges_compose_to_a_function():
    rng = random.Random(7)
    N = random_wta(rng, INT, RandomWtaConfig(1))
    f1 = forward_split(rng, N, 2)
    f2 = forward_split(rng, f1.source, 4)
    total = compose(TransferMatrix(f2.matrix, f2.source, f1.source),
                    TransferMatrix(f1.matrix, f1.source, N))
    assert classify(total.matrix).functional
    assert total.check()


@settings(max_examples=40)
@given(seed=seeds, sr=exact_carriers)
def test_category_laws(seed, sr):
    rng = random.Random(seed)
    N = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 2)))
    a = forward_split(rng, N)
    b = forward_split(rng, a.source)
    c = forward_split(rng, b.source)
    X = TransferMatrix(c.matrix, c.source, b.source)
    Y = TransferMatrix(b.matrix, b.source, a.source)
    Z = TransferMatrix(a.matrix, a.source, N)
    left = compose(compose(X, Y), Z)
    right = compose(X, compose(Y, Z))
    assert left.matrix == right.matrix and left.check()
    assert compose(identity_transfer(X.source), X).matrix == X.matrix
    chain = SimulationChain([c.source, b.source, a.source, N],
                            [(X, StepKind.FORWARD_FUNCTIONAL), (Y, StepKind.FORWARD_FUNCTIONAL),
                             (Z, StepKind.FORWARD_FUNCTIONAL)])
    assert chain.validate()
