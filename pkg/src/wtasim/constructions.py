"""Sum, Hadamard product, sigma0-product and sigma0-iteration of wta,
together with their action on transfer matrices.

Each construction maps simulations to simulations and respects identities
and composition, so transfer matrices can be pushed through it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapabilityError, InputError
from .linalg import IndexSet, Matrix, Vec, block_diag, dot, kron, matmul
from .semiring import Semiring
from .simulation import TransferMatrix, check_simulation, identity_transfer
from .wta import Tree, Wta, evaluate


def _tag(label, side: str):
    return f"{label}.{side}" if isinstance(label, str) else (label, side)


def disjoint_labels(Q: IndexSet, P: IndexSet) -> tuple[list, list]:
    """Labels for the disjoint union; both sides get ``.L``/``.R`` on any collision."""
    if set(Q) & set(P):
        return [_tag(q, "L") for q in Q], [_tag(p, "R") for p in P]
    return list(Q), list(P)


def _require_same_alphabet(M: Wta, N: Wta):
    if M.semiring != N.semiring:
        raise InputError(f"semirings differ: {M.semiring.name} vs {N.semiring.name}")
    if not M.alphabet.same_symbols(N.alphabet):
        raise InputError("the automata use different ranked alphabets")


def _require_commutative(sr: Semiring):
    if not sr.is_commutative:
        raise CapabilityError(f"{sr.name} is not commutative")


def _require_nullary(M: Wta, s0: str):
    if s0 not in M.alphabet or M.alphabet.rank(s0) != 0:
        raise InputError(f"{s0!r} is not a nullary symbol of the alphabet")


def _tuple_pos(idx: tuple, n: int) -> int:
    out = 0
    for i in idx:
        out = out * n + i
    return out


def _union_blocks(M: Wta, N: Wta):
    """States of the disjoint union, and index offsets for M and N."""
    q_labels, p_labels = disjoint_labels(M.states, N.states)
    return IndexSet(q_labels + p_labels), len(q_labels)


def sum_wta(M: Wta, N: Wta) -> Wta:
    """Automaton for the pointwise sum of the two series."""
    _require_same_alphabet(M, N)
    sr = M.semiring
    states, n_q = _union_blocks(M, N)
    n = len(states)
    mu = {}
    for sym, k in M.alphabet.items():
        kappa = Matrix.zeros(states.power(k), states, sr)
        for src, offset in ((M, 0), (N, n_q)):
            m = src.mu[sym].data
            n_src = src.n_states
            for r, w in enumerate(itertools.product(range(n_src), repeat=k)):
                row = _tuple_pos(tuple(i + offset for i in w), n)
                kappa.data[row, offset:offset + n_src] = m[r]
        mu[sym] = kappa
    final = Vec(states, np.concatenate([M.final.data, N.final.data]), sr, check=False)
    return Wta(M.alphabet, states, mu, final, sr)


def sum_tm(X: Matrix, Y: Matrix) -> Matrix:
    """Block-diagonal ``X + Y`` on the relabelled disjoint unions."""
    rq, rp = disjoint_labels(X.rows, Y.rows)
    cq, cp = disjoint_labels(X.cols, Y.cols)
    return block_diag(X, Y, rq + rp, cq + cp)


def hadamard_wta(M: Wta, N: Wta) -> Wta:
    """Product automaton on ``Q x P`` for the pointwise product of the series."""
    _require_same_alphabet(M, N)
    sr = M.semiring
    _require_commutative(sr)
    states = M.states.product(N.states)
    nq, np_ = M.n_states, N.n_states
    mu = {}
    for sym, k in M.alphabet.items():
        big = kron(M.mu[sym], N.mu[sym]).data
        # kron rows are (w_Q, w_P); reorder to ((q1,p1), ..., (qk,pk))
        perm = [
            _tuple_pos(tuple(q for q, _ in pairs), nq) * np_ ** k
            + _tuple_pos(tuple(p for _, p in pairs), np_)
            for pairs in itertools.product(itertools.product(range(nq), range(np_)), repeat=k)
        ]
        data = big[perm] if perm and big.size else sr.zeros((len(perm), nq * np_))
        mu[sym] = Matrix(states.power(k), states, data, sr, check=False)
    final = kron(M.final.as_row(), N.final.as_row())
    return Wta(M.alphabet, states, mu, Vec(states, final.data[0], sr, check=False), sr)


def hadamard_tm(X: Matrix, Y: Matrix) -> Matrix:
    return kron(X, Y)


def sigma_product_wta(M: Wta, N: Wta, s0: str) -> Wta:
    """Automaton substituting trees of N at the ``s0``-leaves of trees of M.

    States are ``Q ∪ P`` with final vector ``(F, 0)``.  A node whose children
    are all N-states may close the N-part: its Q-weight is
    ``mu(s0)_q * (nu(sigma) G)_w``.  For nullary symbols other than ``s0`` the
    empty child tuple is both an M- and an N-tuple, and the two contributions
    add up.
    """
    _require_same_alphabet(M, N)
    _require_nullary(M, s0)
    sr = M.semiring
    _require_commutative(sr)
    states, n_q = _union_blocks(M, N)
    n = len(states)
    n_p = N.n_states
    mu_s0 = M.mu[s0].data[0]
    mu = {}
    for sym, k in M.alphabet.items():
        kappa = Matrix.zeros(states.power(k), states, sr)
        m, nu = M.mu[sym].data, N.mu[sym].data
        closing = [dot(Vec(N.states, nu[r], sr, check=False), N.final) for r in range(nu.shape[0])]
        if sym == s0:
            kappa.data[0, :n_q] = [sr.mul(x, closing[0]) for x in mu_s0]
            kappa.data[0, n_q:] = nu[0]
        else:
            for r, w in enumerate(itertools.product(range(n_q), repeat=k)):
                kappa.data[_tuple_pos(w, n), :n_q] = m[r]
            for r, w in enumerate(itertools.product(range(n_p), repeat=k)):
                row = _tuple_pos(tuple(i + n_q for i in w), n)
                kappa.data[row, n_q:] = nu[r]
                kappa.data[row, :n_q] = [
                    sr.add(kappa.data[row, j], sr.mul(mu_s0[j], closing[r])) for j in range(n_q)
                ]
        mu[sym] = kappa
    final = Vec(states, list(M.final.data) + [sr.zero] * n_p, sr)
    return Wta(M.alphabet, states, mu, final, sr)


def sigma_product_tm(X: Matrix, Y: Matrix) -> Matrix:
    return sum_tm(X, Y)


def sigma_star_factor(M: Wta, s0: str):
    """``⟦M⟧(s0)*``; raises if the star is undefined for this value."""
    _require_nullary(M, s0)
    return M.semiring.star(evaluate(M, Tree(s0)))


def sigma_star_wta(M: Wta, s0: str) -> Wta:
    """sigma0-iteration of M.

    ``kappa(sigma)[w, q] = mu(sigma)[w, q] + s* * (mu(sigma) F)_w * mu(s0)_q`` for
    ``sigma != s0`` with ``s = ⟦M⟧(s0)``, and ``kappa(s0) = mu(s0)``.
    """
    sr = M.semiring
    _require_commutative(sr)
    star = sigma_star_factor(M, s0)
    mu_s0 = M.mu[s0].data[0]
    mu = {}
    for sym, k in M.alphabet.items():
        m = M.mu[sym]
        if sym == s0:
            mu[sym] = m
            continue
        data = m.data.copy()
        for r in range(data.shape[0]):
            closing = sr.mul(star, dot(Vec(M.states, m.data[r], sr, check=False), M.final))
            if closing == 0:
                continue
            data[r] = [sr.add(x, sr.mul(closing, y)) for x, y in zip(data[r], mu_s0)]
        mu[sym] = Matrix(m.rows, m.cols, data, sr, check=False)
    return Wta(M.alphabet, M.states, mu, M.final, sr)


def sigma_star_tm(X: Matrix) -> Matrix:
    return X


# -- construction tags and functor laws --------------------------------------------

class Construction(enum.Enum):
    SUM = "sum"
    HADAMARD = "hadamard"
    SIGMA_PRODUCT = "s0-product"
    SIGMA_STAR = "s0-star"


@dataclass(frozen=True)
class ConstructionTag:
    kind: Construction
    symbol: Optional[str] = None

    @property
    def binary(self) -> bool:
        return self.kind is not Construction.SIGMA_STAR

    def wta(self, M: Wta, N: Optional[Wta] = None) -> Wta:
        if self.kind is Construction.SUM:
            return sum_wta(M, N)
        if self.kind is Construction.HADAMARD:
            return hadamard_wta(M, N)
        if self.kind is Construction.SIGMA_PRODUCT:
            return sigma_product_wta(M, N, self.symbol)
        return sigma_star_wta(M, self.symbol)

    def tm(self, X: Matrix, Y: Optional[Matrix] = None) -> Matrix:
        if self.kind is Construction.SUM:
            return sum_tm(X, Y)
        if self.kind is Construction.HADAMARD:
            return hadamard_tm(X, Y)
        if self.kind is Construction.SIGMA_PRODUCT:
            return sigma_product_tm(X, Y)
        return sigma_star_tm(X)


@dataclass(frozen=True)
class FunctorReport:
    identity: bool
    composition: bool
    preserves_simulation: bool

    def __bool__(self):
        return self.identity and self.composition and self.preserves_simulation


def functor_laws(tag: ConstructionTag, first: tuple[TransferMatrix, TransferMatrix],
                 second: Optional[tuple[TransferMatrix, TransferMatrix]] = None) -> FunctorReport:
    """Check the functor laws on composable simulations.

    ``first = (X, X2)`` with ``M ->X M' ->X2 M''``; for binary constructions
    ``second = (Y, Y2)`` likewise on the right argument.
    """
    X, X2 = first
    if tag.binary:
        if second is None:
            raise InputError(f"{tag.kind.value} needs simulations for both arguments")
        Y, Y2 = second
        auts = [tag.wta(X.source, Y.source), tag.wta(X.target, Y.target),
                tag.wta(X2.target, Y2.target)]
        ids = (identity_transfer(X.source).matrix, identity_transfer(Y.source).matrix)
        step1, step2 = tag.tm(X.matrix, Y.matrix), tag.tm(X2.matrix, Y2.matrix)
        composite = tag.tm(matmul(X.matrix, X2.matrix), matmul(Y.matrix, Y2.matrix))
    else:
        auts = [tag.wta(X.source), tag.wta(X.target), tag.wta(X2.target)]
        ids = (identity_transfer(X.source).matrix,)
        step1, step2 = tag.tm(X.matrix), tag.tm(X2.matrix)
        composite = tag.tm(matmul(X.matrix, X2.matrix))
    identity = tag.tm(*ids) == Matrix.identity(auts[0].states, auts[0].semiring)
    composition = matmul(step1, step2) == composite
    preserves = bool(check_simulation(auts[0], auts[1], step1)) and bool(
        check_simulation(auts[1], auts[2], step2))
    return FunctorReport(identity, composition, preserves)
