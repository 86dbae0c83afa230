"""Simulations between wta: checking, searching, and decomposing.

``M`` simulates ``N`` through a transfer matrix ``X`` (rows: states of M,
columns: states of N) when

    F = X G    and    mu(sigma) X = X^{k,⊗} nu(sigma)  for every sigma.

Forward and backward simulations are the special cases where ``X`` (resp.
``X^T``) encodes a surjective state map.  Over equisubtractive semirings
generated by their units every transfer matrix factors as ``C E D`` with
``C^T`` and ``D`` functional and ``E`` invertible diagonal, and the
simulation itself factors through two intermediate automata built by
:func:`decompose_simulation`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, NamedTuple, Optional

from .errors import (
    BudgetError,
    CapabilityError,
    InputError,
    InvariantError,
    PreconditionError,
)
from .linalg import (
    IndexSet,
    Matrix,
    Vec,
    classify,
    invert_diagonal,
    kron_power_apply,
    matmul,
    matvec,
)
from .semiring import Semiring, require_decomposition_carrier
from .wta import Wta, is_trim

MAX_SEARCH_STATES = 8


@dataclass(frozen=True)
class Violation:
    condition: str  # "final" or "transition"
    symbol: Optional[str]
    row: Hashable
    col: Optional[Hashable]
    lhs: object
    rhs: object

    def __str__(self):
        if self.condition == "final":
            return f"final weights differ at state {self.row!r}: {self.lhs} != {self.rhs}"
        return (f"symbol {self.symbol!r}, row {self.row!r}, column {self.col!r}: "
                f"{self.lhs} != {self.rhs}")


@dataclass(frozen=True)
class SimulationCheck:
    holds: bool
    violation: Optional[Violation] = None
    note: Optional[str] = None  # set when the target automaton is not trim

    def __bool__(self):
        return self.holds


_OK = SimulationCheck(True)


def _require_compatible(M: Wta, N: Wta):
    if M.semiring != N.semiring:
        raise InputError(f"semirings differ: {M.semiring.name} vs {N.semiring.name}")
    if not M.alphabet.same_symbols(N.alphabet):
        raise InputError("the automata use different ranked alphabets")


def check_simulation(M: Wta, N: Wta, X: Matrix) -> SimulationCheck:
    """Does ``M`` simulate ``N`` with transfer matrix ``X``?"""
    _require_compatible(M, N)
    if X.rows != M.states or X.cols != N.states:
        raise InputError(
            f"transfer matrix is {len(X.rows)}x{len(X.cols)} over the wrong labels; "
            f"expected {len(M.states)}x{len(N.states)}")
    if X.semiring != M.semiring:
        raise InputError("transfer matrix uses a different semiring")
    fmt = M.semiring.format_value
    XG = matvec(X, N.final)
    for q, a, b in zip(M.states, M.final.data, XG.data):
        if a != b:
            return SimulationCheck(False, Violation("final", None, q, None, fmt(a), fmt(b)))
    for sym, k in M.alphabet.items():
        lhs = matmul(M.mu[sym], X)
        rhs = kron_power_apply(X, k, N.mu[sym])
        if lhs.data.tolist() != rhs.data.tolist():
            for (i, row), (j, col) in itertools.product(enumerate(lhs.rows), enumerate(lhs.cols)):
                a, b = lhs.data[i, j], rhs.data[i, j]
                if a != b:
                    return SimulationCheck(False, Violation("transition", sym, row, col,
                                                            fmt(a), fmt(b)))
    return _OK


def _validate_map(M: Wta, N: Wta, rho: Mapping) -> dict:
    _require_compatible(M, N)
    missing = [q for q in M.states if q not in rho]
    if missing:
        raise InputError(f"state map is not total; no image for {missing[:5]}")
    bad = [q for q in M.states if rho[q] not in N.states]
    if bad:
        raise InputError(f"state map sends {bad[:5]} outside the target states")
    image = {rho[q] for q in M.states}
    if len(image) != len(N.states):
        raise InputError("state map is not surjective")
    return {q: rho[q] for q in M.states}


def _trim_note(N: Wta, check: SimulationCheck) -> SimulationCheck:
    if is_trim(N):
        return check
    return SimulationCheck(check.holds, check.violation,
                           "target automaton is not trim; the verdict need not match the "
                           "transfer-matrix check")


def check_forward(M: Wta, N: Wta, rho: Mapping) -> SimulationCheck:
    """Is the surjection ``rho: Q -> P`` a forward simulation from M to N?"""
    return _trim_note(N, _check_forward(M, N, rho))


def check_backward(M: Wta, N: Wta, rho: Mapping) -> SimulationCheck:
    """Is the surjection ``rho: Q -> P`` a backward simulation from M to N?"""
    return _trim_note(N, _check_backward(M, N, rho))


def _check_forward(M: Wta, N: Wta, rho: Mapping) -> SimulationCheck:
    rho = _validate_map(M, N, rho)
    fmt = M.semiring.format_value
    sr = M.semiring
    for q in M.states:
        if M.final[q] != N.final[rho[q]]:
            return SimulationCheck(False, Violation("final", None, q, None,
                                                    fmt(M.final[q]), fmt(N.final[rho[q]])))
    for sym, k in M.alphabet.items():
        mu, nu = M.mu[sym], N.mu[sym]
        for w in itertools.product(M.states, repeat=k):
            sums = {p: sr.zero for p in N.states}
            for q in M.states:
                sums[rho[q]] = sr.add(sums[rho[q]], mu[w, q])
            image = tuple(rho[c] for c in w)
            for p in N.states:
                if sums[p] != nu[image, p]:
                    return SimulationCheck(False, Violation("transition", sym, w, p,
                                                            fmt(sums[p]), fmt(nu[image, p])))
    return _OK


def _check_backward(M: Wta, N: Wta, rho: Mapping) -> SimulationCheck:
    rho = _validate_map(M, N, rho)
    fmt = M.semiring.format_value
    sr = M.semiring
    finals = {p: sr.zero for p in N.states}
    for q in M.states:
        finals[rho[q]] = sr.add(finals[rho[q]], M.final[q])
    for p in N.states:
        if finals[p] != N.final[p]:
            return SimulationCheck(False, Violation("final", None, p, None,
                                                    fmt(finals[p]), fmt(N.final[p])))
    for sym, k in M.alphabet.items():
        mu, nu = M.mu[sym], N.mu[sym]
        sums = {(pw, q): sr.zero
                for pw in itertools.product(N.states, repeat=k) for q in M.states}
        for w in itertools.product(M.states, repeat=k):
            pw = tuple(rho[c] for c in w)
            for q in M.states:
                sums[pw, q] = sr.add(sums[pw, q], mu[w, q])
        for q in M.states:
            for pw in itertools.product(N.states, repeat=k):
                if sums[pw, q] != nu[pw, rho[q]]:
                    return SimulationCheck(False, Violation("transition", sym, pw, q,
                                                            fmt(sums[pw, q]),
                                                            fmt(nu[pw, rho[q]])))
    return _OK


def map_matrix(rho: Mapping, rows: IndexSet, cols: IndexSet, semiring: Semiring) -> Matrix:
    """Functional 0/1 matrix ``X_rho`` with ``x[q, rho(q)] = 1``."""
    return Matrix.from_map(rows, cols, rho, semiring)


def _surjections(Q: IndexSet, P: IndexSet):
    n_p = len(P)
    for word in itertools.product(range(n_p), repeat=len(Q)):
        if len(set(word)) == n_p:
            yield {q: P[d] for q, d in zip(Q, word)}


def _find(M: Wta, N: Wta, checker) -> Optional[dict]:
    _require_compatible(M, N)
    if len(M.states) > MAX_SEARCH_STATES:
        raise BudgetError(
            f"exhaustive search over {len(M.states)} states exceeds the limit of "
            f"{MAX_SEARCH_STATES}")
    if len(N.states) > len(M.states) or (len(N.states) == 0) != (len(M.states) == 0):
        return None
    for rho in _surjections(M.states, N.states):
        if checker(M, N, rho).holds:
            return rho
    return None


def find_forward(M: Wta, N: Wta) -> Optional[dict]:
    """First forward simulation ``Q -> P`` in lexicographic order, or ``None``."""
    return _find(M, N, _check_forward)


def find_backward(M: Wta, N: Wta) -> Optional[dict]:
    """First backward simulation ``Q -> P`` in lexicographic order, or ``None``."""
    return _find(M, N, _check_backward)


def check_nondegenerate_consequence(M: Wta, N: Wta, X: Matrix) -> bool:
    """For trim M, N and a transfer matrix X that is functional (or any X over
    a positive semiring), X has no zero row or column."""
    if not (is_trim(M) and is_trim(N)):
        raise InputError("both automata must be trim")
    if not check_simulation(M, N, X):
        raise InputError("X is not a transfer matrix from M to N")
    c = classify(X)
    if not (c.functional or M.semiring.is_positive):
        raise InputError("X must be functional or the semiring positive")
    return c.nondegenerate


# -- unit decomposition -------------------------------------------------------

def decompose_units(X: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Factor ``X = C E D`` through ``J = {(q, i, p)}``, one index per unit summand."""
    sr = X.semiring
    require_decomposition_carrier(sr, "unit decomposition")
    if not sr.is_unit_generated:
        raise CapabilityError(f"{sr.name} is not additively generated by its units")
    labels, units = [], []
    for q in X.rows:
        for p in X.cols:
            for i, u in enumerate(sr.unit_decompose(X[q, p]), start=1):
                labels.append((q, i, p))
                units.append(u)
    J = IndexSet(labels)
    C = Matrix.from_dict(X.rows, J, {(j[0], j): 1 for j in labels}, sr)
    E = Matrix.from_dict(J, J, {(j, j): u for j, u in zip(labels, units)}, sr)
    D = Matrix.from_dict(J, X.cols, {(j, j[2]): 1 for j in labels}, sr)
    return C, E, D


# -- matrices with prescribed margins ------------------------------------------

def _split(values: list, a, b, sr: Semiring) -> tuple[list, list]:
    """Split ``values`` (summing to ``a + b``) entrywise into parts summing to a and b."""
    left, right = [], []
    for idx, v in enumerate(values):
        if idx == len(values) - 1:
            left.append(a)
            right.append(b)
            break
        rest = sr.sum(values[idx + 1:])
        c1, c2, d1, d2 = sr.equisubtract(v, rest, a, b)
        left.append(c1)
        right.append(d1)
        a, b = c2, d2
    return left, right


def _fill(R: list, C: list, sr: Semiring) -> list[list]:
    if not R:
        if any(c != 0 for c in C):
            raise PreconditionError("no rows to carry nonzero column sums")
        return []
    if not C:
        if any(r != 0 for r in R):
            raise PreconditionError("no columns to carry nonzero row sums")
        return [[] for _ in R]
    if len(R) == 1:
        return [list(C)]
    if len(C) == 1:
        return [[r] for r in R]
    r_rest, r_i = R[:-1], R[-1]
    c_rest, c_j = C[:-1], C[-1]
    a, r_i_rest, c_j_rest, x_ij = sr.equisubtract(sr.sum(r_rest), r_i, sr.sum(c_rest), c_j)
    # rows Q' split into the inner block (sum a) and column j (sum c_j_rest)
    inner_rows, col_j = _split(r_rest, a, c_j_rest, sr)
    # columns P' split into the inner block (sum a) and row i (sum r_i_rest)
    inner_cols, row_i = _split(c_rest, a, r_i_rest, sr)
    inner = _fill(inner_rows, inner_cols, sr)
    out = [inner[q] + [col_j[q]] for q in range(len(r_rest))]
    out.append(row_i + [x_ij])
    return out


def fill_matrix(R: Vec, Cv: Vec) -> Matrix:
    """A matrix with row sums ``R`` and column sums ``Cv``."""
    sr = R.semiring
    require_decomposition_carrier(sr, "fill_matrix")
    if not sr.is_equisubtractive:
        raise CapabilityError(f"{sr.name} is not equisubtractive")
    rows, cols = list(R.data), list(Cv.data)
    if sr.sum(rows) != sr.sum(cols):
        raise PreconditionError(
            f"row sums total {sr.sum(rows)} but column sums total {sr.sum(cols)}")
    return Matrix(R.index, Cv.index, _fill(rows, cols, sr), sr)


# -- decomposition of a simulation ----------------------------------------------

class Decomposition(NamedTuple):
    M1: Wta  # simulated by M through C
    N1: Wta  # simulated by M1 through E, simulates N through D
    C: Matrix
    E: Matrix
    D: Matrix


def decompose_simulation(M: Wta, N: Wta, X: Matrix) -> Decomposition:
    """Factor ``M ->X N`` as ``M ->C M1 ->E N1 ->D N``."""
    sr = M.semiring
    require_decomposition_carrier(sr, "decompose_simulation")
    if not (sr.is_equisubtractive and sr.is_unit_generated):
        raise CapabilityError(f"{sr.name} must be equisubtractive and unit-generated")
    check = check_simulation(M, N, X)
    if not check:
        raise PreconditionError(f"X is not a transfer matrix: {check.violation}")

    C, E, D = decompose_units(X)
    I = C.cols
    n = len(I)
    phi = {i: i[0] for i in I}
    psi = {i: i[2] for i in I}
    e = [E.data[t, t] for t in range(n)]
    pos = {i: t for t, i in enumerate(I)}
    by_q = {q: [i for i in I if phi[i] == q] for q in M.states}
    by_p = {p: [i for i in I if psi[i] == p] for p in N.states}
    E_inv = invert_diagonal(E)

    G1 = matvec(D, N.final)
    F1 = matvec(E, G1)

    mu1, nu1 = {}, {}
    for sym, k in M.alphabet.items():
        mu, nu = M.mu[sym], N.mu[sym]
        Y = Matrix.zeros(I.power(k), I, sr)
        for w in itertools.product(M.states, repeat=k):
            row_tuples = list(itertools.product(*(by_q[q] for q in w)))
            row_pos = [sum(pos[i] * n ** (k - 1 - j) for j, i in enumerate(rt))
                       for rt in row_tuples]
            for p in N.states:
                cols = by_p[p]
                col_targets = [sr.mul(mu[w, phi[i]], e[pos[i]]) for i in cols]
                row_targets = []
                for rt in row_tuples:
                    weight = sr.one
                    for i in rt:
                        weight = sr.mul(weight, e[pos[i]])
                    row_targets.append(sr.mul(weight, nu[tuple(psi[i] for i in rt), p]))
                if sr.sum(col_targets) != sr.sum(row_targets):
                    raise InvariantError(
                        f"incompatible margins for symbol {sym!r}, block {w!r}->{p!r}; "
                        "the simulation check and the decomposition disagree")
                block = _fill(row_targets, col_targets, sr)
                for r, rp in enumerate(row_pos):
                    for c, i in enumerate(cols):
                        Y.data[rp, pos[i]] = block[r][c]
        mu1[sym] = matmul(Y, E_inv)
        nu1[sym] = kron_power_apply(E_inv, k, Y)

    M1 = Wta(M.alphabet, I, mu1, F1, sr)
    N1 = Wta(M.alphabet, I, nu1, G1, sr)
    return Decomposition(M1, N1, C, E, D)


# -- transfer matrices as morphisms ----------------------------------------------

class StepKind(enum.Enum):
    GENERAL = "general"
    FORWARD_FUNCTIONAL = "forward_functional"
    BACKWARD_FUNCTIONAL = "backward_functional"
    INVERTIBLE_DIAGONAL = "invertible_diagonal"


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    matrix: Matrix
    source: Wta
    target: Wta

    def check(self) -> SimulationCheck:
        return check_simulation(self.source, self.target, self.matrix)


def identity_transfer(M: Wta) -> TransferMatrix:
    return TransferMatrix(Matrix.identity(M.states, M.semiring), M, M)


def compose(X: TransferMatrix, Y: TransferMatrix) -> TransferMatrix:
    """``M ->X M'`` and ``M' ->Y N`` give ``M ->XY N``."""
    if not (X.target is Y.source or X.target == Y.source):
        raise InputError("transfer matrices do not chain: target of the first "
                         "is not the source of the second")
    return TransferMatrix(matmul(X.matrix, Y.matrix), X.source, Y.target)


def step_kind_holds(X: Matrix, kind: StepKind) -> bool:
    c = classify(X)
    if kind is StepKind.FORWARD_FUNCTIONAL:
        return c.functional
    if kind is StepKind.BACKWARD_FUNCTIONAL:
        return classify(X.T).functional
    if kind is StepKind.INVERTIBLE_DIAGONAL:
        return c.invertible_diagonal
    return True


@dataclass
class SimulationChain:
    automata: list
    steps: list = field(default_factory=list)  # (TransferMatrix, StepKind)

    def validate(self) -> bool:
        if len(self.steps) != len(self.automata) - 1:
            return False
        for idx, (tm, kind) in enumerate(self.steps):
            if tm.source is not self.automata[idx] or tm.target is not self.automata[idx + 1]:
                return False
            if not tm.check() or not step_kind_holds(tm.matrix, kind):
                return False
        return True

    def total(self) -> TransferMatrix:
        acc = self.steps[0][0]
        for tm, _ in self.steps[1:]:
            acc = compose(acc, tm)
        return acc


def decomposition_chain(M: Wta, N: Wta, X: Matrix) -> SimulationChain:
    """The three-step chain ``M ->C M1 ->E N1 ->D N`` as a :class:`SimulationChain`."""
    M1, N1, C, E, D = decompose_simulation(M, N, X)
    return SimulationChain(
        [M, M1, N1, N],
        [
            (TransferMatrix(C, M, M1), StepKind.BACKWARD_FUNCTIONAL),
            (TransferMatrix(E, M1, N1), StepKind.INVERTIBLE_DIAGONAL),
            (TransferMatrix(D, N1, N), StepKind.FORWARD_FUNCTIONAL),
        ],
    )
