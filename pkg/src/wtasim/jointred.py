"""Joint reduction: one automaton that simulates both M and N.

Working in the sum automaton ``M + N`` (states ``Q ∪ P``), we grow a finite
set ``V`` of vectors that contains the images of the nullary transitions
and is closed under ``(v1 ⊗ ... ⊗ vk) · mu(sigma)`` up to the semimodule it
generates.  If every ``v = (v1 | v2)`` in ``V`` also satisfies
``v1 · F == v2 · G``, the automaton with state set ``V`` simulates both
inputs, which proves them equivalent.

Membership in the generated semimodule is decided per carrier:

* rationals: Gaussian elimination,
* integers: Hermite normal form with the unimodular transform kept so
  that coefficients can be recovered,
* naturals: bounded depth-first search (no cancellation, so the bound
  ``c_v <= min_i target_i // v_i`` is sound).

Over the naturals every round first applies the reduction
``v' <- v' - v`` for comparable pairs ``v <= v'``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .constructions import sum_wta
from .errors import BudgetError, CapabilityError, InputError, InvariantError
from .linalg import IndexSet, Matrix, Vec, dot, kron_vectors_apply
from .semiring import Carrier, Semiring
from .simulation import TransferMatrix, check_simulation
from .wta import Tree, Wta

MAX_ROUNDS = 10_000
MAX_PRODUCTS_PER_ROUND = 10 ** 6
NAT_SEARCH_NODES = 20_000  # per membership test inside the closure


# -- solvers ---------------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]], dim: int):
    """Row-style HNF of the lattice spanned by ``rows``.

    Returns ``(H, U, pivots)`` where ``H`` holds the nonzero HNF rows, ``U``
    the matching rows of the unimodular transform (``H[r] = sum_j U[r][j] *
    rows[j]``) and ``pivots`` the pivot column of each row.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    p = 0
    pivots = []
    for col in range(dim):
        if p == m:
            break
        for r in range(p + 1, m):
            b = A[r][col]
            if b == 0:
                continue
            a = A[p][col]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            A[p], A[r] = (
                [x * u + y * v for u, v in zip(A[p], A[r])],
                [-bg * u + ag * v for u, v in zip(A[p], A[r])],
            )
            U[p], U[r] = (
                [x * u + y * v for u, v in zip(U[p], U[r])],
                [-bg * u + ag * v for u, v in zip(U[p], U[r])],
            )
        if A[p][col] == 0:
            continue
        if A[p][col] < 0:
            A[p] = [-u for u in A[p]]
            U[p] = [-u for u in U[p]]
        for r in range(p):
            q = A[r][col] // A[p][col]
            if q:
                A[r] = [u - q * v for u, v in zip(A[r], A[p])]
                U[r] = [u - q * v for u, v in zip(U[r], U[p])]
        pivots.append(col)
        p += 1
    return A[:p], U[:p], pivots


def int_membership(target: Sequence[int], generators: Sequence[Sequence[int]]):
    """Integer coefficients ``c`` with ``sum c_j g_j == target``, or ``None``."""
    dim = len(target)
    H, U, pivots = hermite_normal_form(generators, dim)
    residual = list(map(int, target))
    coeff_h = []
    pivot_row = {c: r for r, c in enumerate(pivots)}
    for col in range(dim):
        if residual[col] == 0:
            if col in pivot_row:
                coeff_h.append(0)
            continue
        r = pivot_row.get(col)
        if r is None:
            return None
        q, rem = divmod(residual[col], H[r][col])
        if rem:
            return None
        coeff_h.append(q)
        residual = [u - q * v for u, v in zip(residual, H[r])]
    if any(residual):
        return None
    return [sum(d * U[r][j] for r, d in enumerate(coeff_h)) for j in range(len(generators))]


def rat_membership(target: Sequence, generators: Sequence[Sequence]):
    """Rational coefficients by Gaussian elimination; free variables set to 0."""
    dim, m = len(target), len(generators)
    rows = [[Fraction(generators[j][i]) for j in range(m)] + [Fraction(target[i])]
            for i in range(dim)]
    pivots = []
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, dim) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == dim:
            break
    if any(rows[i][m] != 0 for i in range(r, dim)):
        return None
    coeffs = [Fraction(0)] * m
    for i, col in enumerate(pivots):
        coeffs[col] = rows[i][m]
    return coeffs


class SearchBudgetExceeded(Exception):
    """The bounded natural-number search gave up before reaching a verdict."""


_FAILURE_MEMO_LIMIT = 100_000


def nat_membership(target: Sequence[int], generators: Sequence[Sequence[int]],
                   max_nodes: Optional[int] = None):
    """Natural coefficients with ``sum c_j g_j == target``, or ``None``.

    Exact search: a residual must lie in the integer lattice of the remaining
    generators' coordinate gcds, and each node branches on the positive
    coordinate covered by the fewest remaining generators (a coordinate
    with a single cover forces its coefficient).  ``max_nodes`` bounds the
    search; :class:`SearchBudgetExceeded` is raised when it runs out.
    """
    dim = len(target)
    if any(x < 0 for x in target):
        return None
    target = tuple(map(int, target))
    if not any(target):
        return [0] * len(generators)
    live = [j for j, g in enumerate(generators) if any(g)]
    if int_membership(target, [generators[j] for j in live]) is None:
        return None
    gens = {j: tuple(map(int, generators[j])) for j in live}
    failed: set = set()
    nodes = 0

    def branch_point(residual, avail):
        best = None
        for i in range(dim):
            r = residual[i]
            if not r:
                continue
            cover = [j for j in avail if gens[j][i]]
            if not cover:
                return None
            step = 0
            for j in cover:
                step = math.gcd(step, gens[j][i])
            if r % step:
                return None
            if best is None or len(cover) < len(best[1]):
                best = (i, cover)
        return best

    def solve(residual: tuple, avail: tuple):
        nonlocal nodes
        if not any(residual):
            return {}
        key = (residual, avail)
        if key in failed:
            return None
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise SearchBudgetExceeded(f"natural membership search exceeded {max_nodes} nodes")
        found = None
        point = branch_point(residual, avail)
        if point is not None:
            i, cover = point
            j = cover[0]
            g = gens[j]
            rest = tuple(a for a in avail if a != j)
            bound = min(residual[k] // g[k] for k in range(dim) if g[k])
            if len(cover) == 1:
                forced = residual[i] // g[i]
                choices = [forced] if forced <= bound else []
            else:
                choices = range(bound, -1, -1)
            for c in choices:
                sol = solve(tuple(x - c * y for x, y in zip(residual, g)), rest)
                if sol is not None:
                    sol[j] = c
                    found = sol
                    break
        if found is None and len(failed) < _FAILURE_MEMO_LIMIT:
            failed.add(key)
        return found

    sol = solve(target, tuple(live))
    if sol is None:
        return None
    return [sol.get(j, 0) for j in range(len(generators))]


# -- generator sets ----------------------------------------------------------------

@dataclass
class GeneratorSet:
    index: IndexSet
    semiring: Semiring
    vectors: list = field(default_factory=list)  # tuples of values
    closed: bool = False
    iterations: int = 0

    def __len__(self):
        return len(self.vectors)

    def as_vecs(self) -> list[Vec]:
        return [Vec(self.index, list(v), self.semiring) for v in self.vectors]


def _require_solver_carrier(sr: Semiring):
    if sr.carrier is Carrier.BOOL:
        raise CapabilityError("joint reduction is not available over the Boolean semiring; "
                              "embed the automata into nat instead")


def membership(target, V, semiring: Optional[Semiring] = None):
    """Coefficients expressing ``target`` over the generators, or ``None``.

    ``V`` is a :class:`GeneratorSet` or a plain sequence of vectors (then
    ``semiring`` is required).
    """
    if isinstance(V, GeneratorSet):
        semiring = semiring or V.semiring
        gens = V.vectors
    else:
        gens = [v.values() if isinstance(v, Vec) else tuple(v) for v in V]
    if semiring is None:
        raise InputError("membership needs a semiring")
    _require_solver_carrier(semiring)
    t = target.values() if isinstance(target, Vec) else tuple(target)
    if any(len(g) != len(t) for g in gens):
        raise InputError("generator and target dimensions differ")
    if semiring.carrier is Carrier.RAT:
        return rat_membership(t, gens)
    if semiring.carrier is Carrier.INT:
        return int_membership(t, gens)
    return nat_membership(t, gens)


def _reduce_key(v: tuple):
    return (sum(v), v)


def reduce_nat(V: GeneratorSet) -> GeneratorSet:
    """Replace ``v'`` by ``v' - v`` while some ``v <= v'``; drop zero vectors."""
    if V.semiring.carrier is not Carrier.NAT:
        raise CapabilityError("reduce_nat only applies over nat")
    vecs = sorted((tuple(v) for v in V.vectors if any(v)), key=_reduce_key)
    while True:
        hit = None
        for i, j in itertools.permutations(range(len(vecs)), 2):
            if all(a <= b for a, b in zip(vecs[i], vecs[j])):
                hit = (i, j)
                break
        if hit is None:
            break
        i, j = hit
        diff = tuple(b - a for a, b in zip(vecs[i], vecs[j]))
        del vecs[j]
        if any(diff):
            vecs.append(diff)
        vecs.sort(key=_reduce_key)
    return GeneratorSet(V.index, V.semiring, vecs, V.closed, V.iterations)


# -- closure ---------------------------------------------------------------------

def _products(MN: Wta, vectors: list[tuple], index: IndexSet) -> Iterator[tuple]:
    sr = MN.semiring
    vecs = [Vec(index, list(v), sr) for v in vectors]
    total = sum(len(vecs) ** k for _, k in MN.alphabet.items())
    if total > MAX_PRODUCTS_PER_ROUND:
        raise BudgetError(
            f"{total} tuple products in one closure round exceed the limit of "
            f"{MAX_PRODUCTS_PER_ROUND}; shrink the automata")
    for sym, k in MN.alphabet.items():
        for combo in itertools.product(vecs, repeat=k):
            yield kron_vectors_apply(list(combo), MN.mu[sym]).values()


def _nat_member_within_budget(v: tuple, vectors: list) -> bool:
    # An undecided search counts as "not a member": adding a vector that is
    # already in the span leaves the span unchanged.
    try:
        return nat_membership(v, vectors, max_nodes=NAT_SEARCH_NODES) is not None
    except SearchBudgetExceeded:
        return False


def iter_closure(MN: Wta, max_rounds: int = MAX_ROUNDS) -> Iterator[GeneratorSet]:
    """Run the closure one round at a time, yielding the current set after each round.

    The last yielded set has ``closed=True``.
    """
    for V in _closure_steps(MN, max_rounds):
        if V is not None:
            yield V


TICK_PRODUCTS = 32  # products examined between two progress ticks


def _closure_steps(MN: Wta, max_rounds: int) -> Iterator[Optional[GeneratorSet]]:
    """Like :func:`iter_closure`, plus a ``None`` tick every few products so
    that a caller can interleave other work inside long rounds."""
    sr = MN.semiring
    _require_solver_carrier(sr)
    index = MN.states
    dim = len(index)
    V = GeneratorSet(index, sr)
    initial = [MN.mu[s].data[0].tolist() for s in MN.alphabet.of_rank(0)]
    initial = [tuple(v) for v in initial if any(v)]

    if sr.carrier is Carrier.NAT:
        vecs: list[tuple] = []
        for v in initial:
            if v not in vecs:
                vecs.append(v)
        V.vectors = vecs
        yield V
        while True:
            if V.iterations >= max_rounds:
                raise BudgetError(f"closure did not stabilise within {max_rounds} rounds; "
                                  f"last generator set: {V.vectors}")
            V = reduce_nat(V)
            new = []
            for n, v in enumerate(_products(MN, V.vectors, index), start=1):
                if n % TICK_PRODUCTS == 0:
                    yield None
                if any(v) and v not in new and not _nat_member_within_budget(v, V.vectors):
                    new.append(v)
            V.iterations += 1
            if not new:
                V.closed = True
                yield V
                return
            V.vectors = V.vectors + new
            yield V

    def absorb(v: tuple) -> bool:
        if not any(v) or membership(v, V.vectors, sr) is not None:
            return False
        if sr.carrier is Carrier.INT:
            H, _, _ = hermite_normal_form(V.vectors + [v], dim)
            V.vectors = [tuple(h) for h in H]
        else:
            V.vectors.append(tuple(v))
        return True

    for v in initial:
        absorb(v)
    yield V
    while True:
        if V.iterations >= max_rounds:
            raise BudgetError(f"closure did not stabilise within {max_rounds} rounds; "
                              f"last generator set: {V.vectors}")
        changed = False
        snapshot = list(V.vectors)
        for n, v in enumerate(_products(MN, snapshot, index), start=1):
            if n % TICK_PRODUCTS == 0:
                yield None
            changed |= absorb(v)
        V.iterations += 1
        if not changed:
            V.closed = True
            yield V
            return
        yield V


def closure(MN: Wta, max_rounds: int = MAX_ROUNDS) -> GeneratorSet:
    V = None
    for V in iter_closure(MN, max_rounds):
        pass
    return V


# -- the joining automaton -----------------------------------------------------------

class Verdict(enum.Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not-equivalent"


@dataclass
class Joiner:
    wta: Wta
    X1: TransferMatrix  # joiner -> M
    X2: TransferMatrix  # joiner -> N


@dataclass
class JointResult:
    verdict: Verdict
    witness: Optional[Tree] = None
    joiner: Optional[Joiner] = None
    closure_iterations: int = 0
    generators: int = 0
    note: Optional[str] = None

    @property
    def equivalent(self) -> bool:
        return self.verdict is Verdict.EQUIVALENT

    def stats(self) -> dict:
        return {
            "generators": self.generators,
            "iterations": self.closure_iterations,
            "joiner_states": self.joiner.wta.n_states if self.joiner else None,
        }


def final_weights_agree(V: GeneratorSet, M: Wta, N: Wta) -> Optional[tuple]:
    """First generator ``(v1 | v2)`` with ``v1 · F != v2 · G``, or ``None``."""
    n_q = M.n_states
    for v in V.vectors:
        a = dot(Vec(M.states, list(v[:n_q]), M.semiring), M.final)
        b = dot(Vec(N.states, list(v[n_q:]), N.semiring), N.final)
        if a != b:
            return v
    return None


def build_joiner(MN: Wta, V: GeneratorSet, M: Wta, N: Wta) -> JointResult:
    """Build the automaton on ``V`` simulating both M and N, if the final weights agree."""
    sr = MN.semiring
    n_q = M.n_states
    stats = dict(closure_iterations=V.iterations, generators=len(V))
    bad = final_weights_agree(V, M, N)
    if bad is not None:
        fmt = sr.format_value
        return JointResult(Verdict.NOT_EQUIVALENT,
                           note=f"final weights disagree on generator ({', '.join(map(fmt, bad))})",
                           **stats)
    labels = IndexSet(f"v{i}" for i in range(len(V)))
    vecs = [Vec(MN.states, list(v), sr) for v in V.vectors]
    nu = {}
    for sym, k in MN.alphabet.items():
        rows = []
        for combo in itertools.product(vecs, repeat=k):
            target = kron_vectors_apply(list(combo), MN.mu[sym])
            coeffs = membership(target, V)
            if coeffs is None:
                raise InvariantError(f"closure is not closed: product for {sym!r} "
                                     "is outside the generated semimodule")
            rows.append(coeffs)
        nu[sym] = Matrix(labels.power(k), labels, rows, sr)
    g2 = [dot(Vec(M.states, list(v[:n_q]), sr), M.final) for v in V.vectors]
    joiner = Wta(MN.alphabet, labels, nu, Vec(labels, g2, sr), sr)
    X1 = Matrix(labels, M.states, [v[:n_q] for v in V.vectors], sr)
    X2 = Matrix(labels, N.states, [v[n_q:] for v in V.vectors], sr)
    for X, target, name in ((X1, M, "M"), (X2, N, "N")):
        check = check_simulation(joiner, target, X)
        if not check:
            raise InvariantError(f"joiner does not simulate {name}: {check.violation}")
    return JointResult(Verdict.EQUIVALENT,
                       joiner=Joiner(joiner, TransferMatrix(X1, joiner, M),
                                     TransferMatrix(X2, joiner, N)),
                       **stats)


# -- decision procedure ----------------------------------------------------------------

class WitnessSearch:
    """Enumerates trees by size looking for one where the two weights differ.

    Trees whose pair of state vectors was already seen are skipped: any
    tree built from them is matched by one built from the earlier, no
    larger representative, so the first witness found has minimal size.
    """

    def __init__(self, M: Wta, N: Wta, chunk: int = 256):
        self.M, self.N = M, N
        self.chunk = chunk
        self.size = 0  # largest fully explored size
        self.witness: Optional[Tree] = None
        self._gen = self._run()

    def _run(self):
        M, N = self.M, self.N
        symbols = sorted(M.alphabet.items())
        reps: dict[int, list] = {}
        seen = set()
        work = 0
        n = 0
        while True:
            n += 1
            level = []
            for sym, k in symbols:
                if k == 0:
                    if n == 1:
                        candidates = [()]
                    else:
                        continue
                else:
                    candidates = (
                        combo
                        for sizes in _compositions(n - 1, k)
                        for combo in itertools.product(*(reps.get(s, []) for s in sizes))
                    )
                for combo in candidates:
                    hm = kron_vectors_apply([c[1] for c in combo], M.mu[sym])
                    hn = kron_vectors_apply([c[2] for c in combo], N.mu[sym])
                    key = hm.values() + hn.values()
                    work += 1
                    if work % self.chunk == 0:
                        yield None
                    if key in seen:
                        continue
                    seen.add(key)
                    tree = Tree(sym, [c[0] for c in combo])
                    level.append((tree, hm, hn))
                    if dot(hm, M.final) != dot(hn, N.final):
                        self.witness = tree
                        yield tree
                        return
            reps[n] = level
            self.size = n
            if not level and all(not reps.get(s) for s in range(max(1, n - 20), n)):
                # nothing new for a long stretch: the representative set is exhausted
                return
            yield None

    def step(self) -> Optional[Tree]:
        """Advance a bounded amount of work; return the witness once found."""
        if self.witness is not None:
            return self.witness
        return next(self._gen, None)

    @property
    def exhausted(self) -> bool:
        return self._gen.gi_frame is None and self.witness is None


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _reduction_task(M: Wta, N: Wta, max_rounds: int):
    MN = sum_wta(M, N)
    V = None
    for step in _closure_steps(MN, max_rounds):
        if step is None:
            yield V  # progress tick: the last completed snapshot
            continue
        V = step
        if not V.closed:
            yield V
    yield build_joiner(MN, V, M, N)


def decide_equiv(M: Wta, N: Wta, max_rounds: int = MAX_ROUNDS,
                 witness_chunk: int = 256) -> JointResult:
    """Decide whether M and N recognise the same tree series.

    Joint reduction and a search for a distinguishing tree are interleaved
    cooperatively; the first decisive outcome wins.  When the reduction
    rejects first, the tree search continues up to size ``|Q| + |P| + 2``.
    """
    if M.semiring != N.semiring:
        raise InputError(f"semirings differ: {M.semiring.name} vs {N.semiring.name}")
    if not M.alphabet.same_symbols(N.alphabet):
        raise InputError("the automata use different ranked alphabets")
    _require_solver_carrier(M.semiring)

    reduction = _reduction_task(M, N, max_rounds)
    search = WitnessSearch(M, N, witness_chunk)
    last_V = None
    outcome: Optional[JointResult] = None
    while outcome is None:
        step = next(reduction)
        if isinstance(step, JointResult):
            outcome = step
            break
        last_V = step
        if not search.exhausted:
            tree = search.step()
            if tree is not None:
                reduction.close()
                return JointResult(Verdict.NOT_EQUIVALENT, witness=tree,
                                   closure_iterations=last_V.iterations if last_V else 0,
                                   generators=len(last_V) if last_V else 0)
    if outcome.equivalent:
        return outcome
    bound = M.n_states + N.n_states + 2
    while not search.exhausted and search.size < bound:
        tree = search.step()
        if tree is not None:
            outcome.witness = tree
            outcome.note = None
            return outcome
    extra = f"no distinguishing tree up to size {bound}"
    outcome.note = f"{outcome.note}; {extra}" if outcome.note else extra
    return outcome
