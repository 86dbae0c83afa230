"""Ranked trees and weighted tree automata.

A wta over a semiring has one transition matrix per symbol: a symbol of
rank ``k`` maps to a matrix in ``A^{Q^k x Q}`` whose rows are the k-tuples
of states in lexicographic order.  The bottom-up vector of a tree is

    h(sigma(t1, ..., tk)) = (h(t1) ⊗ ... ⊗ h(tk)) · mu(sigma)

and its weight is the dot product of that vector with the final vector.
"""

from __future__ import annotations

import itertools
import warnings
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InputError, TreeError
from .linalg import IndexSet, Matrix, Vec, dot, kron_vectors_apply
from .semiring import BOOL, Semiring


class RankedAlphabet:
    """Symbols with ranks, kept in declaration order."""

    __slots__ = ("_ranks",)

    def __init__(self, symbols: Iterable[tuple[str, int]] | Mapping[str, int]):
        items = symbols.items() if isinstance(symbols, Mapping) else symbols
        ranks: dict[str, int] = {}
        for name, rank in items:
            if name in ranks:
                raise InputError(f"duplicate symbol {name!r}")
            if rank < 0:
                raise InputError(f"negative rank for {name!r}")
            ranks[name] = int(rank)
        self._ranks = ranks
        if ranks and not any(r == 0 for r in ranks.values()):
            warnings.warn("alphabet has no nullary symbol, so there are no trees", stacklevel=2)

    def __iter__(self):
        return iter(self._ranks)

    def __len__(self):
        return len(self._ranks)

    def __contains__(self, name):
        return name in self._ranks

    def __eq__(self, other):
        return isinstance(other, RankedAlphabet) and list(self._ranks.items()) == list(other._ranks.items())

    def same_symbols(self, other: "RankedAlphabet") -> bool:
        return dict(self._ranks) == dict(other._ranks)

    def __repr__(self):
        return "RankedAlphabet(" + ", ".join(f"{s}/{r}" for s, r in self._ranks.items()) + ")"

    def rank(self, name: str) -> int:
        try:
            return self._ranks[name]
        except KeyError:
            raise TreeError(f"unknown symbol {name!r}") from None

    def items(self):
        return self._ranks.items()

    def of_rank(self, k: int) -> list[str]:
        return [s for s, r in self._ranks.items() if r == k]

    @property
    def max_rank(self) -> int:
        return max(self._ranks.values(), default=0)


class Tree:
    """Immutable ranked tree ``symbol(children...)``."""

    __slots__ = ("symbol", "children", "size", "_hash")

    def __init__(self, symbol: str, children: Sequence["Tree"] = ()):
        self.symbol = symbol
        self.children = tuple(children)
        self.size = 1 + sum(c.size for c in self.children)
        self._hash = hash((symbol, self.children))

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Tree) and self._hash == other._hash
                and self.symbol == other.symbol and self.children == other.children)

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.children:
            return self.symbol
        return f"{self.symbol}(" + ",".join(str(c) for c in self.children) + ")"

    def __repr__(self):
        return f"Tree({self})"

    def preorder(self) -> tuple[str, ...]:
        out = [self.symbol]
        for c in self.children:
            out.extend(c.preorder())
        return tuple(out)

    def validate(self, alphabet: RankedAlphabet) -> None:
        stack = [self]
        while stack:
            t = stack.pop()
            if t.symbol not in alphabet:
                raise TreeError(f"unknown symbol {t.symbol!r}")
            if alphabet.rank(t.symbol) != len(t.children):
                raise TreeError(
                    f"symbol {t.symbol!r} has rank {alphabet.rank(t.symbol)} "
                    f"but {len(t.children)} children")
            stack.extend(t.children)


def _tree_key(t: Tree):
    return (t.size, t.preorder())


class Wta:
    """``(alphabet, states, mu, final)`` over a semiring."""

    __slots__ = ("alphabet", "states", "mu", "final", "semiring")

    def __init__(self, alphabet: RankedAlphabet, states, mu: Mapping[str, Matrix], final: Vec,
                 semiring: Semiring):
        self.alphabet = alphabet
        self.states = states if isinstance(states, IndexSet) else IndexSet(states)
        self.semiring = semiring
        if set(mu) != set(alphabet):
            missing = set(alphabet) ^ set(mu)
            raise InputError(f"transition matrices do not match the alphabet: {sorted(missing)}")
        self.mu = {s: mu[s] for s in alphabet}
        self.final = final
        if final.index != self.states:
            raise InputError("final vector is not indexed by the states")
        for s, k in alphabet.items():
            m = self.mu[s]
            if m.rows != self.states.power(k) or m.cols != self.states:
                raise InputError(f"transition matrix for {s!r} has the wrong shape")
            if m.semiring != semiring:
                raise InputError(f"transition matrix for {s!r} is over {m.semiring.name}")
        if final.semiring != semiring:
            raise InputError("final vector uses a different semiring")

    @classmethod
    def build(cls, semiring: Semiring, alphabet, states: Sequence[Hashable],
              transitions: Mapping[tuple, object] = (), final: Mapping[Hashable, object] = ()):
        """Construct from sparse dictionaries.

        ``transitions`` maps ``(symbol, (q1, ..., qk), q)`` to a weight and
        ``final`` maps states to weights; anything omitted is zero.
        """
        if not isinstance(alphabet, RankedAlphabet):
            alphabet = RankedAlphabet(alphabet)
        states = IndexSet(states)
        entries: dict[str, dict] = {s: {} for s in alphabet}
        for (sym, children, q), w in dict(transitions).items():
            k = alphabet.rank(sym)
            children = tuple(children)
            if len(children) != k:
                raise InputError(f"transition for {sym!r} has {len(children)} children, rank {k}")
            entries[sym][(children, q)] = w
        mu = {
            s: Matrix.from_dict(states.power(k), states, entries[s], semiring)
            for s, k in alphabet.items()
        }
        return cls(alphabet, states, mu, Vec.from_dict(states, dict(final), semiring), semiring)

    def __eq__(self, other):
        return (
            isinstance(other, Wta)
            and self.semiring == other.semiring
            and self.alphabet == other.alphabet
            and self.states == other.states
            and self.final == other.final
            and all(self.mu[s] == other.mu[s] for s in self.alphabet)
        )

    def __repr__(self):
        return (f"Wta({self.semiring.name}, states={list(self.states)}, "
                f"alphabet={self.alphabet!r})")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def transition(self, symbol: str, children: Sequence[Hashable], q: Hashable):
        return self.mu[symbol][tuple(children), q]

    def relabel(self, mapping: Mapping[Hashable, Hashable]) -> "Wta":
        """Rename states; state order is kept."""
        states = IndexSet(mapping[q] for q in self.states)
        mu = {
            s: m.relabel(rows=states.power(self.alphabet.rank(s)), cols=states)
            for s, m in self.mu.items()
        }
        final = Vec(states, self.final.data, self.semiring, check=False)
        return Wta(self.alphabet, states, mu, final, self.semiring)

    def restrict(self, keep: Iterable[Hashable]) -> "Wta":
        keep_set = set(keep)
        states = IndexSet(q for q in self.states if q in keep_set)
        mu = {
            s: m.submatrix(states.power(self.alphabet.rank(s)), states)
            for s, m in self.mu.items()
        }
        final = Vec(states, [self.final[q] for q in states], self.semiring)
        return Wta(self.alphabet, states, mu, final, self.semiring)

    def map_weights(self, fn, semiring: Semiring) -> "Wta":
        mu = {
            s: Matrix(m.rows, m.cols, [[fn(x) for x in row] for row in m.data], semiring)
            for s, m in self.mu.items()
        }
        final = Vec(self.states, [fn(x) for x in self.final.data], semiring)
        return Wta(self.alphabet, self.states, mu, final, semiring)

    def nonzero_transitions(self) -> Iterator[tuple[str, tuple, Hashable, object]]:
        """Yield ``(symbol, children, target, weight)`` in canonical order."""
        for s in self.alphabet:
            m = self.mu[s]
            for i, w in enumerate(m.rows):
                for j, q in enumerate(m.cols):
                    x = m.data[i, j]
                    if x != 0:
                        yield s, w, q, x


def eval_vector(M: Wta, t: Tree, _memo: dict | None = None) -> Vec:
    """Bottom-up state vector of ``t``."""
    memo = {} if _memo is None else _memo
    if _memo is None:
        t.validate(M.alphabet)
    # iterative post-order so deep trees do not hit the recursion limit
    stack = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if node in memo:
            continue
        if expanded or not node.children:
            if len(node.children) != M.alphabet.rank(node.symbol):
                raise TreeError(f"arity mismatch at {node.symbol!r}")
            memo[node] = kron_vectors_apply([memo[c] for c in node.children], M.mu[node.symbol])
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children if c not in memo)
    return memo[t]


def evaluate(M: Wta, t: Tree):
    """Weight ``(⟦M⟧, t)``."""
    return dot(eval_vector(M, t), M.final)


def evaluate_many(M: Wta, trees: Iterable[Tree]) -> dict[Tree, object]:
    """Weights for many trees, sharing the vectors of common subtrees."""
    memo: dict = {}
    out = {}
    for t in trees:
        t.validate(M.alphabet)
        out[t] = dot(eval_vector(M, t, memo), M.final)
    return out


def trees_by_size(alphabet: RankedAlphabet, max_size: int) -> list[list[Tree]]:
    """``result[n]`` lists all trees with exactly ``n`` nodes (``result[0]`` is empty)."""
    by_size: list[list[Tree]] = [[] for _ in range(max_size + 1)]
    symbols = sorted(alphabet.items())
    for n in range(1, max_size + 1):
        level = []
        for sym, k in symbols:
            if k == 0:
                if n == 1:
                    level.append(Tree(sym))
                continue
            for sizes in _compositions(n - 1, k):
                for kids in itertools.product(*(by_size[s] for s in sizes)):
                    level.append(Tree(sym, kids))
        level.sort(key=_tree_key)
        by_size[n] = level
    return by_size


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_trees(alphabet: RankedAlphabet, max_size: int) -> list[Tree]:
    """All trees with at most ``max_size`` nodes, by size then preorder symbol names."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    return [t for level in trees_by_size(alphabet, max_size) for t in level]


def support(M: Wta) -> Wta:
    """The Boolean automaton with every nonzero weight replaced by 1."""
    return M.map_weights(lambda x: 1 if x != 0 else 0, BOOL)


def accessible_states(M: Wta) -> set:
    acc: set = set()
    changed = True
    while changed:
        changed = False
        for s, w, q, _ in M.nonzero_transitions():
            if q not in acc and all(c in acc for c in w):
                acc.add(q)
                changed = True
    return acc


def coaccessible_states(M: Wta, accessible: set | None = None) -> set:
    """States that can feed a nonzero final weight through accessible contexts."""
    acc = accessible_states(M) if accessible is None else accessible
    co = {q for q in M.states if M.final[q] != 0}
    transitions = list(M.nonzero_transitions())
    changed = True
    while changed:
        changed = False
        for _, w, q, _ in transitions:
            if q not in co:
                continue
            for pos, c in enumerate(w):
                if c in co:
                    continue
                if all(o in acc for i, o in enumerate(w) if i != pos):
                    co.add(c)
                    changed = True
    return co


def useful_states(M: Wta) -> list:
    acc = accessible_states(M)
    co = coaccessible_states(M, acc)
    return [q for q in M.states if q in acc and q in co]


def trim(M: Wta) -> tuple[Wta, list]:
    keep = useful_states(M)
    removed = [q for q in M.states if q not in set(keep)]
    return M.restrict(keep), removed


def is_trim(M: Wta) -> bool:
    return len(useful_states(M)) == M.n_states
