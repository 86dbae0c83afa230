"""Random automata and random simulations for tests and experiments.

Every generator takes a ``random.Random`` so runs are reproducible from a
seed.  Simulation instances are built rather than searched for: a state
map or a diagonal rescaling is chosen first and the weights of one
automaton are derived from the other so the simulation equations hold by
construction.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linalg import IndexSet, Matrix, Vec, kron_power_apply, matmul
from .semiring import Carrier, Semiring
from .wta import RankedAlphabet, Wta

DEFAULT_ALPHABET = RankedAlphabet([("alpha", 0), ("beta", 0), ("gamma", 1), ("sigma", 2)])


@dataclass(frozen=True)
class RandomWtaConfig:
    n_states: int = 2
    alphabet: RankedAlphabet = DEFAULT_ALPHABET
    density: float = 0.5
    max_weight: int = 3  # absolute bound on numerators
    max_denominator: int = 3  # rat only


def random_value(rng: random.Random, sr: Semiring, max_weight: int = 3,
                 max_denominator: int = 3, nonzero: bool = False):
    while True:
        c = sr.carrier
        if c is Carrier.BOOL:
            v = rng.randint(0, 1)
        elif c is Carrier.NAT:
            v = rng.randint(0, max_weight)
        elif c is Carrier.INT:
            v = rng.randint(-max_weight, max_weight)
        else:
            v = Fraction(rng.randint(-max_weight, max_weight), rng.randint(1, max_denominator))
        if not nonzero or v != 0:
            return sr.coerce(v)


def random_wta(rng: random.Random, sr: Semiring, cfg: RandomWtaConfig = RandomWtaConfig(),
               prefix: str = "q") -> Wta:
    states = [f"{prefix}{i}" for i in range(cfg.n_states)]
    trans = {}
    for sym, k in cfg.alphabet.items():
        for w in itertools.product(states, repeat=k):
            for q in states:
                if rng.random() < cfg.density:
                    trans[sym, w, q] = random_value(rng, sr, cfg.max_weight, cfg.max_denominator)
    final = {q: random_value(rng, sr, cfg.max_weight, cfg.max_denominator)
             for q in states if rng.random() < max(cfg.density, 0.5)}
    return Wta.build(sr, cfg.alphabet, states, trans, final)


def random_split(rng: random.Random, sr: Semiring, value, parts: int) -> list:
    """``parts`` carrier values summing to ``value``."""
    if parts == 1:
        return [value]
    c = sr.carrier
    if c is Carrier.NAT:
        cuts = sorted(rng.randint(0, value) for _ in range(parts - 1))
        bounds = [0] + cuts + [value]
        return [bounds[i + 1] - bounds[i] for i in range(parts)]
    if c is Carrier.BOOL:
        out = [0] * parts
        if value:
            for i in rng.sample(range(parts), rng.randint(1, parts)):
                out[i] = 1
        return out
    head = [random_value(rng, sr, 2, 2) for _ in range(parts - 1)]
    return head + [value - sum(head, sr.zero)]


def random_surjection(rng: random.Random, n_src: int, n_tgt: int) -> list[int]:
    """A surjective map ``range(n_src) -> range(n_tgt)`` as a list."""
    images = list(range(n_tgt)) + [rng.randrange(n_tgt) for _ in range(n_src - n_tgt)]
    rng.shuffle(images)
    return images


# -- simulations by construction -------------------------------------------------

@dataclass
class SimulationInstance:
    """``source`` simulates ``target`` through ``matrix``."""
    source: Wta
    target: Wta
    matrix: Matrix
    rho: Optional[dict] = None  # state map for forward/backward steps
    kind: str = "general"


def forward_split(rng: random.Random, N: Wta, n_states: Optional[int] = None,
                  prefix: str = "s") -> SimulationInstance:
    """A larger automaton M with a forward simulation ``rho: Q -> P`` onto N.

    Each target weight ``nu(rho(w))[p]`` is split over the fibre of ``p``.
    """
    sr = N.semiring
    n_p = N.n_states
    n_q = n_p + rng.randint(0, 2) if n_states is None else n_states
    img = random_surjection(rng, n_q, n_p) if n_p else []
    Q = [f"{prefix}{i}" for i in range(n_q)]
    rho = {Q[i]: N.states[img[i]] for i in range(n_q)}
    fibre = {p: [q for q in Q if rho[q] == p] for p in N.states}
    trans = {}
    for sym, k in N.alphabet.items():
        nu = N.mu[sym]
        for w in itertools.product(Q, repeat=k):
            image = tuple(rho[c] for c in w)
            for p in N.states:
                for q, v in zip(fibre[p], random_split(rng, sr, nu[image, p], len(fibre[p]))):
                    trans[sym, w, q] = v
    final = {q: N.final[rho[q]] for q in Q}
    M = Wta.build(sr, N.alphabet, Q, trans, final)
    return SimulationInstance(M, N, Matrix.from_map(M.states, N.states, rho, sr), rho, "forward")


def backward_split(rng: random.Random, A: Wta, n_states: Optional[int] = None,
                   prefix: str = "b") -> SimulationInstance:
    """A larger automaton B with a backward simulation ``rho: Q_B -> Q_A`` onto A.

    Returns the instance ``A ->(X_rho^T) B``.
    """
    sr = A.semiring
    n_p = A.n_states
    n_q = n_p + rng.randint(0, 2) if n_states is None else n_states
    img = random_surjection(rng, n_q, n_p) if n_p else []
    Q = [f"{prefix}{i}" for i in range(n_q)]
    rho = {Q[i]: A.states[img[i]] for i in range(n_q)}
    fibre = {p: [q for q in Q if rho[q] == p] for p in A.states}
    trans = {}
    for sym, k in A.alphabet.items():
        mu = A.mu[sym]
        for pw in itertools.product(A.states, repeat=k):
            preimages = list(itertools.product(*(fibre[p] for p in pw)))
            for q in Q:
                parts = random_split(rng, sr, mu[pw, rho[q]], len(preimages))
                for w, v in zip(preimages, parts):
                    trans[sym, w, q] = v
    final = {}
    for p in A.states:
        for q, v in zip(fibre[p], random_split(rng, sr, A.final[p], len(fibre[p]))):
            final[q] = v
    B = Wta.build(sr, A.alphabet, Q, trans, final)
    X = Matrix.from_map(B.states, A.states, rho, sr).T
    return SimulationInstance(A, B, X, rho, "backward")


def random_units(rng: random.Random, sr: Semiring, n: int) -> list:
    c = sr.carrier
    if c is Carrier.INT:
        return [rng.choice((1, -1)) for _ in range(n)]
    if c is Carrier.RAT:
        return [random_value(rng, sr, 3, 3, nonzero=True) for _ in range(n)]
    return [sr.one] * n


def _rescale(N: Wta, E: Matrix, E_inv: Matrix, index: IndexSet) -> Wta:
    """The automaton with ``mu = E^k nu E^-1`` and ``F = E G`` on states ``index``."""
    sr = N.semiring
    Er = E.relabel(rows=index)
    Ei = E_inv.relabel(cols=index)
    mu = {sym: matmul(kron_power_apply(Er, k, N.mu[sym]), Ei) for sym, k in N.alphabet.items()}
    final = Vec(index, (Er.data @ N.final.data) if len(index) else [], sr)
    return Wta(N.alphabet, index, mu, final, sr)


def diagonal_source(rng: random.Random, N: Wta, prefix: str = "d") -> SimulationInstance:
    """``M ->E N`` with E an invertible diagonal matrix."""
    sr = N.semiring
    units = random_units(rng, sr, N.n_states)
    index = IndexSet(f"{prefix}{i}" for i in range(N.n_states))
    E = Matrix(N.states, N.states,
               [[u if i == j else 0 for j in range(len(units))] for i, u in enumerate(units)], sr)
    E_inv = Matrix(N.states, N.states,
                   [[sr.inv(u) if i == j else 0 for j in range(len(units))]
                    for i, u in enumerate(units)], sr)
    M = _rescale(N, E, E_inv, index)
    return SimulationInstance(M, N, E.relabel(rows=index), None, "diagonal")


def diagonal_target(rng: random.Random, M: Wta, prefix: str = "e") -> SimulationInstance:
    """``M ->E N`` with E invertible diagonal and N new."""
    sr = M.semiring
    units = random_units(rng, sr, M.n_states)
    index = IndexSet(f"{prefix}{i}" for i in range(M.n_states))
    n = len(units)
    inv = [sr.inv(u) for u in units]
    E = Matrix(M.states, M.states, [[units[i] if i == j else 0 for j in range(n)]
                                    for i in range(n)], sr)
    E_inv = Matrix(M.states, M.states, [[inv[i] if i == j else 0 for j in range(n)]
                                        for i in range(n)], sr)
    N = _rescale(M, E_inv, E, index)
    return SimulationInstance(M, N, E.relabel(cols=index), None, "diagonal")


def random_simulation(rng: random.Random, sr: Semiring, core_states: int = 2,
                      max_states: int = 4, steps: int = 3,
                      alphabet: RankedAlphabet = DEFAULT_ALPHABET,
                      density: float = 0.5) -> SimulationInstance:
    """Compose a few constructed steps around a random core automaton.

    The result ``M ->X N`` generally has a non-functional transfer matrix.
    """
    core = random_wta(rng, sr, RandomWtaConfig(core_states, alphabet, density), prefix="c")
    inst = SimulationInstance(core, core, Matrix.identity(core.states, sr), None, "identity")
    for step in range(steps):
        grow_source = rng.random() < 0.5
        if grow_source:
            room = max_states - inst.source.n_states
            if room > 0 and rng.random() < 0.6:
                new = forward_split(rng, inst.source, inst.source.n_states + rng.randint(0, room),
                                    prefix=f"f{step}_")
            else:
                new = diagonal_source(rng, inst.source, prefix=f"d{step}_")
            inst = SimulationInstance(new.source, inst.target, matmul(new.matrix, inst.matrix))
        else:
            room = max_states - inst.target.n_states
            if room > 0 and rng.random() < 0.6:
                new = backward_split(rng, inst.target, inst.target.n_states + rng.randint(0, room),
                                     prefix=f"b{step}_")
            else:
                new = diagonal_target(rng, inst.target, prefix=f"e{step}_")
            inst = SimulationInstance(inst.source, new.target, matmul(inst.matrix, new.matrix))
    return inst


def equivalent_pair(rng: random.Random, sr: Semiring, max_states: int = 4,
                    alphabet: RankedAlphabet = DEFAULT_ALPHABET) -> tuple[Wta, Wta]:
    """Two automata with the same series: either one simulates the other, or
    both are reached from a common core by independent steps."""
    if rng.random() < 0.5:
        inst = random_simulation(rng, sr, rng.randint(1, 2), max_states, 3, alphabet)
        return inst.source, inst.target
    core = random_wta(rng, sr, RandomWtaConfig(rng.randint(1, 2), alphabet), prefix="c")
    sides = []
    for tag in ("l", "r"):
        A = core
        for step in range(2):
            room = max_states - A.n_states
            if room > 0 and rng.random() < 0.6:
                A = backward_split(rng, A, A.n_states + rng.randint(0, room),
                                   prefix=f"{tag}{step}_").target
            else:
                A = diagonal_target(rng, A, prefix=f"{tag}{step}_").target
        sides.append(A)
    return sides[0], sides[1]


def perturb(rng: random.Random, M: Wta) -> Wta:
    """Change one transition or final weight."""
    sr = M.semiring
    trans = {(s, w, q): x for s, w, q, x in M.nonzero_transitions()}
    final = {q: M.final[q] for q in M.states}
    keys = [("t", s, w, q) for s, k in M.alphabet.items()
            for w in itertools.product(M.states, repeat=k) for q in M.states]
    keys += [("f", q) for q in M.states]
    key = rng.choice(keys)
    delta = random_value(rng, sr, 2, 2, nonzero=True)
    if sr.carrier is Carrier.NAT:
        delta = abs(delta)
    if key[0] == "t":
        t = key[1:]
        trans[t] = sr.add(trans.get(t, sr.zero), delta)
    else:
        final[key[1]] = sr.add(final[key[1]], delta)
    return Wta.build(sr, M.alphabet, list(M.states), trans, final)


def cancellation_pair(rng: random.Random, sr: Semiring, n_states: int = 2,
                      alphabet: RankedAlphabet = DEFAULT_ALPHABET) -> tuple[Wta, Wta]:
    """``M`` and ``M + K - K`` for random M, K over a ring."""
    M = random_wta(rng, sr, RandomWtaConfig(n_states, alphabet), prefix="m")
    K = random_wta(rng, sr, RandomWtaConfig(n_states, alphabet, density=0.7), prefix="k")
    pos = K.relabel({q: f"{q}p" for q in K.states})
    neg = K.relabel({q: f"{q}n" for q in K.states})
    neg = Wta(neg.alphabet, neg.states, neg.mu,
              Vec(neg.states, [sr.neg(x) for x in neg.final.data], sr), sr)
    parts = (M, pos, neg)
    trans = {}
    final = {}
    for A in parts:
        trans.update({(s, w, q): x for s, w, q, x in A.nonzero_transitions()})
        final.update({q: A.final[q] for q in A.states})
    states = [q for A in parts for q in A.states]
    return M, Wta.build(sr, alphabet, states, trans, final)
