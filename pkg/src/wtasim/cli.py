"""Command-line interface.

Exit codes: 0 when the command succeeds or the checked property holds,
1 when the property fails (not equivalent, simulation invalid, nothing
found), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .constructions import hadamard_wta, sigma_product_wta, sigma_star_wta, sum_wta
from .errors import WtaError
from .jointred import closure, decide_equiv, final_weights_agree
from .semiring import NAT, Carrier
from .simulation import check_simulation, decompose_simulation, find_backward, find_forward
from .textio import label_names, parse_matrix, parse_tree, print_matrix, print_wta, parse_wta
from .wta import enumerate_trees, eval_vector, evaluate, support, trim

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class _Fail(Exception):
    """Raised by a command to report exit code 1 after printing its report."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise WtaError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    try:
        return parse_wta(_read(path))
    except WtaError as exc:
        raise WtaError(f"{path}: {exc}") from None


def _load_matrix(path: str, M, N):
    try:
        return parse_matrix(_read(path), M.states, N.states, M.semiring)
    except WtaError as exc:
        raise WtaError(f"{path}: {exc}") from None


def _emit(args, payload: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _fmt_map(rho: dict, M, N) -> str:
    qn = dict(zip(M.states, label_names(M.states)))
    pn = dict(zip(N.states, label_names(N.states)))
    return "\n".join(f"{qn[q]} -> {pn[p]}" for q, p in rho.items())


# -- commands ------------------------------------------------------------------

def cmd_eval(args):
    M = _load(args.a)
    t = parse_tree(args.tree, M.alphabet)
    fmt = M.semiring.format_value
    value = fmt(evaluate(M, t))
    if args.vector:
        vec = eval_vector(M, t)
        names = label_names(M.states)
        text = "\n".join(f"{n} : {fmt(v)}" for n, v in zip(names, vec.data))
        _emit(args, {"tree": str(t), "value": value,
                     "vector": dict(zip(names, map(fmt, vec.data)))}, text)
    else:
        _emit(args, {"tree": str(t), "value": value}, value)


def cmd_enumerate(args):
    M = _load(args.a)
    fmt = M.semiring.format_value
    rows = [(str(t), fmt(evaluate(M, t))) for t in enumerate_trees(M.alphabet, args.max_size)]
    _emit(args, {"series": [{"tree": t, "value": v} for t, v in rows]},
          "\n".join(f"{t} : {v}" for t, v in rows))


def cmd_support(args):
    print(print_wta(support(_load(args.a))), end="")


def cmd_trim(args):
    M = _load(args.a)
    T, removed = trim(M)
    names = dict(zip(M.states, label_names(M.states)))
    gone = " ".join(names[q] for q in removed) if removed else "(none)"
    print(f"# removed states: {gone}")
    print(print_wta(T), end="")


def cmd_check_sim(args):
    M, N = _load(args.a), _load(args.b)
    X = _load_matrix(args.x, M, N)
    res = check_simulation(M, N, X)
    payload = {"holds": res.holds, "violation": str(res.violation) if res.violation else None}
    _emit(args, payload, "simulation holds" if res else f"simulation fails: {res.violation}")
    if not res:
        raise _Fail


def _find(args, finder, kind):
    M, N = _load(args.a), _load(args.b)
    rho = finder(M, N)
    if rho is None:
        _emit(args, {"found": False, "map": None}, f"no {kind} simulation found")
        raise _Fail
    pn = dict(zip(N.states, label_names(N.states)))
    qn = dict(zip(M.states, label_names(M.states)))
    _emit(args, {"found": True, "map": {qn[q]: pn[p] for q, p in rho.items()}},
          _fmt_map(rho, M, N))


def cmd_find_fsim(args):
    _find(args, find_forward, "forward")


def cmd_find_bsim(args):
    _find(args, find_backward, "backward")


def cmd_decompose_sim(args):
    M, N = _load(args.a), _load(args.b)
    X = _load_matrix(args.x, M, N)
    M1, N1, C, E, D = decompose_simulation(M, N, X)
    parts = {"M1.wta": print_wta(M1), "N1.wta": print_wta(N1), "C.mat": print_matrix(C),
             "E.mat": print_matrix(E), "D.mat": print_matrix(D)}
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in parts.items():
            (out / name).write_text(text, encoding="utf-8")
        print(f"intermediate states: {len(C.cols)}")
        print("wrote " + " ".join(parts))
    else:
        for name, text in parts.items():
            print(f"# {name}")
            print(text, end="")


def cmd_sum(args):
    print(print_wta(sum_wta(_load(args.a), _load(args.b))), end="")


def cmd_hadamard(args):
    print(print_wta(hadamard_wta(_load(args.a), _load(args.b))), end="")


def cmd_s0_product(args):
    print(print_wta(sigma_product_wta(_load(args.a), _load(args.b), args.symbol)), end="")


def cmd_s0_star(args):
    print(print_wta(sigma_star_wta(_load(args.a), args.symbol)), end="")


def _pair(args):
    M, N = _load(args.a), _load(args.b)
    if args.via_nat:
        M, N = (A.map_weights(int, NAT) if A.semiring.carrier is Carrier.BOOL else A
                for A in (M, N))
    return M, N


def _via_nat_caveat(args, M, N, res):
    """Over nat, inequivalence does not carry back to the Boolean originals."""
    if not (args.via_nat and not res.equivalent):
        return None
    A, B = _load(args.a), _load(args.b)
    if A.semiring.carrier is not Carrier.BOOL:
        return None
    if res.witness is not None and evaluate(A, res.witness) != evaluate(B, res.witness):
        return None
    return "inconclusive for the Boolean automata: the nat embeddings differ"


def cmd_equiv(args):
    M, N = _pair(args)
    res = decide_equiv(M, N, max_rounds=args.max_rounds)
    payload = {
        "verdict": res.verdict.value,
        "witness": str(res.witness) if res.witness is not None else None,
        "stats": res.stats(),
    }
    caveat = _via_nat_caveat(args, M, N, res)
    if caveat:
        res.note = f"{res.note}; {caveat}" if res.note else caveat
    if res.note:
        payload["note"] = res.note
    if res.equivalent:
        s = res.stats()
        text = (f"equivalent\ngenerators: {s['generators']}\niterations: {s['iterations']}\n"
                f"joiner states: {s['joiner_states']}")
        if args.emit_joiner:
            Path(args.emit_joiner).write_text(print_wta(res.joiner.wta), encoding="utf-8")
    else:
        lines = ["not equivalent"]
        if res.witness is not None:
            fmt = M.semiring.format_value
            payload["values"] = [fmt(evaluate(M, res.witness)), fmt(evaluate(N, res.witness))]
            lines += [f"witness: {res.witness}", f"weight in a: {payload['values'][0]}",
                      f"weight in b: {payload['values'][1]}"]
        if res.note:
            lines.append(f"note: {res.note}")
        text = "\n".join(lines)
    _emit(args, payload, text)
    if not res.equivalent:
        raise _Fail


def cmd_joint_reduce(args):
    M, N = _pair(args)
    MN = sum_wta(M, N)
    V = closure(MN, max_rounds=args.max_rounds)
    fmt = MN.semiring.format_value
    bad = final_weights_agree(V, M, N)
    vectors = [[fmt(x) for x in v] for v in V.vectors]
    payload = {"states": label_names(MN.states), "generators": vectors,
               "iterations": V.iterations, "final_weights_agree": bad is None}
    text = "\n".join(
        [f"states: {' '.join(label_names(MN.states))}"]
        + [f"v{i} : {' '.join(v)}" for i, v in enumerate(vectors)]
        + [f"iterations: {V.iterations}",
           f"final weights agree: {'yes' if bad is None else 'no'}"])
    _emit(args, payload, text)


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wtasim",
                                description="Weighted tree automata: evaluation, simulations, "
                                            "constructions and equivalence.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, a=True, b=False, x=False, json_=False):
        sp = sub.add_parser(name, help=help_)
        if a:
            sp.add_argument("-a", required=True, metavar="M.wta", help="first automaton")
        if b:
            sp.add_argument("-b", required=True, metavar="N.wta", help="second automaton")
        if x:
            sp.add_argument("-x", required=True, metavar="X.mat", help="transfer matrix")
        if json_:
            sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=fn)
        return sp

    sp = add("eval", cmd_eval, "weight of a tree", json_=True)
    sp.add_argument("-t", "--tree", required=True)
    sp.add_argument("--vector", action="store_true", help="also print the state vector")
    sp = add("enumerate", cmd_enumerate, "weights of all trees up to a size", json_=True)
    sp.add_argument("--max-size", type=int, default=5)
    add("support", cmd_support, "Boolean support automaton")
    add("trim", cmd_trim, "remove useless states")
    add("check-sim", cmd_check_sim, "check a transfer matrix", b=True, x=True, json_=True)
    add("find-fsim", cmd_find_fsim, "search a forward simulation", b=True, json_=True)
    add("find-bsim", cmd_find_bsim, "search a backward simulation", b=True, json_=True)
    sp = add("decompose-sim", cmd_decompose_sim, "factor a simulation into three steps",
             b=True, x=True)
    sp.add_argument("--out-dir", help="write M1.wta, N1.wta, C.mat, E.mat, D.mat here")
    add("sum", cmd_sum, "sum automaton", b=True)
    add("hadamard", cmd_hadamard, "pointwise product automaton", b=True)
    sp = add("s0-product", cmd_s0_product, "substitution product at a nullary symbol", b=True)
    sp.add_argument("--symbol", required=True)
    sp = add("s0-star", cmd_s0_star, "iteration at a nullary symbol")
    sp.add_argument("--symbol", required=True)
    for name, fn, help_ in (("equiv", cmd_equiv, "decide equivalence"),
                            ("joint-reduce", cmd_joint_reduce, "print the joint generator set")):
        sp = add(name, fn, help_, b=True, json_=True)
        sp.add_argument("--via-nat", action="store_true",
                        help="embed Boolean automata into nat (a sufficient test only)")
        sp.add_argument("--max-rounds", type=int, default=10_000)
        if name == "equiv":
            sp.add_argument("--emit-joiner", metavar="OUT.wta",
                            help="write the joining automaton when equivalent")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except _Fail:
        return EXIT_FAIL
    except WtaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
