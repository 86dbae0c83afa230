"""Run the equivalence decision on generated pairs and print a summary table.

    python3 scripts/equiv_experiment.py --pairs 100 --max-states 4 --seed 1
"""

import argparse
import random
import statistics
import time

from wtasim.errors import BudgetError
from wtasim.generate import equivalent_pair, perturb
from wtasim.jointred import decide_equiv
from wtasim.semiring import get_semiring


def run(sr, pairs, max_states, seed, perturbed):
    rng = random.Random(f"{seed}-{sr.name}-{perturbed}")
    verdicts = {"equivalent": 0, "not-equivalent": 0, "budget": 0}
    witnesses, generators, times = 0, [], []
    for _ in range(pairs):
        M, N = equivalent_pair(rng, sr, max_states=max_states)
        if perturbed:
            N = perturb(rng, N)
        start = time.perf_counter()
        try:
            res = decide_equiv(M, N)
        except BudgetError:
            verdicts["budget"] += 1
            continue
        finally:
            times.append(time.perf_counter() - start)
        verdicts[res.verdict.value] += 1
        witnesses += res.witness is not None
        generators.append(res.generators)
    return verdicts, witnesses, generators, times


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--carriers", default="rat,int,nat")
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--max-states", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    header = f"{'carrier':8} {'pairs':9} {'equiv':>6} {'not':>6} {'budget':>6} " \
             f"{'witness':>7} {'mean |V|':>8} {'mean ms':>8} {'max ms':>8}"
    print(header)
    for name in args.carriers.split(","):
        sr = get_semiring(name)
        for perturbed in (False, True):
            verdicts, witnesses, gens, times = run(sr, args.pairs, args.max_states,
                                                   args.seed, perturbed)
            print(f"{name:8} {'perturbed' if perturbed else 'built':9} "
                  f"{verdicts['equivalent']:>6} {verdicts['not-equivalent']:>6} "
                  f"{verdicts['budget']:>6} {witnesses:>7} "
                  f"{statistics.mean(gens) if gens else 0:>8.2f} "
                  f"{1000 * statistics.mean(times):>8.1f} {1000 * max(times):>8.1f}")


if __name__ == "__main__":
    main()
