"""Time the compiled and pure-Python search kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--models 20] [--size 16] [--seed 1]

Each workload runs ``find_actual_causes`` (max size 3) on seeded random
binary models whose every endogenous variable is an AND/OR/XOR of up to
three earlier variables, with the last variable as the target. Both
backends must return identical causes; the script exits 1 otherwise.
"""

import argparse
import itertools
import random
import sys
import time

from causelog._kernels import available_backends
from causelog.actual_cause import find_actual_causes
from causelog.scm import Atom, CausalModel, Equation, Variable, evaluate

OPS = {
    "and": lambda row: "1" if all(x == "1" for x in row) else "0",
    "or": lambda row: "1" if "1" in row else "0",
    "xor": lambda row: str(row.count("1") % 2),
}


def random_model(rng, n_exo, n_endo):
    variables = [Variable(f"U{i}", ("0", "1"), True) for i in range(n_exo)]
    variables += [Variable(f"V{i}", ("0", "1")) for i in range(n_endo)]
    eqs = {}
    for i in range(n_endo):
        earlier = [v.name for v in variables[: n_exo + i]]
        parents = tuple(rng.sample(earlier, min(len(earlier), rng.randint(1, 3))))
        fn = OPS[rng.choice(list(OPS))]
        eqs[f"V{i}"] = Equation(
            f"V{i}", parents, {r: fn(r) for r in itertools.product("01", repeat=len(parents))}
        )
    return CausalModel(variables, eqs)


def workloads(rng, count, size):
    out = []
    for _ in range(count):
        m = random_model(rng, 3, size)
        ctx = {u: rng.choice("01") for u in m.exogenous}
        target = m.endogenous[-1]
        out.append((m, ctx, Atom(target, evaluate(m, ctx)[target])))
    return out


def run(backend, cases):
    t0 = time.perf_counter()
    found = [[c.to_dict() for c in find_actual_causes(m, ctx, phi, 3, backend=backend)] for m, ctx, phi in cases]
    return time.perf_counter() - t0, found


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=20)
    ap.add_argument("--size", type=int, default=16, help="endogenous variables per model")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    cases = workloads(random.Random(args.seed), args.models, args.size)
    backends = available_backends()
    results = {b: run(b, cases) for b in backends}
    for b in backends:
        print(f"{b:>7}: {results[b][0]:8.3f}s  ({args.models} models, {args.size} endogenous variables)")
    if "c" in results:
        print(f"speedup: {results['python'][0] / results['c'][0]:.1f}x")
        if results["c"][1] != results["python"][1]:
            print("backends disagree", file=sys.stderr)
            return 1
    else:
        print("compiled kernel not built; only the Python fallback was timed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
