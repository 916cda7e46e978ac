"""Time the compiled and pure-Python oracle kernels on identical workloads.

    python benchmarks/bench_kernels.py [--seed N] [--repeat K]

Both backends must return identical results; the script aborts otherwise.
"""
import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from generators import random_concept, random_kb, random_query  # noqa: E402
from shiqcq.oracle import kernels  # noqa: E402
from shiqcq.oracle.search import concept_equivalence, countermodel_search, initial_forest_comparison  # noqa: E402


def workloads(seed):
    rng = random.Random(seed)
    pairs = [(random_concept(rng, 3, roles=("R",)), random_concept(rng, 3, roles=("R",))) for _ in range(20)]
    kbs = []
    for _ in range(10):
        kb = random_kb(rng, transitive=True)
        kbs.append((kb, random_query(rng, kb)))
    return {
        "concept-equivalence d=3": lambda run: [concept_equivalence(a, b, 3, run).bad for a, b in pairs],
        "initial-forest d=2": lambda run: [initial_forest_comparison(kb, 2, run) for kb, _ in kbs],
        "countermodel d<=3": lambda run: [countermodel_search(kb, q, 3, backend=run) for kb, q in kbs],
    }


def timed(fn, run, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(run)
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if kernels.compiled_run is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':26} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, fn in workloads(args.seed).items():
        tp, rp = timed(fn, kernels.python_run, args.repeat)
        tc, rc = timed(fn, kernels.compiled_run, args.repeat)
        if rp != rc:
            print(f"{name}: backends disagree")
            return 2
        print(f"{name:26} {tp:10.3f} {tc:11.3f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
