"""Time the compiled kernels against the pure-Python fallback.

Usage: ``python benchmarks/bench_kernels.py [--nodes 144] [--graphs 5] [--repeat 3]``

Graphs are random networks with the same size and edge count as the
paragraph networks the pipeline builds. Each backend runs the kernels used
by ``measure_network`` and then the full 33-feature measurement, and the
script checks that both backends produce the same numbers.
"""
import argparse
import itertools
import random
import time

import numpy as np

from paranet import kernels
from paranet.netbuild import Network, target_edge_count
from paranet.netmeasure import (
    betweenness, detect_communities, distances, measure_network, symmetry,
)


def random_network(rng: random.Random, n: int, density: float) -> Network:
    pairs = list(itertools.combinations(range(n), 2))
    return Network.from_edges(n, rng.sample(pairs, target_edge_count(n, density)))


TASKS = {
    "bfs_distances": distances,
    "betweenness": betweenness,
    "symmetry (h=2..4, both)": lambda net: [symmetry(net, h, v) for h in (2, 3, 4)
                                            for v in ("backbone", "merged")],
    "communities (10 restarts)": detect_communities,
    "measure_network": lambda net: measure_network(net, "bench", "RT").values,
}


def best_time(fn, nets, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = [fn(net) for net in nets]
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=144)
    p.add_argument("--density", type=float, default=0.05)
    p.add_argument("--graphs", type=int, default=5)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = random.Random(args.seed)
    nets = [random_network(rng, args.nodes, args.density) for _ in range(args.graphs)]
    backends = sorted(kernels.available_backends())
    if "compiled" not in backends:
        print("compiled extension not built; only the Python backend can be timed")
    print(f"{args.graphs} graphs, n={args.nodes}, E={args.density}, best of {args.repeat}\n")
    print(f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    previous = kernels.BACKEND
    try:
        for name, fn in TASKS.items():
            times, results = {}, {}
            for b in backends:
                kernels.use(b)
                times[b], results[b] = best_time(fn, nets, args.repeat)
            line = f"{name:28s}" + "".join(f"{times[b] * 1e3:10.1f}ms" for b in backends)
            if len(backends) == 2:
                same = all(np.allclose(np.asarray(x, float), np.asarray(y, float), atol=1e-12)
                           for x, y in zip(results["compiled"], results["python"]))
                line += f"{times['python'] / times['compiled']:9.1f}x" + ("" if same else "  MISMATCH")
            print(line)
    finally:
        kernels.use(previous)


if __name__ == "__main__":
    main()
