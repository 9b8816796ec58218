"""Compare the pure-Python and compiled collectors on the named fixtures.

Usage: python3 bench/bench_collect.py [--ops N] [--repeat R]
"""
import argparse
import random
import timeit

from nilcsp import _kernel
from nilcsp.fixtures import named


def random_exps(pres, rng, bound=6):
    return tuple(rng.randrange(o) if o else rng.randint(-bound, bound) for o in pres.orders)


def workload(pres, n, seed):
    rng = random.Random(seed)
    return [(random_exps(pres, rng), random_exps(pres, rng), rng.randint(-4, 4)) for _ in range(n)]


def run_ops(col, ops):
    for a, b, m in ops:
        col.mul(a, b)
        col.comm(a, b)
        col.pow(a, m)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ops", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _kernel.available_backends()
    if "cython" not in backends:
        print("compiled collector not built; timing the Python backend only")
    print(f"{'fixture':8} " + " ".join(f"{k:>10}" for k in backends) + "   speedup")
    for name in ("HEIS", "HEIS3", "F32", "F23", "NG2"):
        pres = named(name)
        ops = workload(pres, args.ops, name)
        times = {}
        for key, cls in backends.items():
            col = pres.build_collector(cls)
            times[key] = min(timeit.repeat(lambda: run_ops(col, ops), number=1, repeat=args.repeat))
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else "       -"
        print(f"{name:8} " + " ".join(f"{t:9.3f}s" for t in times.values()) + f" {speed}")


if __name__ == "__main__":
    main()
