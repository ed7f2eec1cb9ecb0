"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time. The first numba call includes compilation (or a cache load), so
it is timed separately from the steady-state loop.

    python benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from cndp import CapacityVector, backend, best_of_two, equilibrate, solve_relaxation
from cndp.generators import random_instance

repeat = int(sys.argv[1])
insts = [random_instance(s, n_nodes=10, n_edges=30, n_commodities=4, degree=2, constant_share=0.1)
         for s in range(8)]
caps = [CapacityVector(np.random.default_rng(s).uniform(0.5, 2.0, i.m)) for s, i in enumerate(insts)]

def timed(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t

first = timed(lambda: equilibrate(insts[0], caps[0]))
res = {"backend": backend(), "first_call_s": first}
res["relaxation_s"] = min(timed(lambda: [solve_relaxation(i) for i in insts]) for _ in range(repeat))
res["equilibrium_s"] = min(timed(lambda: [equilibrate(i, z) for i, z in zip(insts, caps)])
                           for _ in range(repeat))
res["best_of_two_s"] = min(timed(lambda: [best_of_two(i) for i in insts]) for _ in range(repeat))
json.dump(res, sys.stdout)
"""


def measure(flag, repeat):
    env = dict(os.environ, CNDP_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = [measure("1", args.repeat), measure("0", args.repeat)]
    keys = ["first_call_s", "relaxation_s", "equilibrium_s", "best_of_two_s"]
    print(f"{'backend':<8}" + "".join(f"{k:>16}" for k in keys))
    for r in rows:
        print(f"{r['backend']:<8}" + "".join(f"{r[k]:>16.4f}" for k in keys))
    fast, slow = rows
    for k in keys[1:]:
        print(f"speedup {k}: {slow[k] / fast[k]:.1f}x")


if __name__ == "__main__":
    main()
