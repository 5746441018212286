"""Time the compiled kernels against the pure-Python fallback.

Each backend runs in its own interpreter so the import-time selection is
honoured (``STABDIV_PURE_PYTHON=1`` forces the fallback).

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, random, time
from stabdiv import kernels
from stabdiv.division import divide
from stabdiv.groebner import buchberger
from stabdiv.polyring import Polynomial, WeightedOrder, parse
from stabdiv.stability import certify
from stabdiv.norms import SpaceParams

def div_load():
    r = random.Random(0)
    o = WeightedOrder((1, 1, 1))
    gens = [parse("z1^2+z2*z3", 3), parse("z2^3-z1*z3", 3), parse("z3^2+2*z1", 3)]
    for _ in range(300):
        terms = "+".join(f"{r.randint(1, 9)}*z1^{r.randint(0, 6)}*z2^{r.randint(0, 6)}*z3^{r.randint(0, 6)}"
                         for _ in range(8))
        divide(parse(terms, 3), gens, o, trace=False)

def gb_load():
    r = random.Random(1)
    o = WeightedOrder((1, 1))
    for _ in range(40):
        gens = [Polynomial(2, {(r.randint(0, 5), r.randint(0, 5)): r.randint(-5, 5) or 1 for _ in range(3)})
                for _ in range(3)]
        buchberger(gens, o)

def cert_load():
    o = WeightedOrder((1, 1))
    certify([parse("x^2"), parse("x*y"), parse("y^2")], o, SpaceParams(2, -2), 30, samples=10)

out = {"backend": kernels.BACKEND}
for name, fn in (("divide", div_load), ("groebner", gb_load), ("certify", cert_load)):
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("STABDIV_PURE_PYTHON", None)
    if pure:
        env["STABDIV_PURE_PYTHON"] = "1"
    code = WORKLOAD.replace("REPEAT", str(repeat))
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    if proc.returncode:
        sys.exit(proc.stderr)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if fast["backend"] != "cython":
        print("compiled kernels are not built; both rows use the fallback", file=sys.stderr)
    print(f"{'workload':<10}{fast['backend'] + ' [s]':>14}{slow['backend'] + ' [s]':>14}{'speedup':>10}")
    for key in ("divide", "groebner", "certify"):
        print(f"{key:<10}{fast[key]:>14.3f}{slow[key]:>14.3f}{slow[key] / fast[key]:>9.2f}x")


if __name__ == "__main__":
    main()
