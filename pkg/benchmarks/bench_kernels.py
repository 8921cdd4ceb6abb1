"""Time the Monte Carlo kernel under numba and under the numpy fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

The numba column excludes the first (compiling) call.  Both backends must
produce the same estimates; the script checks that before timing.
"""

import argparse
import time

import numpy as np

from compnoma._kernels import capacity_samples
from compnoma.experiments import default_params, link_table_for
from compnoma.geometry import preset_b2, preset_b3
from compnoma.montecarlo import McConfig, estimate_all


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = default_params().with_(sigma2_eps=0.01)
    print(f"{'preset':<7}{'stage':<10}{'numpy [s]':>11}{'numba [s]':>11}{'speedup':>9}")
    for name, layout in (("b2", preset_b2()), ("b3", preset_b3())):
        lt = link_table_for(layout, params)
        capacity_samples(params, lt, 0, 0, 10, backend="numba")  # compile

        a = capacity_samples(params, lt, 1, 0, 20_000, backend="numpy")
        b = capacity_samples(params, lt, 1, 0, 20_000, backend="numba")
        assert np.allclose(a, b, rtol=1e-13, atol=1e-15)

        for stage, run in (
            ("kernel", lambda be: capacity_samples(params, lt, 1, 0, args.samples, backend=be)),
            ("estimate", lambda be: estimate_all(params, lt, McConfig(args.samples, seed=1, backend=be))),
        ):
            t_np = best_of(lambda: run("numpy"), args.repeat)
            t_nb = best_of(lambda: run("numba"), args.repeat)
            print(f"{name:<7}{stage:<10}{t_np:>11.3f}{t_nb:>11.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
