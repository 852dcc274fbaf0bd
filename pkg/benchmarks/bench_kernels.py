"""Time the pair-reduction kernels: compiled backend vs plain numpy.

Runs each hot kernel on synthetic inputs over a range of cell counts and
prints a table of best-of-N wall times. The compiled backend is warmed up
before timing so compilation never lands in a measurement. With --threads
above 1 the parallel reductions are timed as a third column.

    python benchmarks/bench_kernels.py --sizes 64,256,1024 --repeats 7
"""

import argparse
import time

import numpy as np

from gagliardo_flow._kernels import numba_backend, numpy_backend


def best_of(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_inputs(n_cells: int, s: float, p: float, rng):
    centers = ((np.arange(n_cells) + 0.5) / n_cells).reshape(-1, 1)
    mu = 1.0 / n_cells
    w = numpy_backend.weights_table(centers, mu, 1.0 + s * p)
    u = rng.uniform(-1.0, 1.0, (n_cells, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    phi = rng.uniform(-1.0, 1.0, (n_cells, 3))
    return w, u, phi


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512,1024",
                    help="comma-separated cell counts")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timings per case; best is reported")
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--threads", type=int, default=1,
                    help="also time parallel reductions on this many threads")
    args = ap.parse_args(argv)
    sizes = [int(v) for v in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    numba_backend.warmup()
    parallel = args.threads > 1
    if parallel:
        numba_backend.set_num_threads(args.threads)

    cases = [
        ("energy_sum",
         lambda b, w, u, phi: b.energy_sum(w, u, args.p)),
        ("pairing_sum",
         lambda b, w, u, phi: b.pairing_sum(w, u, phi, args.p)),
        ("gradient",
         lambda b, w, u, phi: b.gradient(w, u, args.p)),
        ("cross_pair_sum",
         lambda b, w, u, phi: b.cross_pair_sum(w, u, phi, args.p)),
    ]
    par_variants = {
        "energy_sum": numba_backend.energy_sum_par,
        "pairing_sum": numba_backend.pairing_sum_par,
        "gradient": numba_backend.gradient_par,
    }

    header = f"{'kernel':<16}{'cells':>7}{'numpy ms':>12}{'numba ms':>12}{'speedup':>9}"
    if parallel:
        header += f"{'par ms':>12}{'par x':>8}"
    print(header)
    print("-" * len(header))
    for n_cells in sizes:
        w, u, phi = make_inputs(n_cells, args.s, args.p, rng)
        for name, call in cases:
            t_np = best_of(call, (numpy_backend, w, u, phi), args.repeats)
            t_nb = best_of(call, (numba_backend, w, u, phi), args.repeats)
            line = (f"{name:<16}{n_cells:>7}{t_np * 1e3:>12.3f}"
                    f"{t_nb * 1e3:>12.3f}{t_np / t_nb:>9.1f}")
            if parallel and name in par_variants:
                fn = par_variants[name]
                par_args = ((w, u, phi, args.p) if name == "pairing_sum"
                            else (w, u, args.p))
                fn(*par_args)   # compile outside the timed region
                t_par = best_of(fn, par_args, args.repeats)
                line += f"{t_par * 1e3:>12.3f}{t_np / t_par:>8.1f}"
            print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
