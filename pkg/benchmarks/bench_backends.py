"""Compare the compiled kernels against the pure-numpy fallback.

Runs the Gram fill, the expansion matvec, and one end-to-end ratio
estimation on both backends and prints a timing table. The fallback is
selected the same way users select it: the DRSHIFT_DISABLE_NUMBA
environment variable, which must be set before the package is imported,
so the fallback pass runs in a subprocess.

Usage: python benchmarks/bench_backends.py [--n 3000] [--n-mc 20000]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_case(n: int, n_mc: int) -> dict:
    import numpy as np

    from drshift import _backend
    from drshift.dre import estimate_density_ratio
    from drshift.kernels import KernelSpec, gram
    from drshift.scenarios import get_scenario, sample_source, sample_target

    kern = KernelSpec("gaussian", 0.2)
    rng = np.random.default_rng(0)
    pts = rng.random((n, 1))

    # warm-up triggers compilation so timings measure steady state
    gram(kern, pts[:50], pts[:50])
    t0 = time.perf_counter()
    G = gram(kern, pts, pts)
    t_gram = time.perf_counter() - t0

    coeffs = rng.standard_normal(n)
    queries = rng.random((n_mc, 1))
    _backend.expansion_matvec(queries[:50], pts, coeffs, 0.2, kern._code)
    t0 = time.perf_counter()
    _backend.expansion_matvec(queries, pts, coeffs, 0.2, kern._code)
    t_matvec = time.perf_counter() - t0

    spec = get_scenario("log")
    half = max(n // 2, 10)
    src = sample_source(spec, half, 1)
    tgt = sample_target(spec, half, 2)
    t0 = time.perf_counter()
    est = estimate_density_ratio(src, tgt, 0.5, kern)
    est.theta(queries[:1000])
    t_e2e = time.perf_counter() - t0

    return {
        "backend": "numpy-fallback" if _backend._FORCE_NUMPY or not _backend.HAS_NUMBA
                   else "numba",
        "gram_s": t_gram,
        "matvec_s": t_matvec,
        "end_to_end_s": t_e2e,
        "checksum": float(G[0].sum()),
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=3000, help="points in the Gram fill")
    parser.add_argument("--n-mc", type=int, default=20_000, help="matvec query count")
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(run_case(args.n, args.n_mc)))
        return 0

    results = [run_case(args.n, args.n_mc)]

    env = dict(os.environ, DRSHIFT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--n", str(args.n),
         "--n-mc", str(args.n_mc), "--emit-json"],
        env=env, capture_output=True, text=True, check=True,
    )
    results.append(json.loads(out.stdout.strip().splitlines()[-1]))

    if abs(results[0]["checksum"] - results[1]["checksum"]) > 1e-9:
        print("WARNING: backends disagree on the Gram checksum", file=sys.stderr)

    print(f"n = {args.n}, queries = {args.n_mc}")
    header = f"{'backend':<16}{'gram':>10}{'matvec':>10}{'end-to-end':>12}"
    print(header)
    print("-" * len(header))
    for r in results:
        print(f"{r['backend']:<16}{r['gram_s']:>9.3f}s{r['matvec_s']:>9.3f}s"
              f"{r['end_to_end_s']:>11.3f}s")
    base, fb = results
    for key in ("gram_s", "matvec_s", "end_to_end_s"):
        ratio = fb[key] / base[key]
        print(f"{key[:-2]}: fallback / {base['backend']} = {ratio:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
