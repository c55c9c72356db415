#!/usr/bin/env python3
"""Times the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--sweeps N] [--tsne-iters N]

The Gibbs sampler must agree bit-for-bit across backends (same explicit
PRNG, same accumulation order); t-SNE agrees to numerical tolerance. The
default jit backend is selected by the BOTLAB_NUMBA env flag in normal use;
here both are imported explicitly so one process can time the pair.
"""
import argparse
import time

import numpy as np

from botlab import kernels


def time_call(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_gibbs(sweeps: int):
    rng = np.random.default_rng(0)
    n_tokens, V, D, K = 20_000, 800, 120, 20
    words = rng.integers(0, V, n_tokens).astype(np.int32)
    docs = rng.integers(0, D, n_tokens).astype(np.int32)

    results = {}
    for name in ("jit", "reference"):
        backend = kernels.get_backend(name)
        z = np.zeros(n_tokens, np.int32)
        n_kw = np.zeros((K, V), np.int32)
        n_k = np.zeros(K, np.int32)
        n_dk = np.zeros((D, K), np.int32)
        cum = np.zeros(K)
        state = kernels.seed_state(7)
        backend.gibbs_init(words, docs, z, n_kw, n_k, n_dk, state)

        def run(backend=backend, z=z, n_kw=n_kw, n_k=n_k, n_dk=n_dk, state=state, cum=cum):
            for _ in range(sweeps):
                backend.gibbs_sweep(words, docs, z, n_kw, n_k, n_dk, 2.5, 0.01, state, cum)
            return z.copy(), int(state[0])

        elapsed, out = time_call(run, repeat=1)
        results[name] = (elapsed, out)
        print(f"gibbs  {name:9s} {sweeps:4d} sweeps of {n_tokens} tokens, K={K}: {elapsed:8.3f}s")

    same = np.array_equal(results["jit"][1][0], results["reference"][1][0]) \
        and results["jit"][1][1] == results["reference"][1][1]
    print(f"gibbs  parity: {'bitwise identical' if same else 'MISMATCH'}; "
          f"speedup x{results['reference'][0] / results['jit'][0]:.1f}")
    if not same:
        raise SystemExit("gibbs backends disagree")


def bench_tsne(iters: int):
    rng = np.random.default_rng(1)
    n = 250
    x = rng.normal(size=(n, 12))
    d2 = ((x[:, None] - x[None]) ** 2).sum(-1)

    affinities = {}
    for name in ("jit", "reference"):
        backend = kernels.get_backend(name)
        elapsed, out = time_call(lambda b=backend: b.tsne_affinities(d2, 30.0, 1e-10, 200))
        affinities[name] = out[0]
        print(f"tsne   {name:9s} affinities for n={n}: {elapsed:8.3f}s")
    drift = np.abs(affinities["jit"] - affinities["reference"]).max()
    print(f"tsne   affinity agreement: max |diff| = {drift:.2e}")
    if drift > 1e-6:
        raise SystemExit("tsne affinity backends disagree")

    p = (affinities["jit"] + affinities["jit"].T) / (2 * n)
    for name in ("jit", "reference"):
        backend = kernels.get_backend(name)
        y = rng.normal(size=(n, 2)) * 1e-4
        vel = np.zeros_like(y)

        def run(backend=backend, y=y, vel=vel):
            for i in range(iters):
                backend.tsne_step(p, y, vel, 200.0, 0.5 if i < 250 else 0.8,
                                  12.0 if i < 62 else 1.0)
            return y

        elapsed, _ = time_call(run, repeat=1)
        print(f"tsne   {name:9s} {iters:4d} gradient steps: {elapsed:8.3f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sweeps", type=int, default=40)
    parser.add_argument("--tsne-iters", type=int, default=300)
    args = parser.parse_args()
    print(f"default backend (env-selected): {kernels.BACKEND}")
    bench_gibbs(args.sweeps)
    bench_tsne(args.tsne_iters)


if __name__ == "__main__":
    main()
