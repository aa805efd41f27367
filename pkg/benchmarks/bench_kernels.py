"""Compare the compiled and pure-numpy tagger kernels.

Runs forward and backward passes for both heads over a batch of random
sentences and reports per-call timings plus the maximum absolute
difference between the two implementations.

Usage: python benchmarks/bench_kernels.py [--tokens N] [--dim D] [--repeat R]
"""

import argparse
import time

import numpy as np

from panner.tagger.kernels import _pykernels

try:
    from panner.tagger.kernels import _ckernels
except ImportError:
    _ckernels = None


def random_inputs(rng, n_tokens, dim, radius, vocab, labels):
    k = 2 * radius + 1
    emb = rng.uniform(-0.1, 0.1, (vocab, dim))
    w_in = rng.uniform(-0.1, 0.1, (k * dim, dim))
    b_in = rng.uniform(-0.1, 0.1, dim)
    w_out = rng.uniform(-0.1, 0.1, (dim, labels))
    b_out = rng.uniform(-0.1, 0.1, labels)
    windows = rng.integers(0, vocab, (n_tokens, k)).astype(np.int32)
    return emb, w_in, b_in, w_out, b_out, windows


def time_call(fn, args, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--tokens", type=int, default=4096)
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--radius", type=int, default=2)
    parser.add_argument("--vocab", type=int, default=5000)
    parser.add_argument("--labels", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    emb, w_in, b_in, w_out, b_out, windows = random_inputs(
        rng, args.tokens, args.dim, args.radius, args.vocab, args.labels)

    print(f"tokens={args.tokens} dim={args.dim} radius={args.radius} "
          f"vocab={args.vocab} labels={args.labels}")
    if _ckernels is None:
        print("compiled kernels not available; showing python only")

    for sigmoid in (False, True):
        head = "sigmoid" if sigmoid else "softmax"
        fwd_args = (emb, w_in, b_in, w_out, b_out, windows, sigmoid)
        t_py, (probs_py, hidden_py) = time_call(_pykernels.forward, fwd_args,
                                                args.repeat)
        delta = probs_py - 1.0 / args.labels
        bwd_args = (emb, w_in, w_out, windows, hidden_py, delta)
        t_py_b, grads_py = time_call(_pykernels.backward, bwd_args, args.repeat)
        print(f"[{head}] python  forward {t_py * 1e3:8.2f} ms   "
              f"backward {t_py_b * 1e3:8.2f} ms")
        if _ckernels is None:
            continue
        t_c, (probs_c, hidden_c) = time_call(_ckernels.forward, fwd_args,
                                             args.repeat)
        t_c_b, grads_c = time_call(_ckernels.backward, bwd_args, args.repeat)
        print(f"[{head}] cython  forward {t_c * 1e3:8.2f} ms   "
              f"backward {t_c_b * 1e3:8.2f} ms   "
              f"speedup {t_py / t_c:4.1f}x / {t_py_b / t_c_b:4.1f}x")
        diff = max(np.abs(probs_c - probs_py).max(),
                   np.abs(hidden_c - hidden_py).max(),
                   max(np.abs(gc - gp).max()
                       for gc, gp in zip(grads_c, grads_py)))
        print(f"[{head}] max abs difference {diff:.3e}")


if __name__ == "__main__":
    main()
