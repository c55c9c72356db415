"""Pure numpy/python fallback for the hot kernels.

Kept semantically in lockstep with the jit backend: the Gibbs sampler uses
the same xorshift64* stream and the same per-token accumulation order, so
its output is bit-identical to the compiled path. Useful where numba is
unavailable and as the ground truth the benchmark checks against.
"""
import numpy as np

_MASK = (1 << 64) - 1
_M53 = 1.0 / (1 << 53)


def _next_u(state) -> float:
    x = int(state[0])
    x ^= x >> 12
    x = (x ^ (x << 25)) & _MASK
    x ^= x >> 27
    state[0] = x
    scrambled = (x * 2685821657736338717) & _MASK
    return float(scrambled >> 11) * _M53


def gibbs_init(words, docs, z, n_kw, n_k, n_dk, state):
    K = n_kw.shape[0]
    for i in range(words.shape[0]):
        k = min(int(_next_u(state) * K), K - 1)
        z[i] = k
        n_kw[k, words[i]] += 1
        n_k[k] += 1
        n_dk[docs[i], k] += 1


def gibbs_sweep(words, docs, z, n_kw, n_k, n_dk, alpha, beta, state, cum):
    K = n_kw.shape[0]
    v_beta = n_kw.shape[1] * beta
    for i in range(words.shape[0]):
        w = int(words[i])
        d = int(docs[i])
        k = int(z[i])
        n_kw[k, w] -= 1
        n_k[k] -= 1
        n_dk[d, k] -= 1

        # np.cumsum accumulates sequentially, matching the jit loop exactly
        terms = (n_kw[:, w] + beta) * (n_dk[d, :] + alpha) / (n_k + v_beta)
        np.cumsum(terms, out=cum)
        r = _next_u(state) * cum[K - 1]
        new_k = min(int(np.searchsorted(cum, r, side="left")), K - 1)

        z[i] = new_k
        n_kw[new_k, w] += 1
        n_k[new_k] += 1
        n_dk[d, new_k] += 1


def tsne_affinities(dist2, perplexity, tol, max_iter):
    n = dist2.shape[0]
    P = np.zeros((n, n))
    entropy_bits = np.zeros(n)
    target = np.log(perplexity)
    mask = ~np.eye(n, dtype=bool)
    for i in range(n):
        di = dist2[i][mask[i]]
        dmin = di.min()
        shifted = di - dmin
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        h = 0.0
        p = np.zeros_like(shifted)
        for _ in range(max_iter):
            p = np.exp(-shifted * beta)
            sum_p = p.sum()
            h = np.log(sum_p) + beta * float((shifted * p).sum()) / sum_p
            diff = h - target
            if -tol < diff < tol:
                break
            if diff > 0.0:
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
        P[i][mask[i]] = p / p.sum()
        entropy_bits[i] = h / np.log(2.0)
    return P, entropy_bits


def tsne_step(P, Y, vel, lr, momentum, exaggeration):
    # divergence shows up as nan/inf coordinates that the caller detects,
    # matching the jit backend's numpy error model
    with np.errstate(all="ignore"):
        diff = Y[:, None, :] - Y[None, :, :]
        W = 1.0 / (1.0 + (diff ** 2).sum(axis=2))
        np.fill_diagonal(W, 0.0)
        z = W.sum()
        coeff = 4.0 * (exaggeration * P - W / z) * W
        grad = (coeff[:, :, None] * diff).sum(axis=1)
        vel *= momentum
        vel -= lr * grad
        Y += vel
        Y -= Y.mean(axis=0)
