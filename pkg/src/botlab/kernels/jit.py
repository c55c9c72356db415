"""numba-compiled hot loops: collapsed Gibbs sweeps and exact t-SNE.

Loops are written out element by element (no reductions that could
reassociate), so results match the reference backend: bit-for-bit for the
Gibbs sampler, to rounding of libm calls for t-SNE.
"""
import numpy as np
from numba import njit

_M53 = 1.0 / (1 << 53)


@njit(nogil=True, cache=True, error_model="numpy", inline="always")
def _next_u(state):
    # xorshift64*; state is a 1-element uint64 array mutated in place
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= (x << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x ^= x >> np.uint64(27)
    state[0] = x
    scrambled = (x * np.uint64(2685821657736338717)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return float(scrambled >> np.uint64(11)) * _M53


@njit(nogil=True, cache=True, error_model="numpy")
def gibbs_init(words, docs, z, n_kw, n_k, n_dk, state):
    K = n_kw.shape[0]
    for i in range(words.shape[0]):
        k = int(_next_u(state) * K)
        if k >= K:
            k = K - 1
        z[i] = k
        n_kw[k, words[i]] += 1
        n_k[k] += 1
        n_dk[docs[i], k] += 1


@njit(nogil=True, cache=True, error_model="numpy")
def gibbs_sweep(words, docs, z, n_kw, n_k, n_dk, alpha, beta, state, cum):
    K = n_kw.shape[0]
    V = n_kw.shape[1]
    v_beta = V * beta
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        n_kw[k, w] -= 1
        n_k[k] -= 1
        n_dk[d, k] -= 1

        acc = 0.0
        for k2 in range(K):
            acc += (n_kw[k2, w] + beta) * (n_dk[d, k2] + alpha) / (n_k[k2] + v_beta)
            cum[k2] = acc
        r = _next_u(state) * acc
        new_k = 0
        while new_k < K - 1 and r > cum[new_k]:
            new_k += 1

        z[i] = new_k
        n_kw[new_k, w] += 1
        n_k[new_k] += 1
        n_dk[d, new_k] += 1


@njit(nogil=True, cache=True, error_model="numpy")
def tsne_affinities(dist2, perplexity, tol, max_iter):
    """Per-point conditional affinities via binary search on the bandwidth.

    Returns (P, entropy_bits): P[i, j] = p_{j|i} with zero diagonal and unit
    row sums; entropy_bits[i] satisfies 2**H_i ~= perplexity.
    """
    n = dist2.shape[0]
    P = np.zeros((n, n))
    entropy_bits = np.zeros(n)
    target = np.log(perplexity)
    ln2 = np.log(2.0)
    for i in range(n):
        beta = 1.0
        beta_min = 0.0
        beta_max = np.inf
        # shift by the nearest neighbor so exp never underflows to all-zeros
        dmin = np.inf
        for j in range(n):
            if j != i and dist2[i, j] < dmin:
                dmin = dist2[i, j]
        h = 0.0
        for _ in range(max_iter):
            sum_p = 0.0
            sum_dp = 0.0
            for j in range(n):
                if j == i:
                    continue
                p = np.exp(-(dist2[i, j] - dmin) * beta)
                P[i, j] = p
                sum_p += p
                sum_dp += (dist2[i, j] - dmin) * p
            h = np.log(sum_p) + beta * sum_dp / sum_p
            diff = h - target
            if diff < tol and diff > -tol:
                break
            if diff > 0.0:
                beta_min = beta
                if beta_max == np.inf:
                    beta *= 2.0
                else:
                    beta = (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
        norm = 0.0
        for j in range(n):
            if j != i:
                norm += P[i, j]
        for j in range(n):
            if j != i:
                P[i, j] /= norm
            else:
                P[i, j] = 0.0
        entropy_bits[i] = h / ln2
    return P, entropy_bits


@njit(nogil=True, cache=True, error_model="numpy")
def tsne_step(P, Y, vel, lr, momentum, exaggeration):
    """One exact-gradient update of the 2-D embedding, in place."""
    n = Y.shape[0]
    W = np.zeros((n, n))
    z = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dy0 = Y[i, 0] - Y[j, 0]
            dy1 = Y[i, 1] - Y[j, 1]
            w = 1.0 / (1.0 + dy0 * dy0 + dy1 * dy1)
            W[i, j] = w
            W[j, i] = w
            z += 2.0 * w
    for i in range(n):
        g0 = 0.0
        g1 = 0.0
        for j in range(n):
            if j == i:
                continue
            w = W[i, j]
            coeff = 4.0 * (exaggeration * P[i, j] - w / z) * w
            g0 += coeff * (Y[i, 0] - Y[j, 0])
            g1 += coeff * (Y[i, 1] - Y[j, 1])
        vel[i, 0] = momentum * vel[i, 0] - lr * g0
        vel[i, 1] = momentum * vel[i, 1] - lr * g1
    m0 = 0.0
    m1 = 0.0
    for i in range(n):
        Y[i, 0] += vel[i, 0]
        Y[i, 1] += vel[i, 1]
        m0 += Y[i, 0]
        m1 += Y[i, 1]
    m0 /= n
    m1 /= n
    for i in range(n):
        Y[i, 0] -= m0
        Y[i, 1] -= m1
