# Compiled mirror of _pykernels.py. Same signatures, same semantics. The
# dense products stay on numpy (BLAS); the typed loops replace the gather
# (fancy indexing) and the embedding scatter (np.add.at), which dominate
# the pure-python runtime on sentence-sized batches.

import numpy as np


def _gather(double[:, :] emb, int[:, :] windows):
    cdef Py_ssize_t n = windows.shape[0]
    cdef Py_ssize_t k = windows.shape[1]
    cdef Py_ssize_t d = emb.shape[1]
    out = np.empty((n, k * d))
    cdef double[:, :] x = out
    cdef Py_ssize_t i, c, t, row
    for i in range(n):
        for c in range(k):
            row = windows[i, c]
            for t in range(d):
                x[i, c * d + t] = emb[row, t]
    return out


def forward(emb, w_in, b_in, w_out, b_out, windows, bint sigmoid_head):
    x = _gather(emb, windows)
    hidden = np.tanh(x @ w_in + b_in)
    logits = hidden @ w_out + b_out
    if sigmoid_head:
        probs = 1.0 / (1.0 + np.exp(-logits))
    else:
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        probs = e / e.sum(axis=1, keepdims=True)
    return probs, hidden


def backward(emb, w_in, w_out, windows, hidden, delta):
    x = _gather(emb, windows)

    g_w_out = hidden.T @ delta
    g_b_out = delta.sum(axis=0)
    dh = (delta @ w_out.T) * (1.0 - hidden * hidden)
    g_w_in = x.T @ dh
    g_b_in = dh.sum(axis=0)

    dx = dh @ w_in.T
    g_emb = np.zeros_like(emb)
    _scatter_add(g_emb, windows, dx)
    return g_emb, g_w_in, g_b_in, g_w_out, g_b_out


def _scatter_add(double[:, :] g_emb, int[:, :] windows, double[:, :] dx):
    cdef Py_ssize_t n = windows.shape[0]
    cdef Py_ssize_t k = windows.shape[1]
    cdef Py_ssize_t d = g_emb.shape[1]
    cdef Py_ssize_t i, c, t, row
    for i in range(n):
        for c in range(k):
            row = windows[i, c]
            for t in range(d):
                g_emb[row, t] += dx[i, c * d + t]
