"""Pure-numpy forward/backward kernels for the window tagger.

Reference implementation; the Cython module in ``_ckernels.pyx`` computes
the same quantities, replacing the gather and the ``np.add.at`` embedding
scatter with typed loops. Shapes:

* ``windows``  (N, K) int32 -- vocab indices of the context window per token
* ``emb``      (V, D), ``w_in`` (K*D, H), ``b_in`` (H,)
* ``w_out``    (H, M), ``b_out`` (M,)

The backward pass takes ``delta`` = dLoss/d(pre-activation logits), which
already encodes the head type, the targets and the loss weights, so one
kernel serves all three training strategies.
"""

import numpy as np


def gather_windows(emb, windows):
    """(N, K*D) concatenated window embeddings."""
    n, k = windows.shape
    return emb[windows.reshape(-1)].reshape(n, k * emb.shape[1])


def forward(emb, w_in, b_in, w_out, b_out, windows, sigmoid_head):
    """Returns (probs (N, M), hidden (N, H))."""
    x = gather_windows(emb, windows)
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
    """Gradients for all parameter tensors given dLoss/dlogits.

    Returns (g_emb, g_w_in, g_b_in, g_w_out, g_b_out); g_emb is dense and
    the same shape as ``emb``.
    """
    n, k = windows.shape
    d = emb.shape[1]
    x = gather_windows(emb, windows)

    g_w_out = hidden.T @ delta
    g_b_out = delta.sum(axis=0)
    dh = (delta @ w_out.T) * (1.0 - hidden * hidden)
    g_w_in = x.T @ dh
    g_b_in = dh.sum(axis=0)

    dx = dh @ w_in.T  # (N, K*D)
    g_emb = np.zeros_like(emb)
    flat_idx = windows.reshape(-1)
    np.add.at(g_emb, flat_idx, dx.reshape(n * k, d))
    return g_emb, g_w_in, g_b_in, g_w_out, g_b_out
