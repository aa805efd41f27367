"""The window-concatenation sequence tagger.

Per token: embed the tokens in a [-r, +r] window (UNK-padded at the
edges), concatenate, one affine+tanh hidden layer, then an output head
that is either a softmax over the BIO label set or one sigmoid per label.
The head/loss combination is the part under study; the encoder sits behind
the kernel interface so a bigger one can replace it.
"""

import json
import struct

import numpy as np

from ..corpus import ClassInventory, labels_to_spans, validate_bio
from ..rng import DetRng
from . import kernels
from .losses import (
    SIGMOID_WEIGHTED,
    SOFTMAX,
    SOFTMAX_WEIGHTED,
    STRATEGIES,
)

UNK = "<unk>"
UNK_INDEX = 0

SOFTMAX_HEAD = "softmax"
SIGMOID_HEAD = "sigmoid"

CHECKPOINT_MAGIC = b"PANNERCK"
CHECKPOINT_VERSION = 1

# parameter tensors in fixed (checkpoint and init) order
PARAM_NAMES = ("emb", "w_in", "b_in", "w_out", "b_out")


def strategy_head(strategy):
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return SIGMOID_HEAD if strategy == SIGMOID_WEIGHTED else SOFTMAX_HEAD


def build_vocabulary(sentences):
    """token -> index, UNK at 0, remaining tokens in sorted order."""
    seen = sorted({t.text for sent in sentences for t in sent.tokens})
    vocab = {UNK: UNK_INDEX}
    for tok in seen:
        if tok not in vocab:
            vocab[tok] = len(vocab)
    return vocab


class TaggerModel:

    def __init__(self, inventory, vocab, head_kind, dim=32, radius=2, params=None):
        if head_kind not in (SOFTMAX_HEAD, SIGMOID_HEAD):
            raise ValueError(f"unknown head kind {head_kind!r}")
        if vocab.get(UNK) != UNK_INDEX:
            raise ValueError("vocabulary index 0 must be the UNK entry")
        self.inventory = inventory
        self.vocab = vocab
        self.head_kind = head_kind
        self.dim = dim
        self.radius = radius
        self.params = params

    @classmethod
    def init(cls, inventory, vocab, head_kind, dim=32, radius=2, seed=0):
        """Parameters uniform(-0.1, 0.1) from the seeded generator, biases
        zero; tensors filled row-major in PARAM_NAMES order."""
        model = cls(inventory, vocab, head_kind, dim, radius)
        rng = DetRng(seed)
        v = len(vocab)
        k = 2 * radius + 1
        m = inventory.num_labels
        shapes = {
            "emb": (v, dim),
            "w_in": (k * dim, dim),
            "b_in": (dim,),
            "w_out": (dim, m),
            "b_out": (m,),
        }
        params = {}
        for name in PARAM_NAMES:
            shape = shapes[name]
            if name.startswith("b_"):
                params[name] = np.zeros(shape)
            else:
                flat = np.array([rng.uniform(-0.1, 0.1)
                                 for _ in range(int(np.prod(shape)))])
                params[name] = flat.reshape(shape)
        model.params = params
        return model

    @property
    def num_labels(self):
        return self.inventory.num_labels

    def token_index(self, text):
        return self.vocab.get(text, UNK_INDEX)

    def windows(self, texts):
        """(N, 2r+1) int32 window index matrix, UNK-padded at the edges."""
        idx = [self.token_index(t) for t in texts]
        n, r = len(idx), self.radius
        out = np.full((n, 2 * r + 1), UNK_INDEX, dtype=np.int32)
        for i in range(n):
            for off in range(-r, r + 1):
                j = i + off
                if 0 <= j < n:
                    out[i, off + r] = idx[j]
        return out

    def forward(self, texts):
        """(N, M) probabilities for a token sequence."""
        probs, _ = self.forward_with_cache(self.windows(texts))
        return probs

    def forward_with_cache(self, windows):
        p = self.params
        return kernels.forward(p["emb"], p["w_in"], p["b_in"], p["w_out"],
                               p["b_out"], windows,
                               self.head_kind == SIGMOID_HEAD)

    def backward(self, windows, hidden, delta):
        p = self.params
        grads = kernels.backward(p["emb"], p["w_in"], p["w_out"], windows,
                                 hidden, delta)
        return dict(zip(PARAM_NAMES, grads))

    def copy_params(self):
        return {k: v.copy() for k, v in self.params.items()}

    # --- checkpoint io -------------------------------------------------------

    def save(self, path):
        header = {
            "version": CHECKPOINT_VERSION,
            "head_kind": self.head_kind,
            "dim": self.dim,
            "radius": self.radius,
            "inventory": self.inventory.to_jsonable(),
            "vocab": sorted(self.vocab, key=self.vocab.get),
            "tensors": [[name, list(self.params[name].shape)]
                        for name in PARAM_NAMES],
        }
        blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(CHECKPOINT_MAGIC)
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            for name in PARAM_NAMES:
                fh.write(np.ascontiguousarray(self.params[name],
                                              dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            magic = fh.read(len(CHECKPOINT_MAGIC))
            if magic != CHECKPOINT_MAGIC:
                raise ValueError(f"{path}: not a tagger checkpoint")
            (hlen,) = struct.unpack("<I", fh.read(4))
            header = json.loads(fh.read(hlen).decode("utf-8"))
            if header["version"] != CHECKPOINT_VERSION:
                raise ValueError(
                    f"{path}: unsupported checkpoint version {header['version']}")
            params = {}
            for name, shape in header["tensors"]:
                count = int(np.prod(shape))
                raw = fh.read(count * 8)
                params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        vocab = {tok: i for i, tok in enumerate(header["vocab"])}
        return cls(ClassInventory.from_jsonable(header["inventory"]), vocab,
                   header["head_kind"], header["dim"], header["radius"], params)


# --- gradients ---------------------------------------------------------------

def one_hot_targets(sentence, num_labels):
    y = np.zeros((len(sentence), num_labels))
    for i, tok in enumerate(sentence.tokens):
        y[i, tok.gold_label] = 1.0
    return y


def loss_delta(probs, y, weights, strategy, scale):
    """dLoss/dlogits for any of the three strategies.

    Softmax cross-entropy and per-label sigmoid cross-entropy share the
    (probs - y) form; the weights differ (per-token vs per-label).
    """
    if strategy == SOFTMAX:
        return (probs - y) * scale
    if strategy == SOFTMAX_WEIGHTED:
        wt = weights.min(axis=1)
        return (probs - y) * wt[:, None] * scale
    if strategy == SIGMOID_WEIGHTED:
        return (probs - y) * weights * scale
    raise ValueError(f"unknown strategy {strategy!r}")


def sentence_gradients(model, sentence, strategy, scale=None):
    """Exact gradients of the strategy's loss for one sentence.

    ``scale`` defaults to 1/N for a single-sentence batch; the trainer
    passes 1/(batch token count) and sums over sentences.
    """
    if strategy_head(strategy) != model.head_kind:
        raise ValueError(
            f"strategy {strategy} incompatible with {model.head_kind} head")
    if scale is None:
        scale = 1.0 / len(sentence)
    windows = model.windows(sentence.texts())
    probs, hidden = model.forward_with_cache(windows)
    y = one_hot_targets(sentence, model.num_labels)
    weights = np.array([t.mask for t in sentence.tokens], dtype=float)
    delta = loss_delta(probs, y, weights, strategy, scale)
    grads = model.backward(windows, hidden, delta)
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in parameter {name}")
    return grads


# --- decoding ----------------------------------------------------------------

def repair_bio(labels, inventory):
    """Orphan I-c (no preceding B-c/I-c of the same class) becomes B-c."""
    fixed = []
    prev = 0
    for lab in labels:
        info = inventory.class_of_label(lab)
        if info is not None and info[1] == "I":
            before = inventory.class_of_label(prev)
            if before is None or before[0] != info[0]:
                b, _ = inventory.labels_for_class(info[0])
                lab = b
        fixed.append(lab)
        prev = lab
    return fixed


def decode(probs, head_kind, inventory):
    """Predicted (start, end, class) spans from head probabilities.

    Softmax: per-token argmax. Sigmoid: the max-probability label if it
    clears 0.5, else O. Ties break toward the lowest label index; the label
    sequence is BIO2-repaired before span extraction.
    """
    probs = np.asarray(probs)
    raw = probs.argmax(axis=1)
    if head_kind == SIGMOID_HEAD:
        best = probs.max(axis=1)
        raw = np.where(best > 0.5, raw, 0)
    labels = repair_bio([int(lab) for lab in raw], inventory)
    validate_bio(labels, inventory)
    return labels_to_spans(labels, inventory)
