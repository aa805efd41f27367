"""Finite-difference gradient oracle shared by the unit and acceptance tests."""

import numpy as np

from panner.corpus import ClassInventory, Token, make_sentence
from panner.rng import DetRng
from panner.tagger.losses import SIGMOID_WEIGHTED, SOFTMAX, SOFTMAX_WEIGHTED
from panner.tagger.model import (
    TaggerModel,
    one_hot_targets,
    sentence_gradients,
    strategy_head,
)

# M=5 labels: O plus B/I for two classes
INVENTORY = ClassInventory.from_names(new=["FOOD", "GEAR"])
WORDS = ["alpha", "beta", "gamma", "delta", "alpha"]


def random_case(seed, strategy):
    """A 5-token, d=8, M=5 model and sentence with a random mask pattern."""
    rng = DetRng(seed)
    vocab = {"<unk>": 0}
    for w in sorted(set(WORDS)):
        vocab[w] = len(vocab)
    model = TaggerModel.init(INVENTORY, vocab, strategy_head(strategy),
                             dim=8, seed=seed)
    m = INVENTORY.num_labels
    toks = []
    prev = 0
    for w in WORDS:
        choices = [0, 1, 3]
        if prev in (1, 2):
            choices.append(2)
        if prev in (3, 4):
            choices.append(4)
        lab = choices[rng.randrange(len(choices))]
        if lab == 0:
            mask = [(1,) * m, (0,) * m, (0, 1, 1, 0, 0)][rng.randrange(3)]
        else:
            mask = (1,) * m
        toks.append(Token(w, lab, tuple(mask)))
        prev = lab
    return model, make_sentence(toks, INVENTORY)


def loss_value(model, sentence, strategy):
    """The scalar each strategy's gradient differentiates (scale = 1/N)."""
    probs = model.forward(sentence.texts())
    y = one_hot_targets(sentence, model.num_labels)
    w = np.array([t.mask for t in sentence.tokens], dtype=float)
    n = len(sentence)
    if strategy == SIGMOID_WEIGHTED:
        p = np.clip(probs, 1e-12, 1 - 1e-12)
        return -np.sum(w * (y * np.log(p) + (1 - y) * np.log(1 - p))) / n
    active = probs[y > 0]
    if strategy == SOFTMAX_WEIGHTED:
        return -np.sum(w.min(axis=1) * np.log(active)) / n
    assert strategy == SOFTMAX
    return -np.sum(np.log(active)) / n


def max_relative_error(model, sentence, strategy, h=1e-4):
    """Worst per-coordinate |analytic - central difference| relative error."""
    analytic = sentence_gradients(model, sentence, strategy)
    worst = 0.0
    for name in analytic:
        tensor = model.params[name]
        flat = tensor.ravel()
        grad = analytic[name].ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_value(model, sentence, strategy)
            flat[idx] = orig - h
            down = loss_value(model, sentence, strategy)
            flat[idx] = orig
            numeric = (up - down) / (2 * h)
            err = abs(grad[idx] - numeric) / (abs(grad[idx]) + 1e-8)
            worst = max(worst, err)
    return worst
