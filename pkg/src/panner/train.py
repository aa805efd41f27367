"""Training loop, span-level evaluation, dictionary baseline and reports."""

import json
from dataclasses import dataclass, field

import numpy as np

from . import aliases as ad
from .corpus import labels_to_spans
from .rng import DetRng
from .tagger.losses import (
    SIGMOID_WEIGHTED,
    LossBatch,
    loss_j1,
    loss_j2,
    loss_j3,
)
from .tagger.model import (
    PARAM_NAMES,
    loss_delta,
    one_hot_targets,
    strategy_head,
)


@dataclass
class TrainConfig:
    strategy: str
    batch_size: int = 32
    epochs: int = 10
    lr: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 7
    select_new_only: bool = False  # dev selection on the new classes only

    def __post_init__(self):
        if self.batch_size <= 0 or self.epochs <= 0 or self.lr < 0:
            raise ValueError("batch_size/epochs must be positive, lr >= 0")


class Adam:
    """Standard Adam with bias-corrected moments, no weight decay."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, g in grads.items():
            self.m[name] = b1 * self.m[name] + (1 - b1) * g
            self.v[name] = b2 * self.v[name] + (1 - b2) * g * g
            m_hat = self.m[name] / (1 - b1 ** self.t)
            v_hat = self.v[name] / (1 - b2 ** self.t)
            self.params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def batch_loss(model, sentences, strategy):
    """The strategy's loss over a multi-sentence batch (N = total tokens)."""
    n_total = sum(len(s) for s in sentences)
    y_rows, p_rows, w_rows = [], [], []
    for sent in sentences:
        probs = model.forward(sent.texts())
        y_rows.append(one_hot_targets(sent, model.num_labels))
        p_rows.append(probs)
        w_rows.append(np.array([t.mask for t in sent.tokens], dtype=float))
    batch = LossBatch(np.vstack(y_rows), np.vstack(p_rows), np.vstack(w_rows),
                      sigmoid=strategy == SIGMOID_WEIGHTED)
    fn = {"softmax": loss_j1, "softmax_weighted": loss_j2,
          "sigmoid_weighted": loss_j3}[strategy]
    assert batch.n == n_total
    return fn(batch)


def _train_step(model, sentences, strategy, optimizer):
    """One Adam update on a batch; returns the batch loss."""
    n_total = sum(len(s) for s in sentences)
    scale = 1.0 / n_total
    total = {name: np.zeros_like(model.params[name]) for name in PARAM_NAMES}
    loss = 0.0
    for sent in sentences:
        windows = model.windows(sent.texts())
        probs, hidden = model.forward_with_cache(windows)
        y = one_hot_targets(sent, model.num_labels)
        weights = np.array([t.mask for t in sent.tokens], dtype=float)
        delta = loss_delta(probs, y, weights, strategy, scale)
        grads = model.backward(windows, hidden, delta)
        for name in PARAM_NAMES:
            total[name] += grads[name]
        loss += _raw_loss_sum(probs, y, weights, strategy)
    loss /= n_total
    optimizer.step(total)
    return loss


def _raw_loss_sum(probs, y, weights, strategy):
    """Unnormalized loss sum for one sentence (the caller divides by N)."""
    eps = 1e-12
    if strategy == SIGMOID_WEIGHTED:
        p = np.clip(probs, eps, 1 - eps)
        terms = y * np.log(p) + (1 - y) * np.log(1 - p)
        return float(-np.sum(weights * terms))
    active = np.clip(probs[y > 0], eps, None)
    if strategy == "softmax_weighted":
        wt = weights.min(axis=1)
        return float(-np.sum(wt * np.log(active)))
    return float(-np.sum(np.log(active)))


def train(train_set, dev_set, model, config, log_stream=None):
    """Train with per-epoch dev selection.

    Returns (best model params installed in ``model``, per-epoch log). The
    checkpoint with the highest dev micro-F1 wins; ties go to the earliest
    epoch. Raises on a non-finite batch loss, naming epoch and batch.
    """
    strategy_head(config.strategy)  # validates strategy vs nothing yet
    if strategy_head(config.strategy) != model.head_kind:
        raise ValueError(
            f"strategy {config.strategy} needs a "
            f"{strategy_head(config.strategy)} head, model has {model.head_kind}")
    optimizer = Adam(model.params, config.lr, config.beta1, config.beta2,
                     config.eps)
    rng = DetRng(config.seed)
    order = list(range(len(train_set)))
    log = []
    best = None  # (f1, epoch, params)
    for epoch in range(1, config.epochs + 1):
        rng.shuffle(order)
        losses = []
        for b0 in range(0, len(order), config.batch_size):
            batch = [train_set[i] for i in order[b0:b0 + config.batch_size]]
            loss = _train_step(model, batch, config.strategy, optimizer)
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite loss at epoch {epoch}, "
                    f"batch {b0 // config.batch_size}")
            losses.append(loss)
        report = evaluate(model, dev_set)
        f1 = (report.new_class_micro(model.inventory)[2]
              if config.select_new_only else report.micro[2])
        entry = {"epoch": epoch, "mean_loss": float(np.mean(losses)),
                 "dev_p": report.micro[0], "dev_r": report.micro[1],
                 "dev_f1": report.micro[2]}
        log.append(entry)
        if log_stream is not None:
            log_stream.write(json.dumps(entry) + "\n")
            log_stream.flush()
        if best is None or f1 > best[0]:
            best = (f1, epoch, model.copy_params())
    model.params = best[2]
    return model, log


# --- evaluation --------------------------------------------------------------

@dataclass
class EvalReport:
    """Span-level exact-match scores, per class and micro-averaged."""

    counts: dict = field(default_factory=dict)  # class -> [tp, fp, fn]

    @staticmethod
    def _prf(tp, fp, fn):
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return p, r, f1

    def per_class(self, name):
        return self._prf(*self.counts.get(name, (0, 0, 0)))

    @property
    def micro(self):
        tp = sum(c[0] for c in self.counts.values())
        fp = sum(c[1] for c in self.counts.values())
        fn = sum(c[2] for c in self.counts.values())
        return self._prf(tp, fp, fn)

    def new_class_micro(self, inventory):
        new = set(inventory.class_names("new"))
        tp = sum(c[0] for n, c in self.counts.items() if n in new)
        fp = sum(c[1] for n, c in self.counts.items() if n in new)
        fn = sum(c[2] for n, c in self.counts.items() if n in new)
        return self._prf(tp, fp, fn)

    def add_sentence(self, gold_spans, predicted_spans):
        gold = set(gold_spans)
        pred = set(predicted_spans)
        for start, end, cls in pred:
            slot = self.counts.setdefault(cls, [0, 0, 0])
            if (start, end, cls) in gold:
                slot[0] += 1
            else:
                slot[1] += 1
        for start, end, cls in gold - pred:
            self.counts.setdefault(cls, [0, 0, 0])[2] += 1


def score_spans(gold_per_sentence, pred_per_sentence):
    report = EvalReport()
    for gold, pred in zip(gold_per_sentence, pred_per_sentence):
        report.add_sentence(gold, pred)
    return report


def evaluate(model, test_set):
    """Exact span match (class, start, end); masks play no role in scoring."""
    from .tagger.model import decode

    report = EvalReport()
    inv = model.inventory
    for sent in test_set:
        gold = labels_to_spans(sent.labels(), inv)
        pred = decode(model.forward(sent.texts()), model.head_kind, inv)
        report.add_sentence(gold, pred)
    return report


def baseline_annotate(gold_set, dictionary, class_articles, class_name,
                      inventory):
    """Dictionary baseline: every alias span resolving into the curated
    article set is predicted as a class mention."""
    report = EvalReport()
    for sent in gold_set:
        tokens = sent.texts()
        pred = [(s, e, class_name)
                for s, e, targets in ad.find_mentions(tokens, dictionary)
                if any(t in class_articles for t in targets)]
        gold = labels_to_spans(sent.labels(), inventory)
        report.add_sentence(gold, pred)
    return report


def report_table(reports_by_dataset, model_order=None):
    """Fixed-width table: one row per model, P/R/F1 per dataset block.

    ``reports_by_dataset`` maps dataset name -> {model name -> EvalReport}.
    The best F1 per dataset is marked with ``*``.
    """
    datasets = list(reports_by_dataset)
    if model_order is None:
        model_order = []
        for block in reports_by_dataset.values():
            for name in block:
                if name not in model_order:
                    model_order.append(name)
    name_w = max([len("Model")] + [len(m) for m in model_order])
    header = "Model".ljust(name_w)
    for ds in datasets:
        header += " | " + f"{ds} (P / R / F1)".center(24)
    lines = [header, "-" * len(header)]
    best = {ds: max((block[m].micro[2] for m in model_order if m in block),
                    default=0.0)
            for ds, block in reports_by_dataset.items()}
    for m in model_order:
        row = m.ljust(name_w)
        for ds in datasets:
            block = reports_by_dataset[ds]
            if m not in block:
                row += " | " + "--".center(24)
                continue
            p, r, f1 = block[m].micro
            mark = "*" if abs(f1 - best[ds]) < 1e-12 else " "
            row += " | " + f"{p:.2f} / {r:.2f} / {f1:.2f}{mark}".center(24)
        lines.append(row)
    return "\n".join(lines) + "\n"
