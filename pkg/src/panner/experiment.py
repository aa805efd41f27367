"""The scaled directional experiment: full pipeline on a synthetic dump.

Generates a dump, curates it with an all-keep script, builds dictionary and
corpus, splits, trains the three strategies at the reference optimizer
settings, and evaluates everything (plus the dictionary baseline) on the
fully annotated synthetic gold set.
"""

import io
from dataclasses import dataclass, field

from . import synth
from .aliases import build_dictionary
from .build import BuildConfig, build_wiki_corpus, split_and_merge
from .corpus import ClassInventory
from .curation import KEEP_ALL, CuratorSession
from .tagger.losses import SIGMOID_WEIGHTED, SOFTMAX, SOFTMAX_WEIGHTED
from .tagger.model import TaggerModel, build_vocabulary, strategy_head
from .train import TrainConfig, baseline_annotate, evaluate, train
from .wiki import parse_dump


@dataclass
class ExperimentResult:
    reports: dict = field(default_factory=dict)   # name -> EvalReport
    stats: object = None
    logs: dict = field(default_factory=dict)

    def f1(self, name):
        return self.reports[name].micro[2]

    def recall(self, name):
        return self.reports[name].micro[1]


def curate_all_yes(graph, start, class_name):
    """Scripted curation session answering 'y' to every prompt."""
    session = CuratorSession(graph, start, class_name)
    while True:
        prompt = session.next_prompt()
        if prompt is None:
            return session
        session.apply_decision(prompt.category, KEEP_ALL)


def run_directional_experiment(seed=7, sentences=2000, epochs=300, dim=32,
                               lr=5e-5, batch_size=32, progress=None):
    """Train all three strategies on the synthetic pipeline output.

    Returns an ExperimentResult with reports keyed ``softmax``,
    ``softmax_weighted``, ``sigmoid_weighted`` and ``baseline``.
    """
    cfg = synth.SynthConfig(seed=seed, sentences=sentences)
    inv = ClassInventory.from_names(new=[synth.CLASS_NAME])

    articles, graph = parse_dump(io.StringIO(synth.generate_dump(cfg)))
    session = curate_all_yes(graph, synth.ROOT_CATEGORY, synth.CLASS_NAME)
    kept = set(session.export_article_set())
    dictionary = build_dictionary(articles)

    build_cfg = BuildConfig(inv, synth.CLASS_NAME, kept, seed=seed)
    corpus, stats = build_wiki_corpus(articles, dictionary, build_cfg)
    train_set, dev_set, _ = split_and_merge(corpus, ([], [], []), build_cfg)
    gold = synth.generate_gold(cfg, inv)

    result = ExperimentResult(stats=stats)
    vocab = build_vocabulary(train_set)
    for strategy in (SOFTMAX, SOFTMAX_WEIGHTED, SIGMOID_WEIGHTED):
        if progress:
            progress(f"training {strategy}")
        model = TaggerModel.init(inv, vocab, strategy_head(strategy),
                                 dim=dim, seed=seed)
        config = TrainConfig(strategy=strategy, batch_size=batch_size,
                             epochs=epochs, lr=lr, seed=seed)
        model, log = train(train_set, dev_set, model, config)
        result.logs[strategy] = log
        result.reports[strategy] = evaluate(model, gold)
    result.reports["baseline"] = baseline_annotate(
        gold, dictionary, kept, synth.CLASS_NAME, inv)
    return result
