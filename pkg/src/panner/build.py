"""Assembly of the partially annotated corpus and the merged splits.

``build_wiki_corpus`` keeps exactly the sentences that carry at least one
hyperlink either into the curated article set (positive entity) or to an
article sharing a surface alias with it (known non-entity). Remaining
dictionary-only alias hits become excluded (unknown-type) mentions.

``mask_legacy_corpus`` takes a fully supervised corpus (e.g. CoNLL-style)
and masks alias hits of the new class inside O regions, plus spans an
auxiliary tagger reports as legacy entities (negative for the new classes
only -- their gold labels are never touched).
"""

from dataclasses import dataclass, field

from . import aliases as ad
from .corpus import (
    LABEL_O,
    CorpusError,
    NEGATIVE,
    POSITIVE,
    SpanAnnotation,
    Token,
    UNKNOWN,
    empty_mask,
    full_mask,
    make_sentence,
    negative_mask,
    negative_span,
    positive_span,
    spans_to_labels,
    unknown_span,
)
from .rng import DetRng
from .wiki import article_sentences


@dataclass
class BuildConfig:
    inventory: object            # ClassInventory
    target_class: str            # the new class the corpus is built for
    kept_articles: set           # curator export
    seed: int = 7
    ratios: tuple = (0.8, 0.1, 0.1)

    def __post_init__(self):
        if any(r <= 0 for r in self.ratios) or abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"invalid split ratios {self.ratios}")
        self.kept_articles = set(self.kept_articles)


@dataclass
class CorpusStats:
    positive_entities: int = 0
    non_entities: int = 0
    excluded_mentions: int = 0
    distinct_entities: int = 0
    sentences: int = 0
    _targets: set = field(default_factory=set, repr=False)

    def to_table(self, name):
        head = ["Entity Type", "Pos. Entities", "Non-Entities",
                "Excl. Mentions", "Entities", "Sentences"]
        row = [name, str(self.positive_entities), str(self.non_entities),
               str(self.excluded_mentions), str(self.distinct_entities),
               str(self.sentences)]
        widths = [max(len(a), len(b)) for a, b in zip(head, row)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)),
                 "  ".join(r.ljust(w) for r, w in zip(row, widths))]
        return "\n".join(lines) + "\n"


def _annotate_sentence(tokens, token_links, dictionary, config):
    """Span annotations for one sentence, or None if it does not qualify."""
    kept = config.kept_articles
    spans = []
    qualifies = False
    for start, end, target in token_links:
        surface = " ".join(tokens[start:end])
        kind = ad.classify_linked_mention(target, kept, config.target_class,
                                          dictionary, surface)
        if kind == POSITIVE:
            spans.append(positive_span(config.target_class, start, end))
            qualifies = True
        elif kind == NEGATIVE:
            spans.append(negative_span(config.target_class, start, end))
            qualifies = True
    if not qualifies:
        return None, None

    # Hyperlink annotations take precedence over dictionary-only matches.
    taken = [(s.start, s.end) for s in spans]

    def overlaps(a, b):
        return any(a < e and b > s for s, e in taken)

    unknowns = []
    for start, end, targets in ad.find_mentions(tokens, dictionary):
        if overlaps(start, end):
            continue
        if ad.classify_unlinked_mention(targets, kept) == UNKNOWN:
            unknowns.append(unknown_span(start, end))
            taken.append((start, end))
    return spans, unknowns


def build_wiki_corpus(articles, dictionary, config):
    """(sentences, stats) for the partially annotated training corpus."""
    stats = CorpusStats()
    out = []
    for art in sorted(articles, key=lambda a: a.id):
        for pos, (tokens, token_links) in enumerate(article_sentences(art)):
            if not tokens:
                continue
            spans, unknowns = _annotate_sentence(tokens, token_links,
                                                 dictionary, config)
            if spans is None:
                continue
            all_spans = spans + unknowns
            try:
                labels, masks = spans_to_labels(len(tokens), all_spans,
                                                config.inventory)
            except CorpusError:
                # overlapping hyperlinks in the source markup: drop sentence
                continue
            toks = [Token(t, lab, mask)
                    for t, lab, mask in zip(tokens, labels, masks)]
            out.append(make_sentence(toks, config.inventory,
                                     source_id=f"{art.id}#{pos}"))
            for s in spans:
                if s.kind == POSITIVE:
                    stats.positive_entities += 1
                else:
                    stats.non_entities += 1
            stats.excluded_mentions += len(unknowns)
            for start, end, target in token_links:
                if target in config.kept_articles:
                    stats._targets.add(target)
    stats.sentences = len(out)
    stats.distinct_entities = len(stats._targets)
    return out, stats


# --- legacy-corpus masking ---------------------------------------------------

class GazetteerTagger:
    """Auxiliary tagger stub: longest-match over per-class name lists.

    Stands in for an external NER system; the file format is
    ``CLASS<TAB>phrase`` per line.
    """

    def __init__(self, phrases_by_class):
        self._dict = ad.AliasDictionary()
        for cls, phrases in phrases_by_class.items():
            for phrase in phrases:
                self._dict.add(phrase, cls)

    @classmethod
    def load(cls, path):
        table = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                if "\t" not in line:
                    raise ValueError(f"{path}:{lineno}: expected CLASS<TAB>phrase")
                name, phrase = line.split("\t", 1)
                table.setdefault(name, []).append(phrase)
        return cls(table)

    def tag(self, tokens):
        """[(start, end, legacy class), ...], non-overlapping."""
        return [(s, e, targets[0])
                for s, e, targets in ad.find_mentions(tokens, self._dict)]


def mask_legacy_corpus(sentences, dictionary, config, aux_tagger=None):
    """Mask likely new-class mentions inside the O regions of a gold corpus.

    Alias hits of the curated class become unknown mentions; aux-tagger
    spans become negatives for the new classes (the tagger's own class
    guesses are not trusted as gold). Gold labels are never altered.
    """
    inv = config.inventory
    new_classes = inv.class_names("new")
    out = []
    for sent in sentences:
        tokens = sent.texts()
        o_region = [lab == LABEL_O for lab in sent.labels()]
        masks = list(t.mask for t in sent.tokens)
        claimed = [False] * len(tokens)

        def free(start, end):
            return all(o_region[k] and not claimed[k] for k in range(start, end))

        for start, end, targets in ad.find_mentions(tokens, dictionary):
            if not free(start, end):
                continue
            if ad.classify_unlinked_mention(targets, config.kept_articles):
                for k in range(start, end):
                    masks[k] = empty_mask(inv.num_labels)
                    claimed[k] = True
        if aux_tagger is not None:
            for start, end, _cls in aux_tagger.tag(tokens):
                if not free(start, end):
                    continue
                for k in range(start, end):
                    masks[k] = negative_mask(inv, new_classes)
                    claimed[k] = True
        toks = [Token(t.text, t.gold_label, m)
                for t, m in zip(sent.tokens, masks)]
        out.append(make_sentence(toks, inv, source_id=sent.source_id))
    return out


# --- splitting and merging ---------------------------------------------------

def split_and_merge(wiki_sentences, legacy_splits, config):
    """Partition the wiki corpus by the configured ratios and merge each part
    with the corresponding legacy split, reshuffling after the merge.

    One DetRng seeded from config.seed drives all four shuffles in a fixed
    order, so a seed fully determines the output files.
    """
    if len(wiki_sentences) < 10:
        raise ValueError(
            f"need at least 10 wiki sentences to split, got {len(wiki_sentences)}")
    rng = DetRng(config.seed)
    pool = list(wiki_sentences)
    rng.shuffle(pool)
    n = len(pool)
    cut1 = int(n * config.ratios[0])
    cut2 = int(n * (config.ratios[0] + config.ratios[1]))
    parts = [pool[:cut1], pool[cut1:cut2], pool[cut2:]]
    merged = []
    for part, legacy in zip(parts, legacy_splits):
        combined = part + list(legacy)
        rng.shuffle(combined)
        merged.append(combined)
    return tuple(merged)


def holdout_for_gold(wiki_sentences, n, seed, inventory):
    """Split off a seeded sample for manual gold annotation.

    The held-out sentences come back blanked (labels O, full supervision)
    so an annotator can fill them in; the remainder keeps its annotations.
    """
    if n > len(wiki_sentences):
        raise ValueError(
            f"cannot hold out {n} of {len(wiki_sentences)} sentences")
    chosen = set(DetRng(seed).sample_indices(len(wiki_sentences), n))
    held, rest = [], []
    m = inventory.num_labels
    for idx, sent in enumerate(wiki_sentences):
        if idx in chosen:
            toks = [Token(t.text, LABEL_O, full_mask(m)) for t in sent.tokens]
            held.append(make_sentence(toks, inventory, source_id=sent.source_id))
        else:
            rest.append(sent)
    return held, rest
