"""Alias dictionary: hyperlink anchors (and titles) -> candidate articles.

Built from every hyperlink in the dump plus a title self-alias per article.
A lowercased variant of each alias is inserted as well so sentence-initial
capitalization does not hide matches; exact-case lookup wins when both hit.
"""

from .wiki import extract_links
from .corpus import POSITIVE, NEGATIVE, UNKNOWN


class AliasDictionary:

    def __init__(self):
        self._entries = {}  # alias -> {target: count}
        self._max_tokens = 0

    def add(self, alias, target, count=1):
        alias = alias.strip()
        if not alias or not target:
            return
        bucket = self._entries.setdefault(alias, {})
        bucket[target] = bucket.get(target, 0) + count
        self._max_tokens = max(self._max_tokens, len(alias.split()))
        lowered = alias.lower()
        if lowered != alias:
            bucket = self._entries.setdefault(lowered, {})
            bucket[target] = bucket.get(target, 0) + count

    def targets(self, surface):
        """Candidate targets for a surface string; exact case first, then
        the lowercased form. Sorted for determinism. Empty if unknown."""
        bucket = self._entries.get(surface)
        if bucket is None:
            bucket = self._entries.get(surface.lower())
        return sorted(bucket) if bucket else []

    def count(self, alias, target):
        return self._entries.get(alias, {}).get(target, 0)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, surface):
        return bool(self.targets(surface))

    @property
    def max_alias_tokens(self):
        return self._max_tokens

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for alias in sorted(self._entries):
                for target in sorted(self._entries[alias]):
                    fh.write(f"{alias}\t{target}\t{self._entries[alias][target]}\n")

    @classmethod
    def load(cls, path):
        d = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    raise ValueError(f"{path}:{lineno}: malformed dictionary line")
                alias, target, count = fields
                # entries were expanded on save; insert verbatim
                bucket = d._entries.setdefault(alias, {})
                bucket[target] = bucket.get(target, 0) + int(count)
                d._max_tokens = max(d._max_tokens, len(alias.split()))
        return d


def build_dictionary(articles):
    """Aggregate anchors and titles over all articles (order-independent)."""
    d = AliasDictionary()
    for art in articles:
        d.add(art.title, art.id)
        for link in extract_links(art.text):
            d.add(link.anchor, link.target)
    return d


def find_mentions(tokens, dictionary):
    """Greedy left-to-right longest-match of aliases over a token sequence.

    Matches are token-boundary only (the space-joined token slice must equal
    an alias). After a match, scanning resumes at its end, so matches never
    overlap. Returns ``[(start, end, targets), ...]`` in order.
    """
    mentions = []
    n = len(tokens)
    i = 0
    limit = dictionary.max_alias_tokens
    while i < n:
        matched = False
        for j in range(min(n, i + limit), i, -1):
            surface = " ".join(tokens[i:j])
            targets = dictionary.targets(surface)
            if targets:
                mentions.append((i, j, targets))
                i = j
                matched = True
                break
        if not matched:
            i += 1
    return mentions


def classify_linked_mention(target, class_articles, class_name, dictionary, surface):
    """Supervision kind for a hyperlinked mention, or None if irrelevant.

    A link into the class article set is a positive entity; a link elsewhere
    whose surface is also an alias of a class article is a known non-entity.
    Links with no alias overlap with the class carry no signal.
    """
    if target in class_articles:
        return POSITIVE
    if any(t in class_articles for t in dictionary.targets(surface)):
        return NEGATIVE
    return None


def classify_unlinked_mention(targets, class_articles):
    """Supervision kind for a dictionary-only mention, or None.

    Any candidate target in the class set makes the mention an excluded
    (unknown-type) mention; otherwise it is not annotated at all.
    """
    if any(t in class_articles for t in targets):
        return UNKNOWN
    return None
