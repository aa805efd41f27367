"""Parsing of the simplified article dump: articles, hyperlinks, categories.

The dump is line-delimited JSON, one record per line:

* ``{"kind": "article", "title": ..., "text": ...}`` -- the text is a small
  wikitext subset: ``[[Target]]`` / ``[[Target|anchor]]`` links,
  ``[[Category:X]]`` membership tags, ``{{...}}`` templates and
  ``<ref>...</ref>`` footnotes (both stripped before tokenization).
* ``{"kind": "category", "title": ..., "parent": ...}`` -- a category node;
  ``parent`` is optional and adds a parent->title edge.

Unknown fields are ignored. Titles are canonicalized Wikipedia-style:
underscores become spaces and the first character is uppercased.
"""

import json
import re
import string
from dataclasses import dataclass, field

PUNCT = set(string.punctuation)
EXCLUDED_NAMESPACES = ("category:", "file:", "image:")

_TEMPLATE_RE = re.compile(r"\{\{[^{}]*\}\}")
_REF_RE = re.compile(r"<ref[^>/]*/>|<ref[^>]*>.*?</ref>", re.DOTALL)
_CATEGORY_RE = re.compile(r"\[\[\s*Category\s*:\s*([^\]|]+)(?:\|[^\]]*)?\]\]",
                          re.IGNORECASE)
_MARKUP_CHARS_RE = re.compile(r"''+|[\[\]{}<>|]")
_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z])")


class DumpError(ValueError):
    """Malformed dump record."""


def canonical_title(title):
    title = title.replace("_", " ").strip()
    if not title:
        return title
    return title[0].upper() + title[1:]


@dataclass(frozen=True)
class Hyperlink:
    target: str  # canonical article title
    anchor: str  # surface string
    start: int   # char span in the source text
    end: int


@dataclass
class Article:
    id: str  # canonical title doubles as the stable identifier
    title: str
    text: str
    categories: list = field(default_factory=list)


@dataclass
class CategoryGraph:
    nodes: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)       # parent -> [children]
    membership: dict = field(default_factory=dict)  # category -> [article ids]

    def __post_init__(self):
        self._node_set = set(self.nodes)

    def add_node(self, title):
        if title not in self._node_set:
            self._node_set.add(title)
            self.nodes.append(title)
            self.edges.setdefault(title, [])
            self.membership.setdefault(title, [])

    def add_edge(self, parent, child):
        self.add_node(parent)
        self.add_node(child)
        if child not in self.edges[parent]:
            self.edges[parent].append(child)

    def add_member(self, category, article_id):
        self.add_node(category)
        if article_id not in self.membership[category]:
            self.membership[category].append(article_id)

    def __contains__(self, title):
        return title in self._node_set

    def children(self, title):
        return list(self.edges.get(title, []))

    def members(self, title):
        return list(self.membership.get(title, []))

    def to_jsonable(self):
        return {"nodes": self.nodes, "edges": self.edges,
                "membership": self.membership}

    @classmethod
    def from_jsonable(cls, data):
        return cls(nodes=list(data["nodes"]),
                   edges={k: list(v) for k, v in data["edges"].items()},
                   membership={k: list(v) for k, v in data["membership"].items()})


def extract_links(text):
    """All article hyperlinks in a wikitext fragment.

    Handles ``[[Target]]`` and ``[[Target|anchor]]``; namespaced links
    (Category:, File:, Image:) are skipped, ``#section`` fragments are cut
    from the target, and an unterminated ``[[`` is literal text.
    """
    links = []
    pos = 0
    while True:
        start = text.find("[[", pos)
        if start < 0:
            break
        end = text.find("]]", start + 2)
        if end < 0:
            break  # unterminated: rest of the text is literal
        inner = text[start + 2:end]
        pos = end + 2
        if "[[" in inner:  # stray open bracket; re-scan from the inner one
            pos = start + 2 + inner.rindex("[[")
            continue
        if "|" in inner:
            target, anchor = inner.split("|", 1)
        else:
            target = anchor = inner
        target = target.split("#", 1)[0].strip()
        anchor = anchor.strip()
        if not target or not anchor:
            continue
        if target.lower().startswith(EXCLUDED_NAMESPACES):
            continue
        links.append(Hyperlink(canonical_title(target), anchor, start, pos))
    return links


def parse_dump(stream):
    """Parse a dump stream into (articles, category graph)."""
    articles = []
    titles = set()
    category_records = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DumpError(f"line {lineno}: invalid JSON ({exc})") from None
        kind = rec.get("kind")
        if kind == "article":
            if "title" not in rec or "text" not in rec:
                raise DumpError(f"line {lineno}: article record needs title and text")
            title = canonical_title(rec["title"])
            if title in titles:
                raise DumpError(f"line {lineno}: duplicate article title {title!r}")
            titles.add(title)
            cats = []
            for m in _CATEGORY_RE.finditer(rec["text"]):
                cat = canonical_title(m.group(1))
                if cat not in cats:
                    cats.append(cat)
            articles.append(Article(id=title, title=title, text=rec["text"],
                                    categories=cats))
        elif kind == "category":
            if "title" not in rec:
                raise DumpError(f"line {lineno}: category record needs a title")
            category_records.append(
                (canonical_title(rec["title"]),
                 canonical_title(rec["parent"]) if rec.get("parent") else None))
        else:
            raise DumpError(f"line {lineno}: unknown record kind {kind!r}")

    graph = CategoryGraph()
    for title, parent in category_records:
        graph.add_node(title)
        if parent:
            graph.add_edge(parent, title)
    for art in articles:
        for cat in art.categories:
            graph.add_member(cat, art.id)
    return articles, graph


def load_dump(path):
    with open(path, encoding="utf-8") as fh:
        return parse_dump(fh)


# --- plain-text rendering and sentence splitting -----------------------------

def render_plain(text):
    """Reduce wikitext to plain text, tracking link spans.

    Returns ``(plain, links)`` where each link is ``(start, end, target)``
    with char offsets into ``plain`` and the anchor substituted in place of
    the link markup.
    """
    prev = None
    while prev != text:
        prev = text
        text = _TEMPLATE_RE.sub(" ", text)
    text = _REF_RE.sub(" ", text)
    text = _CATEGORY_RE.sub(" ", text)

    links = extract_links(text)
    parts = []
    spans = []
    cursor = 0
    out_len = 0

    def emit_plain(chunk):
        nonlocal out_len
        chunk = _MARKUP_CHARS_RE.sub("", chunk)
        parts.append(chunk)
        out_len += len(chunk)

    for link in links:
        emit_plain(text[cursor:link.start])
        parts.append(link.anchor)
        spans.append((out_len, out_len + len(link.anchor), link.target))
        out_len += len(link.anchor)
        cursor = link.end
    emit_plain(text[cursor:])
    return "".join(parts), spans


def _tokenize_with_offsets(text, base=0):
    """Whitespace tokens with leading/trailing punctuation split off."""
    tokens = []  # (text, start, end)
    for m in re.finditer(r"\S+", text):
        chunk, s = m.group(), m.start() + base
        lead = []
        while chunk and chunk[0] in PUNCT and len(chunk) > 1:
            lead.append((chunk[0], s, s + 1))
            chunk = chunk[1:]
            s += 1
        trail = []
        while chunk and chunk[-1] in PUNCT and len(chunk) > 1:
            trail.append((chunk[-1], s + len(chunk) - 1, s + len(chunk)))
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append((chunk, s, s + len(chunk)))
        tokens.extend(reversed(trail))
    return tokens


def split_sentences_with_links(plain, links=()):
    """Sentence token lists with link spans mapped to token offsets.

    Splits at ``. ! ?`` followed by whitespace and an uppercase letter, but
    never inside a link span. Returns a list of ``(tokens, token_links)``
    where ``token_links`` is ``[(start_tok, end_tok, target), ...]``.
    """
    if not plain.strip():
        return []
    cuts = [0]
    for m in _BOUNDARY_RE.finditer(plain):
        cut = m.start()
        if any(s < cut < e for s, e, _ in links):
            continue
        cuts.append(m.end())
    cuts.append(len(plain))

    out = []
    for s, e in zip(cuts, cuts[1:]):
        toks = _tokenize_with_offsets(plain[s:e], base=s)
        if not toks:
            continue
        token_links = []
        for ls, le, target in links:
            if le <= s or ls >= e:
                continue
            covered = [i for i, (_, ts, te) in enumerate(toks)
                       if ts < le and te > ls]
            if covered:
                token_links.append((covered[0], covered[-1] + 1, target))
        out.append(([t[0] for t in toks], token_links))
    return out


def split_sentences(text):
    """Plain-text sentence splitting: token lists only."""
    return [tokens for tokens, _ in split_sentences_with_links(text)]


def article_sentences(article):
    """Rendered sentences of an article with token-level link spans."""
    plain, links = render_plain(article.text)
    return split_sentences_with_links(plain, links)
