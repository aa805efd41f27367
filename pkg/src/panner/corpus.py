"""Domain types and the extended-CoNLL format shared by the whole toolkit.

A corpus is a list of sentences. Each token carries a gold BIO2 label and a
per-label supervision mask (0/1 weights). Masks come in exactly three shapes:

* fully supervised  -- all ones, file code ``+``
* unknown mention   -- all zeros, file code ``-`` (excluded from training)
* negative mention  -- ones on B-c/I-c of the forbidden classes, zeros
  elsewhere (including O), file code ``!c1,c2``

The negative shape keeps the O entry at zero because the token's true class
is unknown: it is known not to be c, not known to be outside an entity.
"""

from dataclasses import dataclass, field

LABEL_O = 0


class CorpusError(ValueError):
    """Malformed corpus data (bad file line, invalid BIO sequence, ...)."""


@dataclass(frozen=True)
class EntityClass:
    name: str
    origin: str = "new"  # "legacy" or "new"

    def __post_init__(self):
        if not self.name or not self.name.isascii():
            raise CorpusError(f"invalid class name {self.name!r}")
        if any(ch.isspace() for ch in self.name):
            raise CorpusError(f"class name contains whitespace: {self.name!r}")
        if self.origin not in ("legacy", "new"):
            raise CorpusError(f"invalid class origin {self.origin!r}")


class ClassInventory:
    """Ordered entity classes and the derived label set.

    Label order is fixed: O first, then B-c, I-c per class in list order.
    Index 0 is always O and the label count is 1 + 2 * len(classes).
    """

    def __init__(self, classes):
        self.classes = list(classes)
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise CorpusError(f"duplicate class names in inventory: {names}")
        self.labels = ["O"]
        for c in self.classes:
            self.labels.append(f"B-{c.name}")
            self.labels.append(f"I-{c.name}")
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    @classmethod
    def from_names(cls, new=(), legacy=()):
        """Inventory with legacy classes first, then new ones."""
        return cls(
            [EntityClass(n, "legacy") for n in legacy]
            + [EntityClass(n, "new") for n in new]
        )

    @property
    def num_labels(self):
        return len(self.labels)

    def class_names(self, origin=None):
        return [c.name for c in self.classes if origin is None or c.origin == origin]

    def label_index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise CorpusError(f"unknown label {label!r} (inventory: {self.labels})")

    def labels_for_class(self, name):
        """(B-c index, I-c index) for class ``name``."""
        b = self._index.get(f"B-{name}")
        if b is None:
            raise CorpusError(f"class {name!r} not in inventory {self.class_names()}")
        return b, b + 1

    def class_of_label(self, index):
        """(class name, 'B'|'I') for an entity label, None for O."""
        if index == LABEL_O:
            return None
        c = self.classes[(index - 1) // 2]
        return c.name, "B" if (index - 1) % 2 == 0 else "I"

    def to_jsonable(self):
        return [[c.name, c.origin] for c in self.classes]

    @classmethod
    def from_jsonable(cls, data):
        return cls([EntityClass(n, o) for n, o in data])

    def __eq__(self, other):
        return isinstance(other, ClassInventory) and self.classes == other.classes

    def __repr__(self):
        return f"ClassInventory({self.labels})"


# --- supervision masks -------------------------------------------------------

def full_mask(m):
    return (1,) * m


def empty_mask(m):
    return (0,) * m


def negative_mask(inventory, class_names):
    """Mask for a token known not to belong to the given classes."""
    w = [0] * inventory.num_labels
    for name in class_names:
        b, i = inventory.labels_for_class(name)
        w[b] = 1
        w[i] = 1
    return tuple(w)


def supervision_code(mask, inventory):
    """The file code ('+', '-' or '!c1,c2') for a mask, or raise CorpusError."""
    if all(v == 1 for v in mask):
        return "+"
    if all(v == 0 for v in mask):
        return "-"
    names = []
    for c in inventory.classes:
        b, i = inventory.labels_for_class(c.name)
        if mask[b] or mask[i]:
            if not (mask[b] and mask[i]):
                raise CorpusError(f"mask {mask} splits B/I of {c.name}")
            names.append(c.name)
    if mask[LABEL_O] or not names:
        raise CorpusError(f"mask {mask} is not a valid supervision shape")
    if negative_mask(inventory, names) != tuple(mask):
        raise CorpusError(f"mask {mask} is not a valid supervision shape")
    return "!" + ",".join(names)


def mask_from_code(code, inventory):
    m = inventory.num_labels
    if code == "+":
        return full_mask(m)
    if code == "-":
        return empty_mask(m)
    if code.startswith("!") and len(code) > 1:
        return negative_mask(inventory, code[1:].split(","))
    raise CorpusError(f"invalid supervision code {code!r}")


@dataclass(frozen=True)
class Token:
    text: str
    gold_label: int
    mask: tuple

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise CorpusError(f"invalid token text {self.text!r}")
        if any(v not in (0, 1) for v in self.mask):
            raise CorpusError(f"mask values must be 0/1: {self.mask}")


def validate_bio(labels, inventory, context=""):
    """Raise CorpusError unless ``labels`` is a valid BIO2 index sequence."""
    prev = LABEL_O
    for pos, lab in enumerate(labels):
        cur = inventory.class_of_label(lab)
        if cur is not None and cur[1] == "I":
            before = inventory.class_of_label(prev)
            if before is None or before[0] != cur[0]:
                raise CorpusError(
                    f"invalid BIO2 sequence{context}: {inventory.labels[lab]} "
                    f"at position {pos} does not continue an entity"
                )
        prev = lab


@dataclass(frozen=True)
class Sentence:
    tokens: tuple
    source_id: str = ""

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError("empty sentence")
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def texts(self):
        return [t.text for t in self.tokens]

    def labels(self):
        return [t.gold_label for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


def make_sentence(tokens, inventory, source_id="", context=""):
    validate_bio([t.gold_label for t in tokens], inventory, context)
    return Sentence(tuple(tokens), source_id)


# --- span annotations --------------------------------------------------------

POSITIVE = "positive"
NEGATIVE = "negative"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class SpanAnnotation:
    """A (start, end] token span with its supervision kind.

    ``classes`` holds the single class for positive spans and the forbidden
    class set for negative spans; empty for unknown spans.
    """

    start: int
    end: int
    kind: str
    classes: tuple = ()

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise CorpusError(f"invalid span [{self.start}, {self.end})")
        if self.kind not in (POSITIVE, NEGATIVE, UNKNOWN):
            raise CorpusError(f"invalid span kind {self.kind!r}")
        if self.kind == POSITIVE and len(self.classes) != 1:
            raise CorpusError("positive span needs exactly one class")
        if self.kind == NEGATIVE and not self.classes:
            raise CorpusError("negative span needs at least one class")
        object.__setattr__(self, "classes", tuple(self.classes))


def positive_span(cls, start, end):
    return SpanAnnotation(start, end, POSITIVE, (cls,))


def negative_span(classes, start, end):
    if isinstance(classes, str):
        classes = (classes,)
    return SpanAnnotation(start, end, NEGATIVE, tuple(classes))


def unknown_span(start, end):
    return SpanAnnotation(start, end, UNKNOWN)


def spans_to_labels(sent_len, spans, inventory):
    """Expand span annotations into per-token labels and supervision masks.

    Tokens outside any span are fully supervised O. The produced masks use
    the per-label (sigmoid) convention; per-token coarsening for the
    weighted-softmax loss happens in the tagger.
    """
    m = inventory.num_labels
    ordered = sorted(spans, key=lambda s: s.start)
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise CorpusError(f"overlapping spans {a} and {b}")
        if b.end > sent_len or a.end > sent_len:
            raise CorpusError("span exceeds sentence length")
    if ordered and ordered[-1].end > sent_len:
        raise CorpusError("span exceeds sentence length")

    labels = [LABEL_O] * sent_len
    masks = [full_mask(m)] * sent_len
    for span in ordered:
        for pos in range(span.start, span.end):
            if span.kind == POSITIVE:
                b, i = inventory.labels_for_class(span.classes[0])
                labels[pos] = b if pos == span.start else i
                masks[pos] = full_mask(m)
            elif span.kind == NEGATIVE:
                masks[pos] = negative_mask(inventory, span.classes)
            else:
                masks[pos] = empty_mask(m)
    return labels, masks


# --- extended-CoNLL io -------------------------------------------------------

SOURCE_PREFIX = "# source="
DOCSTART = "-DOCSTART-"


def _iob1_to_bio2(raw_labels):
    """CoNLL's original IOB1 tags use I-X to open entities; rewrite to BIO2."""
    out = []
    prev = "O"
    for lab in raw_labels:
        if lab.startswith("I-"):
            if prev == "O" or prev[2:] != lab[2:]:
                lab = "B-" + lab[2:]
        out.append(lab)
        prev = lab
    return out


def read_extended_conll(stream, inventory):
    """Read extended-CoNLL or plain CoNLL 2003 data.

    Extended lines are ``TOKEN<TAB>LABEL<TAB>SUPERVISION``. Plain CoNLL lines
    (token first, label last, space or tab separated) are accepted and
    interpreted as fully supervised; their IOB1 labels are converted to BIO2.
    """
    sentences = []
    cur, raw_labels, cur_codes = [], [], []
    source = ""
    plain = False

    def flush(lineno):
        nonlocal cur, raw_labels, cur_codes, source, plain
        if not cur:
            source = ""
            return
        labs = _iob1_to_bio2(raw_labels) if plain else raw_labels
        try:
            indices = [inventory.label_index(lab) for lab in labs]
            tokens = [
                Token(text, idx, mask_from_code(code, inventory))
                for text, idx, code in zip(cur, indices, cur_codes)
            ]
            sentences.append(
                make_sentence(tokens, inventory, source,
                              context=f" in sentence #{len(sentences)}")
            )
        except CorpusError as exc:
            raise CorpusError(f"line {lineno}: {exc}") from None
        cur, raw_labels, cur_codes = [], [], []
        source = ""
        plain = False

    lineno = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith(SOURCE_PREFIX):
            source = line[len(SOURCE_PREFIX):]
            continue
        if line.startswith(DOCSTART):
            continue
        fields = line.split("\t")
        if len(fields) == 3 and " " not in line:
            text, label, code = fields
            if not text or not label:
                raise CorpusError(f"line {lineno}: empty field in {line!r}")
            try:
                mask_from_code(code, inventory)
            except CorpusError as exc:
                raise CorpusError(f"line {lineno}: {exc}") from None
            cur.append(text)
            raw_labels.append(label)
            cur_codes.append(code)
        else:
            fields = line.split()
            if len(fields) < 2:
                raise CorpusError(f"line {lineno}: malformed line {line!r}")
            plain = True
            cur.append(fields[0])
            raw_labels.append(fields[-1])
            cur_codes.append("+")
    flush(lineno + 1)
    return sentences


def write_extended_conll(sentences, stream, inventory):
    for sent in sentences:
        if sent.source_id:
            stream.write(f"{SOURCE_PREFIX}{sent.source_id}\n")
        for tok in sent.tokens:
            code = supervision_code(tok.mask, inventory)
            stream.write(f"{tok.text}\t{inventory.labels[tok.gold_label]}\t{code}\n")
        stream.write("\n")


def read_conll_file(path, inventory):
    with open(path, encoding="utf-8") as fh:
        return read_extended_conll(fh, inventory)


def write_conll_file(sentences, path, inventory):
    with open(path, "w", encoding="utf-8") as fh:
        write_extended_conll(sentences, fh, inventory)


# --- span extraction (shared by decode / evaluation) -------------------------

def labels_to_spans(labels, inventory):
    """Entity spans (start, end, class) from a valid BIO2 index sequence."""
    spans = []
    start, cls = None, None
    for pos, lab in enumerate(labels):
        info = inventory.class_of_label(lab)
        if info is None:
            if start is not None:
                spans.append((start, pos, cls))
                start, cls = None, None
        elif info[1] == "B":
            if start is not None:
                spans.append((start, pos, cls))
            start, cls = pos, info[0]
        else:  # I- continuing
            pass
    if start is not None:
        spans.append((start, len(labels), cls))
    return spans
