"""Synthetic dump generator for end-to-end tests and demos.

Produces a small Wikipedia-like world for one food-ish entity class:

* food articles under a category tree rooted at "Food and drink";
* musician articles sharing surface aliases with some food articles
  (the classic ambiguous-mention case);
* "compendium" articles holding the training sentences, where food
  mentions are hyperlinked only part of the time -- popular surfaces
  mostly go unlinked, mirroring real linking policy;
* a fully annotated gold test set, disjoint from the dump sentences,
  in which a slice of the food mentions use plural surface variants that
  no dictionary entry covers.

Everything is driven by one DetRng seed.
"""

from dataclasses import dataclass

from .corpus import Token, full_mask, make_sentence
from .rng import DetRng

CLASS_NAME = "FOOD"
ROOT_CATEGORY = "Food and drink"
SUBCATEGORIES = ["Baked goods", "Dairy dishes", "Fruits", "Stews"]

# Invented food names; no overlap with context vocabulary.
FOOD_SURFACES = [
    "tarro", "quilbin", "morseled", "panute", "grellow", "sarpine",
    "dulmet", "farrow cake", "olvane", "bristelle", "cramble", "nockwurst",
    "pellamine", "torvel", "mulled vesk", "harrowroot", "simbel", "galpone",
    "restow", "curdelin", "vantelle", "mossbread", "ferrago", "lindel",
    "opaline tart", "brundle", "sechole", "tervine", "palloway", "gnespi",
    "ruckle", "ambertine", "solquist", "navelin", "dorple", "quarm",
    "wexford pie", "trellow", "humgird", "calloset",
]

# These double as musician names (alias shared with the food article).
AMBIGUOUS_SURFACES = ["tarro", "grellow", "olvane", "torvel", "ferrago",
                      "ruckle"]

FOOD_TEMPLATES = [
    "The chef paired {a} with {b} for the evening tasting .",
    "Every stall sold {a} next to bowls of {b} yesterday .",
    "She served {a} and a plate of {b} to the guests .",
    "Travellers ate {a} alongside {b} at the harbour inn .",
    "The recipe folds {a} into simmered {b} before baking .",
    "Grandmother kept {a} and jars of {b} in the pantry .",
]

MUSIC_TEMPLATES = [
    "The festival booked {a} for the closing concert downtown .",
    "Critics praised {a} after the album premiere last week .",
    "Radio stations kept playing {a} throughout the tour season .",
    "Fans queued for hours to hear {a} perform live .",
]

FILLER_SENTENCES = [
    "The committee met on Tuesday to discuss the annual budget .",
    "Heavy rain delayed the morning trains across the region .",
    "The council approved the new bridge after a long debate .",
    "Students presented their projects during the open house .",
]


@dataclass
class SynthConfig:
    seed: int = 7
    sentences: int = 2000       # training sentences in the dump
    music_fraction: float = 0.3
    gold_food_sentences: int = 150
    gold_music_sentences: int = 550
    gold_filler_sentences: int = 40
    plural_fraction: float = 0.0   # gold food mentions using plural variants
    high_link_p: float = 0.9
    low_link_p: float = 0.3
    low_propensity_fraction: float = 0.5
    music_link_p: float = 0.8


def _title(surface):
    return surface[0].upper() + surface[1:]


def _plural(surface):
    head = surface.split()
    head[-1] = head[-1] + "s"
    return " ".join(head)


def _link_propensities(cfg):
    """Per-surface hyperlink probability; deterministic assignment."""
    n_low = int(len(FOOD_SURFACES) * cfg.low_propensity_fraction)
    props = {}
    for i, surface in enumerate(FOOD_SURFACES):
        props[surface] = cfg.low_link_p if i % 2 == 0 and n_low > 0 else cfg.high_link_p
        if i % 2 == 0 and n_low > 0:
            n_low -= 1
    return props


def generate_dump(cfg):
    """The dump file content (one JSON-ish record per line) as a string."""
    import json

    rng = DetRng(cfg.seed)
    props = _link_propensities(cfg)
    records = []

    records.append(json.dumps({"kind": "category", "title": ROOT_CATEGORY}))
    for sub in SUBCATEGORIES:
        records.append(json.dumps({"kind": "category", "title": sub,
                                   "parent": ROOT_CATEGORY}))
    records.append(json.dumps({"kind": "category", "title": "Musicians"}))

    for i, surface in enumerate(FOOD_SURFACES):
        cat = SUBCATEGORIES[i % len(SUBCATEGORIES)]
        text = (f"'''{_title(surface)}''' is a traditional dish served in "
                f"many regions. [[Category:{cat}]]")
        records.append(json.dumps({"kind": "article", "title": _title(surface),
                                   "text": text}))
    for surface in AMBIGUOUS_SURFACES:
        title = f"{_title(surface)} (musician)"
        text = (f"'''{_title(surface)}''' is a touring musician. "
                f"[[Category:Musicians]]")
        records.append(json.dumps({"kind": "article", "title": title,
                                   "text": text}))

    n_music = int(cfg.sentences * cfg.music_fraction)
    n_food = cfg.sentences - n_music
    kinds = ["food"] * n_food + ["music"] * n_music
    rng.shuffle(kinds)

    sentences = []
    for kind in kinds:
        if kind == "food":
            a = rng.choice(FOOD_SURFACES)
            b = rng.choice([s for s in FOOD_SURFACES if s != a])
            slot_a = _food_slot(a, props, rng)
            slot_b = _food_slot(b, props, rng)
            sentences.append(rng.choice(FOOD_TEMPLATES).format(a=slot_a,
                                                              b=slot_b))
        else:
            s = rng.choice(AMBIGUOUS_SURFACES)
            if rng.uniform() < cfg.music_link_p:
                slot = f"[[{_title(s)} (musician)|{s}]]"
            else:
                slot = s
            sentences.append(rng.choice(MUSIC_TEMPLATES).format(a=slot))

    per_article = 50
    for i in range(0, len(sentences), per_article):
        body = " ".join(sentences[i:i + per_article])
        records.append(json.dumps({
            "kind": "article",
            "title": f"Compendium volume {i // per_article + 1}",
            "text": body,
        }))
    return "\n".join(records) + "\n"


def _food_slot(surface, props, rng):
    if rng.uniform() < props[surface]:
        return f"[[{_title(surface)}|{surface}]]"
    return surface


def generate_gold(cfg, inventory):
    """Fully annotated gold test sentences (disjoint draw from the dump)."""
    rng = DetRng(cfg.seed + 0x600D)
    b_idx, i_idx = inventory.labels_for_class(CLASS_NAME)
    m = inventory.num_labels
    sentences = []

    def tok(text, label=0):
        return Token(text, label, full_mask(m))

    def food_tokens(surface):
        words = surface.split()
        toks = [tok(words[0], b_idx)]
        toks.extend(tok(w, i_idx) for w in words[1:])
        return toks

    plan = (["food"] * cfg.gold_food_sentences
            + ["music"] * cfg.gold_music_sentences
            + ["filler"] * cfg.gold_filler_sentences)
    rng.shuffle(plan)
    for idx, kind in enumerate(plan):
        if kind == "food":
            a = rng.choice(FOOD_SURFACES)
            b = rng.choice([s for s in FOOD_SURFACES if s != a])
            if rng.uniform() < cfg.plural_fraction:
                a = _plural(a)
            if rng.uniform() < cfg.plural_fraction:
                b = _plural(b)
            template = rng.choice(FOOD_TEMPLATES)
            words = template.format(a="\x00A", b="\x00B").split()
            toks = []
            for w in words:
                if w == "\x00A":
                    toks.extend(food_tokens(a))
                elif w == "\x00B":
                    toks.extend(food_tokens(b))
                else:
                    toks.append(tok(w))
        elif kind == "music":
            s = rng.choice(AMBIGUOUS_SURFACES)
            template = rng.choice(MUSIC_TEMPLATES)
            toks = [tok(w) for w in template.format(a=s).split()]
        else:
            toks = [tok(w) for w in rng.choice(FILLER_SENTENCES).split()]
        sentences.append(make_sentence(toks, inventory, source_id=f"gold#{idx}"))
    return sentences
