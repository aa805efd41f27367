import io

from panner.corpus import ClassInventory
from panner.synth import (
    AMBIGUOUS_SURFACES,
    CLASS_NAME,
    FOOD_SURFACES,
    ROOT_CATEGORY,
    SUBCATEGORIES,
    SynthConfig,
    generate_dump,
    generate_gold,
)
from panner.wiki import parse_dump

INV = ClassInventory.from_names(new=[CLASS_NAME])


def small_cfg(**kw):
    kw.setdefault("seed", 7)
    kw.setdefault("sentences", 120)
    return SynthConfig(**kw)


def test_dump_parses_and_has_expected_structure():
    arts, graph = parse_dump(io.StringIO(generate_dump(small_cfg())))
    assert ROOT_CATEGORY in graph
    assert set(graph.children(ROOT_CATEGORY)) == set(SUBCATEGORIES)
    titles = {a.id for a in arts}
    # every food surface has an article, every ambiguous one a musician too
    for surface in FOOD_SURFACES:
        assert surface[0].upper() + surface[1:] in titles
    for surface in AMBIGUOUS_SURFACES:
        assert f"{surface[0].upper() + surface[1:]} (musician)" in titles
    members = {m for sub in SUBCATEGORIES for m in graph.members(sub)}
    assert len(members) == len(FOOD_SURFACES)


def test_dump_deterministic_per_seed():
    assert generate_dump(small_cfg()) == generate_dump(small_cfg())
    assert generate_dump(small_cfg()) != generate_dump(small_cfg(seed=8))


def test_gold_sizes_and_annotation():
    cfg = small_cfg(gold_food_sentences=20, gold_music_sentences=10,
                    gold_filler_sentences=5)
    gold = generate_gold(cfg, INV)
    assert len(gold) == 35
    b_idx, i_idx = INV.labels_for_class(CLASS_NAME)
    n_spans = 0
    for sent in gold:
        for tok in sent.tokens:
            assert tok.mask == (1, 1, 1)
            if tok.gold_label == b_idx:
                n_spans += 1
    # two food mentions per food sentence, none elsewhere
    assert n_spans == 2 * 20


def test_gold_music_mentions_are_outside():
    cfg = small_cfg(gold_food_sentences=0, gold_music_sentences=10,
                    gold_filler_sentences=0)
    gold = generate_gold(cfg, INV)
    for sent in gold:
        assert all(t.gold_label == 0 for t in sent.tokens)
        assert any(t.text in AMBIGUOUS_SURFACES for t in sent.tokens)


def test_gold_deterministic():
    assert generate_gold(small_cfg(), INV) == generate_gold(small_cfg(), INV)
