import io

import pytest
from hypothesis import given, settings, strategies as st

from panner.corpus import (
    ClassInventory,
    CorpusError,
    EntityClass,
    Token,
    empty_mask,
    full_mask,
    labels_to_spans,
    make_sentence,
    mask_from_code,
    negative_mask,
    negative_span,
    positive_span,
    read_extended_conll,
    spans_to_labels,
    supervision_code,
    unknown_span,
    write_extended_conll,
)

FOOD = ClassInventory.from_names(new=["FOOD"])
MULTI = ClassInventory.from_names(legacy=["PER", "LOC", "ORG", "MISC"],
                                  new=["FOOD"])


class TestInventory:

    def test_label_order(self):
        assert FOOD.labels == ["O", "B-FOOD", "I-FOOD"]
        assert FOOD.num_labels == 3

    def test_labels_for_class_single(self):
        assert FOOD.labels_for_class("FOOD") == (1, 2)

    def test_labels_for_class_multi(self):
        # enumerate by hand: O, B-PER, I-PER, B-LOC, I-LOC, B-ORG, I-ORG,
        # B-MISC, I-MISC, B-FOOD, I-FOOD
        assert MULTI.labels_for_class("FOOD") == (9, 10)
        assert MULTI.labels_for_class("PER") == (1, 2)

    def test_unknown_class(self):
        with pytest.raises(CorpusError, match="FOOD"):
            ClassInventory.from_names(new=["PER"]).labels_for_class("FOOD")

    def test_duplicate_names_rejected(self):
        with pytest.raises(CorpusError):
            ClassInventory([EntityClass("X"), EntityClass("X", "legacy")])

    def test_serialization_reproduces_indices(self):
        again = ClassInventory.from_jsonable(MULTI.to_jsonable())
        assert again.labels == MULTI.labels
        assert again.labels_for_class("FOOD") == MULTI.labels_for_class("FOOD")

    def test_class_of_label(self):
        assert MULTI.class_of_label(0) is None
        assert MULTI.class_of_label(9) == ("FOOD", "B")
        assert MULTI.class_of_label(10) == ("FOOD", "I")


class TestMasks:

    def test_codes_partition(self):
        m = FOOD.num_labels
        assert supervision_code(full_mask(m), FOOD) == "+"
        assert supervision_code(empty_mask(m), FOOD) == "-"
        assert supervision_code(negative_mask(FOOD, ["FOOD"]), FOOD) == "!FOOD"

    def test_code_roundtrip(self):
        for code in ("+", "-", "!FOOD", "!PER,FOOD"):
            mask = mask_from_code(code, MULTI)
            assert supervision_code(mask, MULTI) == code

    def test_negative_mask_zeroes_o(self):
        mask = negative_mask(FOOD, ["FOOD"])
        assert mask == (0, 1, 1)

    def test_invalid_shape_rejected(self):
        with pytest.raises(CorpusError):
            supervision_code((1, 0, 1), FOOD)
        with pytest.raises(CorpusError):
            supervision_code((1, 1, 0), FOOD)


class TestSpansToLabels:

    def test_fully_supervised_positive(self):
        labels, masks = spans_to_labels(3, [positive_span("FOOD", 0, 2)], FOOD)
        assert [FOOD.labels[i] for i in labels] == ["B-FOOD", "I-FOOD", "O"]
        assert all(m == (1, 1, 1) for m in masks)

    def test_unknown_span_masked_out(self):
        labels, masks = spans_to_labels(2, [unknown_span(0, 1)], FOOD)
        assert labels == [0, 0]
        assert masks == [(0, 0, 0), (1, 1, 1)]

    def test_negative_span(self):
        labels, masks = spans_to_labels(2, [negative_span("FOOD", 0, 2)], FOOD)
        assert labels == [0, 0]
        assert masks == [(0, 1, 1), (0, 1, 1)]

    def test_overlap_rejected(self):
        spans = [positive_span("FOOD", 0, 2), unknown_span(1, 3)]
        with pytest.raises(CorpusError, match="overlap"):
            spans_to_labels(3, spans, FOOD)

    def test_output_is_valid_bio(self):
        spans = [positive_span("FOOD", 1, 3), negative_span("FOOD", 4, 5)]
        labels, masks = spans_to_labels(6, spans, FOOD)
        # constructing the sentence revalidates BIO
        toks = [Token(f"t{i}", lab, m)
                for i, (lab, m) in enumerate(zip(labels, masks))]
        make_sentence(toks, FOOD)


class TestExtendedConll:

    def read(self, text, inv=FOOD):
        return read_extended_conll(io.StringIO(text), inv)

    def test_single_token(self):
        sents = self.read("salt\tB-FOOD\t+\n\n")
        assert len(sents) == 1
        tok = sents[0].tokens[0]
        assert tok.text == "salt"
        assert FOOD.labels[tok.gold_label] == "B-FOOD"
        assert tok.mask == (1, 1, 1)

    def test_unknown_mention(self):
        sents = self.read("Tomato\tO\t-\n")
        assert sents[0].tokens[0].mask == (0, 0, 0)

    def test_negative_mention(self):
        sents = self.read("Tomato\tO\t!FOOD\n")
        assert sents[0].tokens[0].mask == (0, 1, 1)

    def test_source_comment(self):
        sents = self.read("# source=Salt#3\nsalt\tB-FOOD\t+\n\n")
        assert sents[0].source_id == "Salt#3"

    def test_plain_conll_iob1_converted(self):
        text = ("-DOCSTART- -X- O O\n\n"
                "EU NNP I-NP I-ORG\n"
                "rejects VBZ I-VP O\n\n")
        inv = ClassInventory.from_names(legacy=["ORG"])
        sents = read_extended_conll(io.StringIO(text), inv)
        assert len(sents) == 1
        assert inv.labels[sents[0].tokens[0].gold_label] == "B-ORG"
        assert sents[0].tokens[0].mask == (1, 1, 1)

    def test_malformed_line_reports_number(self):
        with pytest.raises(CorpusError, match="line 2"):
            self.read("salt\tB-FOOD\t+\njunk\n")

    def test_invalid_bio_rejected(self):
        with pytest.raises(CorpusError, match="BIO2"):
            self.read("salt\tI-FOOD\t+\n\n")

    def test_bad_supervision_code(self):
        with pytest.raises(CorpusError, match="line 1"):
            self.read("salt\tO\t?\n\n")

    def test_roundtrip_identity(self):
        text = ("# source=a#0\n"
                "salt\tB-FOOD\t+\nand\tO\t+\npepper\tO\t-\n\n"
                "Tomato\tO\t!FOOD\nsauce\tO\t+\n\n")
        sents = self.read(text)
        buf = io.StringIO()
        write_extended_conll(sents, buf, FOOD)
        assert buf.getvalue() == text
        assert self.read(buf.getvalue()) == sents


@st.composite
def sentence_strategy(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    toks = []
    prev = 0
    for i in range(n):
        options = [0, 1]
        if prev in (1, 2):
            options.append(2)
        lab = draw(st.sampled_from(options))
        code = draw(st.sampled_from(["+", "-", "!FOOD"])) if lab == 0 else "+"
        text = draw(st.text(alphabet="abcXYZ", min_size=1, max_size=4))
        toks.append(Token(text, lab, mask_from_code(code, FOOD)))
        prev = lab
    source = draw(st.sampled_from(["", "src#1"]))
    return make_sentence(toks, FOOD, source_id=source)


@settings(max_examples=60, deadline=None)
@given(st.lists(sentence_strategy(), min_size=0, max_size=5))
def test_write_read_roundtrip_property(sentences):
    buf = io.StringIO()
    write_extended_conll(sentences, buf, FOOD)
    assert read_extended_conll(io.StringIO(buf.getvalue()), FOOD) == sentences


def test_labels_to_spans():
    labels = [FOOD.label_index(x) for x in ["B-FOOD", "I-FOOD", "O", "B-FOOD"]]
    assert labels_to_spans(labels, FOOD) == [(0, 2, "FOOD"), (3, 4, "FOOD")]
