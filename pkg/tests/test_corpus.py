import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexaug.corpus import (
    Branch,
    Record,
    SentencePair,
    assign_branch,
    load_corpus,
    tokenize,
)
from lexaug.errors import CorpusFormatError

from conftest import write_jsonl


class TestTokenize:
    def test_basic(self):
        sent = tokenize("The kitten lies")
        assert sent.surfaces() == ["The", "kitten", "lies"]
        assert sent.n == 3

    def test_empty(self):
        assert tokenize("").n == 0

    def test_five_tokens(self):
        assert tokenize("A Puma eats hot chip").n == 5

    def test_punctuation_not_tokens(self):
        sent = tokenize("Wait... what?!")
        assert sent.surfaces() == ["Wait", "what"]

    def test_digits_are_tokens(self):
        assert tokenize("room 101").surfaces() == ["room", "101"]

    def test_combining_marks_stay_attached(self):
        # Devanagari words include Mn/Mc combining marks.
        sent = tokenize("नमस्ते दुनिया")
        assert sent.surfaces() == ["नमस्ते", "दुनिया"]

    def test_byte_spans_slice_utf8(self):
        text = "é café ☕ ok"
        raw = text.encode("utf-8")
        for tok in tokenize(text).tokens:
            assert raw[tok.byte_start : tok.byte_end].decode("utf-8") == tok.surface

    def test_detokenization_identity_simple(self):
        text = "  One, two --  three!  "
        sent = tokenize(text)
        rebuilt = _rebuild_from_spans(text, sent)
        assert rebuilt == text

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=80))
    def test_detokenization_identity_property(self, text):
        sent = tokenize(text)
        assert _rebuild_from_spans(text, sent) == text
        # Spans are strictly increasing and non-overlapping.
        for a, b in zip(sent.tokens, sent.tokens[1:]):
            assert a.byte_end <= b.byte_start
            assert a.char_end <= b.char_start


def _rebuild_from_spans(text: str, sent) -> str:
    raw = text.encode("utf-8")
    parts = []
    cursor = 0
    for tok in sent.tokens:
        parts.append(raw[cursor : tok.byte_start])
        parts.append(raw[tok.byte_start : tok.byte_end])
        cursor = tok.byte_end
    parts.append(raw[cursor:])
    return b"".join(parts).decode("utf-8")


class TestRecordTypes:
    def test_record_rejects_blank_text(self):
        with pytest.raises(ValueError):
            Record(id=0, lang="en", script="Latn", text="   ")

    def test_record_rejects_missing_lang(self):
        with pytest.raises(ValueError):
            Record(id=0, lang="", script="Latn", text="hi")

    def test_pair_rejects_same_lang(self):
        rec = Record(id=0, lang="en", script="Latn", text="hi")
        with pytest.raises(ValueError):
            SentencePair(id=0, src=rec, tgt=rec)


class TestLoadCorpus:
    def test_line_number_ids(self, mono_corpus_file):
        records = list(load_corpus(mono_corpus_file, "mono"))
        assert [r.id for r in records] == [0, 1, 2]
        assert records[2].text == "The kitten lies"

    def test_explicit_ids_win(self, tmp_path):
        path = write_jsonl(
            tmp_path / "m.jsonl",
            [{"id": 41, "lang": "en", "script": "Latn", "text": "x y"}],
        )
        assert list(load_corpus(path, "mono"))[0].id == 41

    def test_empty_text_names_line(self, tmp_path):
        path = write_jsonl(
            tmp_path / "m.jsonl",
            [
                {"lang": "en", "script": "Latn", "text": "ok"},
                {"lang": "en", "script": "Latn", "text": ""},
                {"lang": "en", "script": "Latn", "text": "ok too"},
            ],
        )
        with pytest.raises(CorpusFormatError, match="line 2"):
            list(load_corpus(path, "mono"))

    def test_parallel_same_lang_rejected(self, tmp_path):
        path = write_jsonl(
            tmp_path / "p.jsonl",
            [
                {
                    "src": {"lang": "en", "script": "Latn", "text": "hello"},
                    "tgt": {"lang": "en", "script": "Latn", "text": "hi"},
                }
            ],
        )
        with pytest.raises(CorpusFormatError, match="line 1"):
            list(load_corpus(path, "parallel"))

    def test_parallel_roundtrip(self, parallel_corpus_file):
        pairs = list(load_corpus(parallel_corpus_file, "parallel"))
        assert len(pairs) == 2
        assert pairs[0].src.lang == "en"
        assert pairs[0].tgt.text == "El gato se sento"

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"lang": "en", "script": "Latn", "text": "ok"}\nnot json\n')
        with pytest.raises(CorpusFormatError, match="line 2"):
            list(load_corpus(str(path), "mono"))

    def test_wrong_field_types_name_line(self, tmp_path):
        path = write_jsonl(
            tmp_path / "m.jsonl",
            [
                {"lang": "en", "script": "Latn", "text": 5},
                {"id": "nope", "lang": "en", "script": "Latn", "text": "x"},
            ],
        )
        with pytest.raises(CorpusFormatError, match="line 1"):
            list(load_corpus(path, "mono"))
        seen = []
        list(load_corpus(path, "mono", errors="skip", on_error=seen.append))
        assert [e.line_no for e in seen] == [1, 2]

    def test_skip_mode_collects_errors(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"lang": "en", "script": "Latn", "text": "ok"}\n'
            "broken\n"
            '{"lang": "en", "script": "Latn", "text": "fine"}\n'
        )
        seen = []
        records = list(load_corpus(str(path), "mono", errors="skip", on_error=seen.append))
        assert [r.text for r in records] == ["ok", "fine"]
        assert len(seen) == 1 and seen[0].line_no == 2

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('\n{"lang": "en", "script": "Latn", "text": "ok"}\n\n')
        records = list(load_corpus(str(path), "mono"))
        assert len(records) == 1
        assert records[0].id == 1  # line index, not record index

    def test_streaming_is_lazy(self, tmp_path):
        path = write_jsonl(
            tmp_path / "big.jsonl",
            ({"lang": "en", "script": "Latn", "text": f"line {i}"} for i in range(5000)),
        )
        stream = load_corpus(path, "mono")
        first_two = list(itertools.islice(stream, 2))
        assert [r.id for r in first_two] == [0, 1]

    def test_bad_kind(self, mono_corpus_file):
        with pytest.raises(ValueError):
            list(load_corpus(mono_corpus_file, "bilingual"))


class TestAssignBranch:
    def test_fraction_one_always_augments(self):
        assert all(assign_branch(i, 3, 1.0) is Branch.AUGMENT for i in range(500))

    def test_fraction_zero_never_augments(self):
        assert all(assign_branch(i, 3, 0.0) is Branch.VANILLA for i in range(500))

    def test_fraction_out_of_range(self):
        with pytest.raises(ValueError):
            assign_branch(0, 0, 1.5)

    def test_pure_function(self):
        first = [assign_branch(i, 99, 0.5) for i in range(1000)]
        second = [assign_branch(i, 99, 0.5) for i in reversed(range(1000))]
        assert first == list(reversed(second))

    def test_seed_changes_split(self):
        a = [assign_branch(i, 1, 0.5) for i in range(1000)]
        b = [assign_branch(i, 2, 0.5) for i in range(1000)]
        assert a != b

    def test_share_approaches_fraction(self):
        n = 100_000
        hits = sum(assign_branch(i, 7, 0.5) is Branch.AUGMENT for i in range(n))
        assert abs(hits / n - 0.5) < 0.005
