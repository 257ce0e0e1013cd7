"""Corpus ingestion, word tokenization, and augment/vanilla branch splits.

Corpora are line-delimited JSON. Monolingual lines look like
``{"id"?: int, "lang": str, "script": str, "text": str}`` and parallel lines
like ``{"id"?: int, "src": {...}, "tgt": {...}}``. Records stream lazily, so
memory stays bounded regardless of corpus size.
"""

from __future__ import annotations

import enum
import hashlib
import json
import struct
import unicodedata
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .errors import CorpusFormatError

MAX_U64 = 2**64 - 1


@dataclass(frozen=True)
class Record:
    """One monolingual sentence with language and script tags."""

    id: int
    lang: str
    script: str
    text: str

    def __post_init__(self):
        if not isinstance(self.id, int) or isinstance(self.id, bool):
            raise ValueError(f"record id must be an integer, got {type(self.id).__name__}")
        if not (0 <= self.id <= MAX_U64):
            raise ValueError(f"record id {self.id} outside unsigned 64-bit range")
        for name in ("lang", "script", "text"):
            if not isinstance(getattr(self, name), str):
                raise ValueError(f"{name} must be a string")
        if not self.lang or not self.script:
            raise ValueError("lang and script must be non-empty")
        if not self.text.strip():
            raise ValueError("text is empty after whitespace trim")


@dataclass(frozen=True)
class SentencePair:
    """An aligned sentence pair; the two sides must differ in language."""

    id: int
    src: Record
    tgt: Record

    def __post_init__(self):
        if not (0 <= self.id <= MAX_U64):
            raise ValueError(f"pair id {self.id} outside unsigned 64-bit range")
        if self.src.lang == self.tgt.lang:
            raise ValueError(f"src and tgt share language {self.src.lang!r}")


@dataclass(frozen=True)
class Token:
    """A word token with both character and byte spans into the source text."""

    surface: str
    char_start: int
    char_end: int
    byte_start: int
    byte_end: int


@dataclass(frozen=True)
class TokenizedSentence:
    text: str
    tokens: tuple[Token, ...]

    @property
    def n(self) -> int:
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


_WORD_CHAR_CACHE: dict[str, bool] = {}


def _is_word_char(ch: str) -> bool:
    try:
        return _WORD_CHAR_CACHE[ch]
    except KeyError:
        # Letters, combining marks, and numbers form tokens; everything else
        # (punctuation, symbols, whitespace) separates them.
        result = unicodedata.category(ch)[0] in "LMN"
        _WORD_CHAR_CACHE[ch] = result
        return result


def tokenize(text: str) -> TokenizedSentence:
    """Split text into maximal runs of Unicode letters/marks/digits.

    Non-token bytes are preserved through the recorded spans: slicing the
    UTF-8 encoding of ``text`` at the byte spans (or the string at the char
    spans) reproduces each surface exactly.
    """
    tokens: list[Token] = []
    char_pos = 0
    byte_pos = 0
    run_start_char = run_start_byte = -1
    for ch in text:
        ch_bytes = len(ch.encode("utf-8"))
        if _is_word_char(ch):
            if run_start_char < 0:
                run_start_char, run_start_byte = char_pos, byte_pos
        else:
            if run_start_char >= 0:
                tokens.append(
                    Token(text[run_start_char:char_pos], run_start_char, char_pos, run_start_byte, byte_pos)
                )
                run_start_char = -1
        char_pos += 1
        byte_pos += ch_bytes
    if run_start_char >= 0:
        tokens.append(Token(text[run_start_char:char_pos], run_start_char, char_pos, run_start_byte, byte_pos))
    return TokenizedSentence(text, tuple(tokens))


class Branch(enum.Enum):
    AUGMENT = "augment"
    VANILLA = "vanilla"


def pack_u64_pair(seed: int, record_id: int) -> bytes:
    if not (0 <= seed <= MAX_U64):
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if not (0 <= record_id <= MAX_U64):
        raise ValueError(f"record_id must be an unsigned 64-bit integer, got {record_id}")
    return struct.pack("<QQ", seed, record_id)


def _hash_unit(seed: int, record_id: int, domain: bytes) -> float:
    """Stable hash of (seed, record_id) mapped to [0, 1)."""
    digest = hashlib.blake2b(pack_u64_pair(seed, record_id), digest_size=8, person=domain).digest()
    return int.from_bytes(digest, "little") / 2**64


def assign_branch(record_id: int, seed: int, fraction: float = 0.5) -> Branch:
    """Deterministically route a record to the augmented or vanilla branch.

    Pure function of its arguments: the same (record_id, seed, fraction)
    lands on the same branch regardless of iteration order, sharding, or
    worker count. ``fraction`` is the augmented share.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    if _hash_unit(seed, record_id, b"branch") < fraction:
        return Branch.AUGMENT
    return Branch.VANILLA


def _require(obj: dict, field: str, line_no: int, path: str | None):
    if field not in obj:
        raise CorpusFormatError(f"missing field {field!r}", path, line_no)
    return obj[field]


def _record_from_obj(obj: dict, default_id: int, line_no: int, path: str | None) -> Record:
    rec_id = obj.get("id", default_id)
    try:
        return Record(
            id=rec_id,
            lang=_require(obj, "lang", line_no, path),
            script=_require(obj, "script", line_no, path),
            text=_require(obj, "text", line_no, path),
        )
    except (ValueError, TypeError) as exc:
        raise CorpusFormatError(str(exc), path, line_no) from exc


def _pair_from_obj(obj: dict, default_id: int, line_no: int, path: str | None) -> SentencePair:
    pair_id = obj.get("id", default_id)
    sides = {}
    for side in ("src", "tgt"):
        side_obj = _require(obj, side, line_no, path)
        if not isinstance(side_obj, dict):
            raise CorpusFormatError(f"{side!r} must be an object", path, line_no)
        sides[side] = _record_from_obj(side_obj, default_id, line_no, path)
    try:
        return SentencePair(id=pair_id, src=sides["src"], tgt=sides["tgt"])
    except (ValueError, TypeError) as exc:
        raise CorpusFormatError(str(exc), path, line_no) from exc


def load_corpus(
    path: str,
    kind: str = "mono",
    errors: str = "abort",
    on_error: Callable[[CorpusFormatError], None] | None = None,
) -> Iterator[Union[Record, SentencePair]]:
    """Stream records from a JSONL corpus file in file order.

    Ids come from an explicit ``id`` field when present, otherwise from the
    0-based line index. Malformed lines raise CorpusFormatError naming the
    (1-based) line, or are skipped when ``errors="skip"``; ``on_error`` is
    invoked with each skipped error.
    """
    if kind not in ("mono", "parallel"):
        raise ValueError(f"kind must be 'mono' or 'parallel', got {kind!r}")
    if errors not in ("abort", "skip"):
        raise ValueError(f"errors must be 'abort' or 'skip', got {errors!r}")
    with open(path, "r", encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            line_no = index + 1
            try:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusFormatError(f"invalid JSON: {exc.msg}", path, line_no) from exc
                if not isinstance(obj, dict):
                    raise CorpusFormatError("line is not a JSON object", path, line_no)
                if kind == "mono":
                    yield _record_from_obj(obj, index, line_no, path)
                else:
                    yield _pair_from_obj(obj, index, line_no, path)
            except CorpusFormatError as exc:
                if errors == "abort":
                    raise
                if on_error is not None:
                    on_error(exc)
