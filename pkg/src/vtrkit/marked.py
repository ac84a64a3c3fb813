"""Anomaly-marked transcripts.

Inline grammar::

    c[[a]]t      word "cat", character 1 flagged anomalous
    [[?]]        an unreadable anomalous character
    [[#]]        standalone token: adhesion placeholder (uncountable merged word)

Everything else is plain text; words are separated by whitespace.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

SENTINEL = "�"
ADHESION = "[[#]]"
_RESERVED = frozenset("[]" + SENTINEL)

# CJK unified ideographs (base, ext A, ext B-H) and compatibility ideographs.
_CJK = "㐀-䶿一-鿿豈-﫿\U00020000-\U0003134f"
_CJK_CHAR = re.compile(f"[{_CJK}]")
_ZH_UNIT = re.compile(f"[{_CJK}]|[^\\s{_CJK}]+")


class Language(str, Enum):
    EN = "en"
    ZH = "zh"

    @classmethod
    def coerce(cls, value: "Language | str") -> "Language":
        if isinstance(value, Language):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown language {value!r}; expected 'en' or 'zh'") from None


class MarkedTextError(ValueError):
    """Raised when an inline marked string is malformed.

    ``offset`` is the UTF-8 byte offset of the offending position.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.reason = message
        self.offset = offset


@dataclass(frozen=True)
class Token:
    """A word (with anomalous character positions) or an adhesion placeholder."""

    kind: str
    text: str = ""
    flags: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "adhesion":
            if self.text or self.flags:
                raise ValueError("adhesion tokens carry no characters")
            return
        if self.kind != "word":
            raise ValueError(f"unknown token kind {self.kind!r}")
        if not self.text:
            raise ValueError("word tokens must be non-empty")
        for ch in self.text:
            if ch in _RESERVED or ch.isspace():
                raise ValueError(f"character {ch!r} cannot appear in a word token")
        if any(not 0 <= i < len(self.text) for i in self.flags):
            raise ValueError("anomaly flag outside the word")
        if list(self.flags) != sorted(set(self.flags)):
            raise ValueError("anomaly flags must be strictly increasing")
        if self.text == "#" and self.flags:
            raise ValueError("a lone anomalous '#' is indistinguishable from adhesion")

    @classmethod
    def word(cls, text: str, flags: Iterable[int] = ()) -> "Token":
        return cls("word", text, tuple(sorted(set(flags))))

    @classmethod
    def adhesion(cls) -> "Token":
        return cls("adhesion")

    @property
    def chars(self) -> list[tuple[str, bool]]:
        flagged = set(self.flags)
        return [(ch, i in flagged) for i, ch in enumerate(self.text)]

    def serialize(self) -> str:
        if self.kind == "adhesion":
            return ADHESION
        if not self.flags:
            return self.text
        flagged = set(self.flags)
        return "".join(f"[[{ch}]]" if i in flagged else ch for i, ch in enumerate(self.text))

    def masked(self) -> str:
        """Token text with anomalous characters replaced by the sentinel."""
        if self.kind == "adhesion":
            return SENTINEL
        if not self.flags:
            return self.text
        chars = list(self.text)
        for i in self.flags:
            chars[i] = SENTINEL
        return "".join(chars)


@dataclass(frozen=True)
class MarkedTranscript:
    tokens: tuple[Token, ...]
    language: Language

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "language", Language.coerce(self.language))

    def serialize(self) -> str:
        return " ".join(t.serialize() for t in self.tokens)

    def __str__(self) -> str:
        return self.serialize()

    def units(self) -> list[str]:
        """Scoring units with anomalous characters masked by the sentinel.

        English units are whole words. Chinese words are further split so that
        every CJK character is its own unit, mirroring :func:`tokenize`.
        Adhesion placeholders become a single sentinel unit.
        """
        if self.language is Language.EN:
            return [t.text if t.kind == "word" and not t.flags else t.masked() for t in self.tokens]
        out = []
        for t in self.tokens:
            if t.kind == "adhesion":
                out.append(SENTINEL)
                continue
            masked = t.masked()
            if not t.flags:
                out.extend(_ZH_UNIT.findall(masked))
                continue
            # split on the original characters so a masked CJK char stays alone
            for m in _ZH_UNIT.finditer(t.text):
                out.append(masked[m.start():m.end()])
        return out


def _byte_offset(raw: str, index: int) -> int:
    return len(raw[:index].encode("utf-8"))


_VALID_WORD = re.compile(f"(?:[^\\[\\]{SENTINEL}]|\\[\\[[^\\[\\]{SENTINEL}]\\]\\])+")
_MARK = re.compile(r"\[\[(.)\]\]", re.S)


def _trusted(kind: str, text: str = "", flags: tuple[int, ...] = ()) -> Token:
    # the regexes in parse_marked already enforce Token's invariants
    tok = object.__new__(Token)
    tok.__dict__.update(kind=kind, text=text, flags=flags)
    return tok


def parse_marked(raw: str, language: Language | str) -> MarkedTranscript:
    """Parse an inline marked string into a :class:`MarkedTranscript`."""
    language = Language.coerce(language)
    words = raw.split()
    if "[" not in raw and "]" not in raw and SENTINEL not in raw:
        return MarkedTranscript(tuple(_trusted("word", w) for w in words), language)
    tokens = []
    for w in words:
        if "[" not in w and "]" not in w and SENTINEL not in w:
            tokens.append(_trusted("word", w))
            continue
        if not _VALID_WORD.fullmatch(w):
            return _scan(raw, language)  # reports the first error with its offset
        if w == ADHESION:
            tokens.append(_trusted("adhesion"))
            continue
        parts = _MARK.split(w)
        text, flags, pos = [], [], 0
        for k, part in enumerate(parts):
            if k % 2:
                flags.append(pos)
            text.append(part)
            pos += len(part)
        tokens.append(_trusted("word", "".join(text), tuple(flags)))
    return MarkedTranscript(tuple(tokens), language)


def _scan(raw: str, language: Language) -> MarkedTranscript:
    tokens: list[Token] = []
    n = len(raw)
    i = 0
    while i < n:
        if raw[i].isspace():
            i += 1
            continue
        start = i
        chars: list[str] = []
        flags: list[int] = []
        adhesion = False
        while i < n and not raw[i].isspace():
            ch = raw[i]
            if raw.startswith("[[", i):
                j = i + 2
                while j < n and not raw[j].isspace() and not raw.startswith("]]", j):
                    if raw.startswith("[[", j):
                        raise MarkedTextError("nested marker", _byte_offset(raw, j))
                    j += 1
                if not raw.startswith("]]", j):
                    raise MarkedTextError("unbalanced marker bracket", _byte_offset(raw, i))
                inner = raw[i + 2:j]
                if not inner:
                    raise MarkedTextError("empty marker", _byte_offset(raw, i))
                if len(inner) > 1:
                    raise MarkedTextError("marker wraps more than one character", _byte_offset(raw, i))
                if inner in _RESERVED:
                    raise MarkedTextError(f"reserved character {inner!r} inside marker", _byte_offset(raw, i + 2))
                end = j + 2
                standalone = i == start and (end == n or raw[end].isspace())
                if inner == "#" and standalone:
                    adhesion = True
                else:
                    flags.append(len(chars))
                    chars.append(inner)
                i = end
                continue
            if ch in "[]":
                raise MarkedTextError("unbalanced marker bracket", _byte_offset(raw, i))
            if ch == SENTINEL:
                raise MarkedTextError("sentinel character is reserved", _byte_offset(raw, i))
            chars.append(ch)
            i += 1
        tokens.append(Token.adhesion() if adhesion else Token("word", "".join(chars), tuple(flags)))
    return MarkedTranscript(tuple(tokens), language)


def anomaly_counts(t: MarkedTranscript) -> tuple[int, int]:
    """Return ``(anomalous, total)`` character counts; adhesion counts as (1, 1)."""
    n_a = n_p = 0
    for tok in t.tokens:
        if tok.kind == "adhesion":
            n_a += 1
            n_p += 1
        else:
            n_a += len(tok.flags)
            n_p += len(tok.text)
    return n_a, n_p


def tokenize(raw_plain: str, language: Language | str) -> list[str]:
    """Split marker-free text into scoring units.

    English splits on whitespace. Chinese emits each CJK character as its own
    unit and keeps contiguous non-CJK runs (digits, Latin) together.
    """
    if Language.coerce(language) is Language.EN:
        return raw_plain.split()
    return _ZH_UNIT.findall(raw_plain)


def strip_markers(t: MarkedTranscript) -> str:
    return " ".join(tok.masked() for tok in t.tokens)


def is_cjk(ch: str) -> bool:
    return bool(_CJK_CHAR.fullmatch(ch))


def from_chars(words: Sequence[Sequence[tuple[str, bool]]], language: Language | str) -> MarkedTranscript:
    """Build a transcript from per-character ``(char, anomalous)`` lists."""
    toks = []
    for w in words:
        text = "".join(c for c, _ in w)
        toks.append(Token.word(text, [i for i, (_, bad) in enumerate(w) if bad]))
    return MarkedTranscript(tuple(toks), language)
