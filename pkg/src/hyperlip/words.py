"""Words are plain tuples of symbols; a word's level is its length.

Symbols are usually small integers.  Telescoped graphs use tuples of
integers as symbols (one block of ``k`` original symbols per level).
"""

from __future__ import annotations

from typing import Hashable, Sequence, Tuple

Word = Tuple[Hashable, ...]

ROOT: Word = ()


def parent(word: Word) -> Word:
    return word[:-1]


def _symbol_str(symbol) -> str:
    if isinstance(symbol, tuple):
        return "".join(_symbol_str(s) for s in symbol)
    return str(symbol)


def word_str(word: Word) -> str:
    """Render a word: digits concatenated when unambiguous, else dot-joined.

    The root renders as ``"o"``.
    """
    if not word:
        return "o"
    if all(isinstance(s, int) and 0 <= s <= 9 for s in word):
        return "".join(str(s) for s in word)
    return ".".join(_symbol_str(s) for s in word)


def parse_word(text: str, block: int = 1) -> Word:
    """Inverse of :func:`word_str` for integer symbols.

    ``block > 1`` groups digits into tuple symbols of that length, which is
    how telescoped vertices are written ("1112" with block 2 is ((1,1),(1,2))).
    """
    text = text.strip()
    if text in ("", "o", "ε"):
        return ROOT
    if "." in text:
        parts = text.split(".")
    else:
        parts = list(text)
    if block == 1:
        return tuple(int(p) for p in parts)
    if "." in text:
        return tuple(tuple(int(c) for c in p) for p in parts)
    if len(parts) % block:
        raise ValueError(f"word {text!r} is not a multiple of block length {block}")
    return tuple(
        tuple(int(c) for c in parts[i:i + block]) for i in range(0, len(parts), block)
    )


def as_word(value) -> Word:
    """Accept a word given as a tuple, list, or string."""
    if isinstance(value, str):
        return parse_word(value)
    return tuple(value)


def is_prefix(prefix: Sequence, word: Sequence) -> bool:
    return len(prefix) <= len(word) and tuple(word[:len(prefix)]) == tuple(prefix)
