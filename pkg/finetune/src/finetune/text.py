"""Text pipeline: word splitting, vocabulary, fixed-length encoding.

The exported vocab.txt is consumed by a greedy longest-match subword
tokenizer on the inference side. Keeping every vocabulary entry a whole
word (no continuation pieces) makes that matcher degenerate to exact
whole-word lookup with unknowns collapsing to [UNK], which is precisely
what `Vocabulary.encode` computes here. Training and inference therefore
see identical token ids for any text.
"""
from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
MARKER_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN, SEP_TOKEN)


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") or ch in "$+<=>^`|~"


def split_words(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace split with punctuation broken out into single-char tokens."""
    if lowercase:
        text = text.lower()
    words: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch.isspace():
            if current:
                words.append("".join(current))
                current = []
        elif _is_punctuation(ch):
            if current:
                words.append("".join(current))
                current = []
            words.append(ch)
        else:
            current.append(ch)
    if current:
        words.append("".join(current))
    return words


@dataclass
class Vocabulary:
    """Token table plus the encoding geometry baked into the export."""

    token_ids: dict[str, int]
    max_seq_len: int
    lowercase: bool = True
    pad_id: int = field(init=False)
    unk_id: int = field(init=False)
    cls_id: int = field(init=False)
    sep_id: int = field(init=False)

    def __post_init__(self) -> None:
        missing = [m for m in MARKER_TOKENS if m not in self.token_ids]
        if missing:
            raise ValueError(f"vocabulary lacks marker tokens: {missing}")
        if self.max_seq_len < 8:
            raise ValueError("max_seq_len must be >= 8")
        self.pad_id = self.token_ids[PAD_TOKEN]
        self.unk_id = self.token_ids[UNK_TOKEN]
        self.cls_id = self.token_ids[CLS_TOKEN]
        self.sep_id = self.token_ids[SEP_TOKEN]

    def __len__(self) -> int:
        return len(self.token_ids)

    @classmethod
    def build(cls, texts: Iterable[str], max_seq_len: int,
              max_size: int = 8192, min_freq: int = 2,
              lowercase: bool = True) -> "Vocabulary":
        """Whole-word vocabulary from a text corpus.

        Markers come first so [PAD] lands at id 0; the rest are ordered by
        descending frequency with ties broken alphabetically, which keeps
        builds deterministic for a given corpus.
        """
        counts: Counter[str] = Counter()
        for text in texts:
            counts.update(split_words(text, lowercase))
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        tokens = list(MARKER_TOKENS)
        for token, freq in ranked:
            if len(tokens) >= max_size:
                break
            if freq >= min_freq and token not in MARKER_TOKENS:
                tokens.append(token)
        return cls({tok: idx for idx, tok in enumerate(tokens)},
                   max_seq_len=max_seq_len, lowercase=lowercase)

    def encode(self, text: str) -> tuple[list[int], list[int]]:
        """Token ids and attention mask, both exactly max_seq_len long.

        Layout: [CLS] words [SEP] [PAD]...; words are truncated so the two
        markers always survive.
        """
        ids = [self.token_ids.get(w, self.unk_id)
               for w in split_words(text, self.lowercase)]
        ids = ids[: self.max_seq_len - 2]
        ids = [self.cls_id] + ids + [self.sep_id]
        mask = [1] * len(ids)
        pad = self.max_seq_len - len(ids)
        ids.extend([self.pad_id] * pad)
        mask.extend([0] * pad)
        return ids, mask

    def encode_batch(self, texts: Sequence[str]
                     ) -> tuple[list[list[int]], list[list[int]]]:
        pairs = [self.encode(t) for t in texts]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def save(self, path: str | Path) -> None:
        """One token per line; id = line number."""
        ordered = sorted(self.token_ids, key=self.token_ids.get)
        Path(path).write_text("\n".join(ordered) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, max_seq_len: int,
             lowercase: bool = True) -> "Vocabulary":
        token_ids: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for idx, line in enumerate(fh):
                token = line.rstrip("\n")
                if token:
                    token_ids[token] = idx
        return cls(token_ids, max_seq_len=max_seq_len, lowercase=lowercase)
