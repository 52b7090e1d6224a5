"""WordPiece subword tokenizer.

Greedy longest-match-first tokenization over a line-per-token vocabulary,
the scheme used by uncased BERT-style encoders. Continuation pieces carry
the "##" prefix in the vocab.
"""
from __future__ import annotations

import unicodedata
from pathlib import Path

from ..errors import VocabMissingMarkers

CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
UNK_TOKEN = "[UNK]"
PAD_TOKEN = "[PAD]"
MARKER_TOKENS = (CLS_TOKEN, SEP_TOKEN, UNK_TOKEN, PAD_TOKEN)


def load_vocab(path: str | Path) -> dict[str, int]:
    """One token per line; id = line number. Blank trailing lines ignored."""
    vocab: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for idx, line in enumerate(fh):
            token = line.rstrip("\n")
            if token:
                vocab[token] = idx
    return vocab


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") or ch in "$+<=>^`|~"


def basic_tokens(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace split with punctuation broken out into single-char tokens."""
    if lowercase:
        text = text.lower()
    tokens: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch.isspace():
            if current:
                tokens.append("".join(current))
                current = []
        elif _is_punctuation(ch):
            if current:
                tokens.append("".join(current))
                current = []
            tokens.append(ch)
        else:
            current.append(ch)
    if current:
        tokens.append("".join(current))
    return tokens


class WordPieceTokenizer:
    def __init__(self, vocab: dict[str, int], max_seq_len: int = 128,
                 lowercase: bool = True):
        missing = [m for m in MARKER_TOKENS if m not in vocab]
        if missing:
            raise VocabMissingMarkers(
                f"vocabulary lacks marker tokens: {', '.join(missing)}")
        if max_seq_len < 3:
            raise ValueError("max_seq_len must fit both markers plus content")
        self.vocab = vocab
        self.max_seq_len = max_seq_len
        self.lowercase = lowercase
        self.cls_id = vocab[CLS_TOKEN]
        self.sep_id = vocab[SEP_TOKEN]
        self.unk_id = vocab[UNK_TOKEN]
        self.pad_id = vocab[PAD_TOKEN]

    def wordpiece(self, word: str) -> list[str]:
        """Greedy longest-match-first split; whole word -> [UNK] on any gap."""
        pieces: list[str] = []
        start = 0
        while start < len(word):
            end = len(word)
            piece = None
            while start < end:
                candidate = word[start:end]
                if start > 0:
                    candidate = "##" + candidate
                if candidate in self.vocab:
                    piece = candidate
                    break
                end -= 1
            if piece is None:
                return [UNK_TOKEN]
            pieces.append(piece)
            start = end
        return pieces

    def tokens(self, text: str) -> list[str]:
        out: list[str] = []
        for word in basic_tokens(text, self.lowercase):
            out.extend(self.wordpiece(word))
        return out

    def encode(self, text: str) -> tuple[list[int], list[int]]:
        """Token ids and attention mask, both exactly max_seq_len long.

        Layout: [CLS] subwords [SEP] [PAD]...; subwords are truncated so the
        two markers always survive.
        """
        ids = [self.vocab.get(tok, self.unk_id) for tok in self.tokens(text)]
        ids = ids[: self.max_seq_len - 2]
        ids = [self.cls_id] + ids + [self.sep_id]
        mask = [1] * len(ids)
        pad = self.max_seq_len - len(ids)
        ids.extend([self.pad_id] * pad)
        mask.extend([0] * pad)
        return ids, mask

    def encode_batch(self, texts) -> tuple[list[list[int]], list[list[int]]]:
        all_ids, all_masks = [], []
        for text in texts:
            ids, mask = self.encode(text)
            all_ids.append(ids)
            all_masks.append(mask)
        return all_ids, all_masks
