from .base import (SUM_TOLERANCE, CategoryDistribution, ClassifierBackend,
                   softmax)
from .lexical import (DEFAULT_LEXICON_BIAS, DEFAULT_LEXICON_TEMPERATURE,
                      LexicalBackend, Lexicon, default_lexicon,
                      lexical_classify, load_lexicon, save_lexicon)
from .remote import RemoteBackend, remote_classify
from .tokenizer import (CLS_TOKEN, MARKER_TOKENS, PAD_TOKEN, SEP_TOKEN,
                        UNK_TOKEN, WordPieceTokenizer, load_vocab)
from .transformer import (ModelArtifacts, TransformerBackend, load_artifacts,
                          transformer_classify)

__all__ = [
    "SUM_TOLERANCE", "CategoryDistribution", "ClassifierBackend", "softmax",
    "DEFAULT_LEXICON_BIAS", "DEFAULT_LEXICON_TEMPERATURE", "LexicalBackend",
    "Lexicon", "default_lexicon", "lexical_classify", "load_lexicon",
    "save_lexicon", "RemoteBackend", "remote_classify", "CLS_TOKEN",
    "MARKER_TOKENS", "PAD_TOKEN", "SEP_TOKEN", "UNK_TOKEN",
    "WordPieceTokenizer", "load_vocab", "ModelArtifacts",
    "TransformerBackend", "load_artifacts", "transformer_classify",
]
