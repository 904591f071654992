"""Data preparation: embed labeled text and export shufkde data files."""

from .encoders import get_encoder
from .pipeline import EmbedJob, embed_corpus, embed_vocab, read_corpus
from .sample import generate_corpus, topic_terms

__version__ = "0.1.0"
