"""N-gram language models from subtitle corpora."""

__version__ = "0.1.0"
