"""Partially annotated NER: corpus construction from Wikipedia-style dumps
and masked-loss sequence tagging."""

__version__ = "0.1.0"
