"""Emojinize: LLM-driven text-to-emoji translation and its cloze-test evaluation."""

__version__ = "0.1.0"
