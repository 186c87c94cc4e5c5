"""Document records flowing through the stream."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Document:
    """One timestamped bag-of-words observation."""

    id: int
    t: float
    tokens: tuple

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(int(w) for w in self.tokens))


@dataclass(frozen=True)
class LabeledDocument(Document):
    """Document with generation ground truths.

    text_cluster is the vocabulary the tokens were drawn from; time_cluster is
    the point process that produced the timestamp. They coincide unless the
    corpus was decorrelated.
    """

    text_cluster: int = 0
    time_cluster: int = 0
