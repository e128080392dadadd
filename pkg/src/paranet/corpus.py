"""Text ingestion, segmentation, shuffled null models and transcription voting."""
from __future__ import annotations

import json
import random
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

RT, SW, SS = "RT", "SW", "SS"
KINDS = (RT, SW, SS)


class CorpusError(ValueError):
    """Raised for malformed or unusable input text."""


class EmptyDocumentError(CorpusError):
    pass


class DocumentTooShortError(CorpusError):
    def __init__(self, doc_id: str, available: int, required: int):
        self.doc_id = doc_id
        self.available = available
        self.required = required
        super().__init__(
            f"document too short: {doc_id!r} has {available} paragraphs, {required} required"
        )


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str
    language: str | None = None
    dataset_label: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise EmptyDocumentError(f"empty document: {self.id!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Paragraph:
    index: int
    sentences: tuple[Sentence, ...]

    @property
    def tokens(self) -> list[str]:
        return [t for s in self.sentences for t in s.tokens]

    def __len__(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass(frozen=True)
class Document:
    id: str
    kind: str
    paragraphs: tuple[Paragraph, ...]
    sample_index: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown document kind {self.kind!r}")
        if self.kind == RT and self.sample_index is not None:
            raise ValueError("RT documents carry no sample index")
        if not self.paragraphs:
            raise EmptyDocumentError(f"empty document: {self.id!r}")

    @property
    def tokens(self) -> list[str]:
        return [t for p in self.paragraphs for t in p.tokens]

    @property
    def sentences(self) -> list[Sentence]:
        return [s for p in self.paragraphs for s in p.sentences]


@dataclass(frozen=True)
class TranscriptionLineSet:
    variants: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.variants:
            raise ValueError("transcription line needs at least one variant")


_BLANK_RUN = re.compile(r"\n[ \t\f\v]*(?:\n[ \t\f\v]*)+")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def segment_paragraphs(text: str) -> list[str]:
    """Split text into paragraph blocks separated by one or more blank lines."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    blocks = [b.strip() for b in _BLANK_RUN.split(text)]
    blocks = [b for b in blocks if b]
    if not blocks:
        raise EmptyDocumentError("empty document")
    return blocks


def split_sentences(block: str) -> list[str]:
    """Split at '.', '!' or '?' followed by whitespace; terminators stay attached."""
    parts = [p.strip() for p in _SENTENCE_END.split(block.strip())]
    return [p for p in parts if p]


def tokenize(text: str) -> list[str]:
    tokens = []
    current: list[str] = []
    for ch in text.lower():
        if unicodedata.category(ch).startswith("L"):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


def parse_document(raw: RawDocument) -> Document:
    """Build an RT document; sentences and paragraphs without letters are dropped."""
    paragraphs = []
    for block in segment_paragraphs(raw.text):
        sentences = []
        for s in split_sentences(block):
            tokens = tokenize(s)
            if tokens:
                sentences.append(Sentence(tuple(tokens)))
        if sentences:
            paragraphs.append(Paragraph(len(paragraphs), tuple(sentences)))
    if not paragraphs:
        raise EmptyDocumentError(f"empty document: {raw.id!r}")
    return Document(raw.id, RT, tuple(paragraphs))


def _require_rt(doc: Document):
    if doc.kind != RT:
        raise ValueError(f"shuffling expects an RT document, got {doc.kind}")


def shuffle_words(doc: Document, seed: int, sample_index: int = 0) -> Document:
    """Permute all tokens of the document and re-slice into the original paragraph lengths.

    Each shuffled paragraph holds a single pseudo-sentence.
    """
    _require_rt(doc)
    tokens = doc.tokens
    random.Random(seed).shuffle(tokens)
    paragraphs = []
    pos = 0
    for p in doc.paragraphs:
        size = len(p)
        paragraphs.append(Paragraph(p.index, (Sentence(tuple(tokens[pos:pos + size])),)))
        pos += size
    return Document(doc.id, SW, tuple(paragraphs), sample_index=sample_index)


def shuffle_sentences(doc: Document, seed: int, sample_index: int = 0) -> Document:
    """Permute whole sentences across the document, keeping sentences-per-paragraph."""
    _require_rt(doc)
    sentences = doc.sentences
    random.Random(seed).shuffle(sentences)
    paragraphs = []
    pos = 0
    for p in doc.paragraphs:
        size = len(p.sentences)
        paragraphs.append(Paragraph(p.index, tuple(sentences[pos:pos + size])))
        pos += size
    return Document(doc.id, SS, tuple(paragraphs), sample_index=sample_index)


def truncate_paragraphs(doc: Document, n: int) -> Document:
    if len(doc.paragraphs) < n:
        raise DocumentTooShortError(doc.id, len(doc.paragraphs), n)
    return Document(doc.id, doc.kind, doc.paragraphs[:n], sample_index=doc.sample_index)


def vote_transcription(lines: Sequence[TranscriptionLineSet]) -> str:
    """Merge transcriber variants line by line by per-position majority.

    The voted line takes the most common variant length (ties go to the
    first variant's length). Each position takes the most frequent
    character among variants covering it; ties go to the earliest variant.
    """
    if not lines:
        raise ValueError("no transcription lines")
    return "\n".join(_vote_line(line.variants) for line in lines)


def _vote_line(variants: Sequence[str]) -> str:
    length = _plurality([len(v) for v in variants])
    out = []
    for pos in range(length):
        out.append(_plurality([v[pos] for v in variants if len(v) > pos]))
    return "".join(out)


def _plurality(values: list):
    counts = Counter(values)
    best = max(counts.values())
    # first occurrence wins ties
    return next(v for v in values if counts[v] == best)


def read_transcription(path: str | Path, delimiter: str = "\t") -> list[TranscriptionLineSet]:
    lines = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.rstrip("\r\n")
            if not raw.strip():
                continue
            lines.append(TranscriptionLineSet(tuple(raw.split(delimiter))))
    return lines


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: Path
    language: str | None
    dataset_label: str

    def load(self) -> RawDocument:
        text = self.path.read_text(encoding="utf-8")
        return RawDocument(self.id, text, self.language, self.dataset_label)


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read a JSON manifest; document paths are resolved relative to it.

    Accepts either a list of entries or ``{"documents": [...]}``.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("documents")
    if not isinstance(data, list):
        raise CorpusError(f"{path}: manifest must list documents")
    entries = []
    seen = set()
    for item in data:
        try:
            doc_id = str(item["id"])
            doc_path = Path(item["path"])
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"{path}: manifest entry missing id/path: {item!r}") from exc
        if doc_id in seen:
            raise CorpusError(f"{path}: duplicate document id {doc_id!r}")
        if not re.fullmatch(r"[\w\-]+", doc_id):
            raise CorpusError(f"{path}: document id {doc_id!r} must be alphanumeric, '_' or '-'")
        seen.add(doc_id)
        if not doc_path.is_absolute():
            doc_path = path.parent / doc_path
        entries.append(ManifestEntry(doc_id, doc_path, item.get("language"),
                                     str(item.get("dataset_label", ""))))
    return entries


def token_multiset(doc: Document) -> Counter:
    return Counter(doc.tokens)


def sentence_multiset(docs: Iterable[Sentence]) -> Counter:
    return Counter(s.tokens for s in docs)
