"""Corpus ingestion and the on-disk store for documents, authors and derived artifacts.

The store is a single directory of deterministic record files plus side
indexes; no database process. After ingestion it is immutable and safe for
concurrent readers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import NotFoundError, RecordFormatError, StageError
from .textutil import escape_field, normalize, unescape_field

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"

DOC_KINDS = ("thesis", "paper", "profile_page", "course_page", "other")


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str
    author_ids: tuple[str, ...]
    doc_kind: str = "other"


@dataclass(frozen=True)
class Author:
    author_id: str
    display_name: str


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int
    n_authors: int
    n_associations: int
    docs_with_author: int


def _parse_document_line(path, line_no, line) -> Document:
    parts = line.split("\t")
    if len(parts) != 5:
        raise RecordFormatError(path, line_no, f"expected 5 tab-separated fields, got {len(parts)}")
    doc_id, title, body, authors_field, doc_kind = parts
    if not doc_id or any(ch.isspace() for ch in doc_id):
        raise RecordFormatError(path, line_no, f"bad doc_id {doc_id!r}")
    if doc_kind not in DOC_KINDS:
        raise RecordFormatError(path, line_no, f"unknown doc_kind {doc_kind!r}")
    title = normalize(unescape_field(title))
    body = normalize(unescape_field(body))
    if not body:
        raise RecordFormatError(path, line_no, f"document {doc_id} has an empty body")
    author_ids = tuple(a for a in authors_field.split(";") if a)
    if len(set(author_ids)) != len(author_ids):
        raise RecordFormatError(path, line_no, f"document {doc_id} lists a duplicate author")
    return Document(doc_id, title, body, author_ids, doc_kind)


def _parse_author_line(path, line_no, line) -> Author:
    parts = line.split("\t")
    if len(parts) != 2:
        raise RecordFormatError(path, line_no, f"expected 2 tab-separated fields, got {len(parts)}")
    author_id, display_name = parts
    if not author_id or any(ch.isspace() for ch in author_id):
        raise RecordFormatError(path, line_no, f"bad author_id {author_id!r}")
    return Author(author_id, normalize(unescape_field(display_name)))


class CorpusStore:
    """Document/author records persisted under a store directory.

    Ingestion is single-writer and idempotent: ingesting identical files twice
    produces byte-identical record files.
    """

    def __init__(self, store_dir: str | Path):
        self.store_dir = Path(store_dir)
        self._documents: dict[str, Document] = {}
        self._authors: dict[str, Author] = {}
        self._author_docs: dict[str, list[str]] = {}

    # -- paths ---------------------------------------------------------------

    @property
    def _documents_path(self) -> Path:
        return self.store_dir / "documents.tsv"

    @property
    def _authors_path(self) -> Path:
        return self.store_dir / "authors.tsv"

    @property
    def _version_path(self) -> Path:
        return self.store_dir / "VERSION"

    # -- ingestion -----------------------------------------------------------

    def ingest(self, documents_path: str | Path, authors_path: str | Path) -> CorpusStats:
        """Read the corpus input files, validate, normalize and persist them."""
        authors: dict[str, Author] = {}
        with open(authors_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                author = _parse_author_line(authors_path, line_no, line)
                if author.author_id in authors:
                    raise RecordFormatError(authors_path, line_no, f"duplicate author_id {author.author_id}")
                authors[author.author_id] = author

        documents: dict[str, Document] = {}
        with open(documents_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                doc = _parse_document_line(documents_path, line_no, line)
                if doc.doc_id in documents:
                    raise RecordFormatError(documents_path, line_no, f"duplicate doc_id {doc.doc_id}")
                for aid in doc.author_ids:
                    if aid not in authors:
                        raise RecordFormatError(
                            documents_path, line_no,
                            f"document {doc.doc_id} references unknown author_id {aid}")
                documents[doc.doc_id] = doc

        self._documents = documents
        self._authors = authors
        self._rebuild_side_index()
        self._persist()
        stats = self.stats()
        log.info("ingested %d documents, %d authors, %d associations",
                 stats.n_documents, stats.n_authors, stats.n_associations)
        return stats

    def _rebuild_side_index(self) -> None:
        index: dict[str, list[str]] = {aid: [] for aid in self._authors}
        for doc in self._documents.values():
            for aid in doc.author_ids:
                index[aid].append(doc.doc_id)
        self._author_docs = {aid: sorted(doc_ids) for aid, doc_ids in index.items()}

    def _persist(self) -> None:
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self._version_path.write_text(FORMAT_VERSION + "\n", encoding="utf-8")
        with open(self._documents_path, "w", encoding="utf-8") as fh:
            for doc in self._documents.values():
                fh.write("\t".join([
                    doc.doc_id,
                    escape_field(doc.title),
                    escape_field(doc.body),
                    ";".join(doc.author_ids),
                    doc.doc_kind,
                ]) + "\n")
        with open(self._authors_path, "w", encoding="utf-8") as fh:
            for author in self._authors.values():
                fh.write(f"{author.author_id}\t{escape_field(author.display_name)}\n")

    def load(self) -> CorpusStats:
        """Re-open a previously persisted store."""
        if not self._documents_path.exists() or not self._authors_path.exists():
            raise StageError(f"no ingested corpus under {self.store_dir}; run `index build` first",
                             stage="index build")
        version = self._version_path.read_text(encoding="utf-8").strip()
        if version != FORMAT_VERSION:
            raise StageError(f"store format version {version!r} != {FORMAT_VERSION!r}; re-run `index build`",
                             stage="index build")
        self._authors = {}
        with open(self._authors_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                author = _parse_author_line(self._authors_path, line_no, line)
                self._authors[author.author_id] = author
        self._documents = {}
        with open(self._documents_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                doc = _parse_document_line(self._documents_path, line_no, line)
                self._documents[doc.doc_id] = doc
        self._rebuild_side_index()
        return self.stats()

    # -- read API ------------------------------------------------------------

    def stats(self) -> CorpusStats:
        n_assoc = sum(len(d.author_ids) for d in self._documents.values())
        with_author = sum(1 for d in self._documents.values() if d.author_ids)
        return CorpusStats(len(self._documents), len(self._authors), n_assoc, with_author)

    def documents_of(self, author_id: str) -> list[Document]:
        """All documents listing `author_id`, in doc_id order."""
        if author_id not in self._authors:
            raise NotFoundError(f"unknown author_id {author_id!r}")
        return [self._documents[d] for d in self._author_docs.get(author_id, [])]

    def document(self, doc_id: str) -> Document:
        try:
            return self._documents[doc_id]
        except KeyError:
            raise NotFoundError(f"unknown doc_id {doc_id!r}") from None

    def author(self, author_id: str) -> Author:
        try:
            return self._authors[author_id]
        except KeyError:
            raise NotFoundError(f"unknown author_id {author_id!r}") from None

    def has_author(self, author_id: str) -> bool:
        return author_id in self._authors

    def iter_documents(self):
        return iter(self._documents.values())

    def iter_authors(self):
        return iter(self._authors.values())

    @property
    def author_ids(self) -> list[str]:
        return sorted(self._authors)
