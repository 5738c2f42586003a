"""Pennant-diagram engine: co-mention indexes, logged tf*idf scoring, rendering."""

from ._core import (
    CoMentionIndex,
    ConfigError,
    CorruptIndexError,
    DocumentRecord,
    DomainError,
    EmptyCorpusError,
    INDEX_FORMAT_VERSION,
    IngestReport,
    IoError,
    Mode,
    PennantConfig,
    PennantDiagram,
    PennantError,
    PennantPoint,
    Sector,
    SeedNotFoundError,
    UnsupportedVersionError,
    build_index,
    build_pennant,
    emit_json,
    index_from_bytes,
    load_index,
    normalize_id,
    parse_corpus,
    parse_corpus_file,
    score,
)

__all__ = [name for name in dir() if not name.startswith("_")]
