"""Persistence, document formats, HTTP service and the tapmein CLI."""

from tapmein.gateway.documents import (
    SchemaViolation,
    import_dataset,
    load_population_stats,
    export_dataset,
    dump_population_stats,
)
from tapmein.gateway.store import CorruptRecord, ProfileNotFound, ProfileStore

__all__ = [
    "SchemaViolation",
    "import_dataset",
    "export_dataset",
    "load_population_stats",
    "dump_population_stats",
    "ProfileStore",
    "ProfileNotFound",
    "CorruptRecord",
]
