"""Attribute catalog: the ordered name-to-column mapping every matrix shares."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import WorkloadFormatError


@dataclass(frozen=True)
class AttributeCatalog:
    """Ordered list of canonical attribute names; index = column position.

    database_attribute_count is the optional total number of attributes in
    the database (the M behind the n/M coverage ratio); it is context only
    and never constrains which attributes appear in queries.
    """

    attributes: tuple[str, ...]
    database_attribute_count: int | None = None

    def __post_init__(self):
        if not self.attributes:
            raise WorkloadFormatError("catalog has no attributes")
        folded = [a.casefold() for a in self.attributes]
        if any(not a for a in self.attributes):
            raise WorkloadFormatError("catalog contains an empty attribute name")
        if len(set(folded)) != len(folded):
            dup = next(a for a in folded if folded.count(a) > 1)
            raise WorkloadFormatError(f"duplicate attribute name (case-insensitive): {dup!r}")
        if self.database_attribute_count is not None and len(self.attributes) > self.database_attribute_count:
            raise WorkloadFormatError(
                f"catalog lists {len(self.attributes)} attributes but M={self.database_attribute_count}"
            )

    def __len__(self) -> int:
        return len(self.attributes)

    @cached_property
    def _by_name(self) -> dict[str, int]:
        return {a.casefold(): i for i, a in enumerate(self.attributes)}

    @cached_property
    def _by_suffix(self) -> dict[str, int | None]:
        # bare column name -> index for dotted entries; None marks an ambiguous suffix
        table: dict[str, int | None] = {}
        for i, a in enumerate(self.attributes):
            folded = a.casefold()
            if "." in folded:
                suffix = folded.rsplit(".", 1)[1]
                table[suffix] = None if suffix in table else i
        return table

    def lookup(self, folded_name: str) -> int | None:
        return self._by_name.get(folded_name)

    def lookup_suffix(self, folded_name: str) -> int | None:
        return self._by_suffix.get(folded_name)

    def index_of(self, name: str) -> int | None:
        """Index for a user-supplied name, case-insensitively."""
        return self._by_name.get(name.casefold())

    def subset(self, indices: list[int]) -> AttributeCatalog:
        """New catalog keeping only `indices`, original relative order."""
        return AttributeCatalog(
            attributes=tuple(self.attributes[i] for i in indices),
            database_attribute_count=self.database_attribute_count,
        )


def load_catalog(path: str | Path) -> AttributeCatalog:
    """Read a catalog file: one attribute name per line, order significant.

    An optional first line "M=<integer>" declares the database-wide
    attribute count. Blank lines are skipped.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise WorkloadFormatError(f"cannot read catalog {path}: {exc.strerror or exc}") from exc
    names: list[str] = []
    count: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if lineno == 1 and line.startswith("M="):
            try:
                count = int(line[2:])
            except ValueError:
                raise WorkloadFormatError(f"bad M= header: {line!r}", lineno) from None
            if count < 0:
                raise WorkloadFormatError(f"M must be non-negative, got {count}", lineno)
            continue
        names.append(line)
    if not names:
        raise WorkloadFormatError("catalog has no attributes")
    return AttributeCatalog(tuple(names), count)
