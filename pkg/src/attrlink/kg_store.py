"""Attribute-entity catalog, product corpus and enrichment triples."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DuplicateIdError, FormatError, UnknownEntityError
from .text_norm import DEFAULT_CONFIG, NormConfig, normalize_phrase

DEFAULT_PREDICATE = ":hasAttribute"
_FIELDS = ("id", "label", "attr_type")
_NT_LINE = re.compile(r"^<([^>]+)> <([^>]+)> <([^>]+)> \.$")


@dataclass(frozen=True)
class AttributeEntity:
    id: str
    label: str
    attr_type: str
    norm_tokens: tuple[str, ...] = ()

    @classmethod
    def make(cls, id, label, attr_type, cfg=DEFAULT_CONFIG):
        if not id:
            raise FormatError("entity id must be non-empty")
        return cls(id, label, attr_type, tuple(normalize_phrase(label, cfg)))


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        if not (self.subject and self.predicate and self.object):
            raise ValueError(f"triple fields must be non-empty: {self!r}")

    def to_ntriples(self) -> str:
        return f"<{self.subject}> <{self.predicate}> <{self.object}> ."


@dataclass(frozen=True)
class ProductRecord:
    id: str
    description: str = ""


@dataclass
class Catalog:
    entities: list[AttributeEntity] = field(default_factory=list)
    cfg: NormConfig = DEFAULT_CONFIG

    def __post_init__(self):
        self.by_id: dict[str, AttributeEntity] = {}
        self.by_type: dict[str, list[AttributeEntity]] = {}
        for e in self.entities:
            if e.id in self.by_id:
                raise DuplicateIdError(f"duplicate entity id {e.id!r}")
            self.by_id[e.id] = e
            self.by_type.setdefault(e.attr_type, []).append(e)

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, str]], cfg: NormConfig = DEFAULT_CONFIG):
        return cls([AttributeEntity.make(i, l, t, cfg) for i, l, t in records], cfg)

    def __len__(self):
        return len(self.entities)

    def __contains__(self, entity_id):
        return entity_id in self.by_id

    def __getitem__(self, entity_id) -> AttributeEntity:
        try:
            return self.by_id[entity_id]
        except KeyError:
            raise UnknownEntityError(f"unknown entity id {entity_id!r}") from None

    @property
    def attr_types(self) -> list[str]:
        return sorted(self.by_type)


def _infer_format(path):
    return "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"


def _read_tsv(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
            yield parts


def _read_jsonl(path, fields):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            if not isinstance(obj, dict):
                raise FormatError(f"{path}:{lineno}: expected a JSON object")
            missing = [f for f in fields if not isinstance(obj.get(f), str)]
            if missing:
                raise FormatError(f"{path}:{lineno}: missing or non-string field(s) {missing}")
            yield [obj[f] for f in fields]


def load_catalog(path, fmt: str | None = None, cfg: NormConfig = DEFAULT_CONFIG) -> Catalog:
    """Load an entity catalog from TSV (``id<TAB>label<TAB>attr_type``) or JSONL."""
    fmt = fmt or _infer_format(path)
    if fmt == "tsv":
        rows = _read_tsv(path)
    elif fmt == "jsonl":
        rows = _read_jsonl(path, _FIELDS)
    else:
        raise ValueError(f"unknown catalog format {fmt!r}")
    return Catalog.from_records(rows, cfg)


def save_catalog(catalog: Catalog, path, fmt: str | None = None) -> None:
    fmt = fmt or _infer_format(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in catalog.entities:
            if fmt == "tsv":
                if any(c in s for s in (e.id, e.label, e.attr_type) for c in "\t\n\r"):
                    raise FormatError(f"entity {e.id!r} cannot be stored as TSV; use JSONL")
                fh.write(f"{e.id}\t{e.label}\t{e.attr_type}\n")
            else:
                fh.write(json.dumps({"id": e.id, "label": e.label, "attr_type": e.attr_type}, ensure_ascii=False) + "\n")


def load_products(path) -> list[ProductRecord]:
    products = [ProductRecord(i, d) for i, d in _read_jsonl(path, ("id", "description"))]
    seen = set()
    for p in products:
        if p.id in seen:
            raise DuplicateIdError(f"duplicate product id {p.id!r}")
        seen.add(p.id)
    return products


def emit_triples(product: ProductRecord, links, catalog: Catalog, predicate: str = DEFAULT_PREDICATE) -> list[Triple]:
    """One triple per non-NIL decision, in mention order, de-duplicated."""
    out, seen = [], set()
    for d in links:
        if d.outcome is None:
            continue
        entity = catalog[d.outcome]
        t = Triple(product.id, predicate, entity.id)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def write_triples(triples: Iterable[Triple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in triples:
            fh.write(t.to_ntriples() + "\n")


def read_triples(path) -> list[Triple]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        m = _NT_LINE.match(line)
        if m is None:
            raise FormatError(f"bad N-Triples line: {line!r}")
        out.append(Triple(*m.groups()))
    return out
