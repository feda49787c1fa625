"""Rule-based matchers and the mention-type to entity-type mapper."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from ..errors import FormatError
from ..kg_store import AttributeEntity
from ..text_norm import DEFAULT_CONFIG, NormConfig, normalize_phrase


@dataclass(frozen=True)
class TypeMapper:
    """Which entity attribute types a mention type may link to."""

    allowed: dict[str, frozenset[str]] = field(default_factory=dict)

    def allowed_types(self, mention_type: str) -> frozenset[str]:
        return self.allowed.get(mention_type, frozenset())

    def allows(self, mention_type: str, attr_type: str) -> bool:
        return attr_type in self.allowed_types(mention_type)

    @classmethod
    def from_dict(cls, d) -> "TypeMapper":
        if not isinstance(d, dict) or not all(
            isinstance(v, list) and all(isinstance(x, str) for x in v) for v in d.values()
        ):
            raise FormatError("type mapper must be a JSON object of string lists")
        return cls({k: frozenset(v) for k, v in d.items()})

    def to_dict(self):
        return {k: sorted(v) for k, v in sorted(self.allowed.items())}

    @classmethod
    def load(cls, path) -> "TypeMapper":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None

    @classmethod
    def default(cls) -> "TypeMapper":
        text = resources.files("attrlink").joinpath("data/type_mapper.json").read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))


def _mention_tokens(mention, cfg):
    surface = getattr(mention, "surface", mention)
    return tuple(normalize_phrase(surface, cfg))


def exact_match(mention, entity: AttributeEntity, cfg: NormConfig = DEFAULT_CONFIG) -> bool:
    """Normalized mention tokens equal the entity's normalized label tokens."""
    tokens = _mention_tokens(mention, cfg)
    return bool(tokens) and tokens == tuple(entity.norm_tokens)


def contains_run(haystack, needle) -> bool:
    n = len(needle)
    if n == 0:
        return False
    return any(tuple(haystack[i:i + n]) == tuple(needle) for i in range(len(haystack) - n + 1))


def sub_match(mention, entity: AttributeEntity, cfg: NormConfig = DEFAULT_CONFIG) -> bool:
    """Entity label tokens occur as a contiguous run inside the mention tokens.

    Links may go to a broader entity ("pink" for "bright pink") but never to
    a narrower one.
    """
    return contains_run(_mention_tokens(mention, cfg), entity.norm_tokens)
