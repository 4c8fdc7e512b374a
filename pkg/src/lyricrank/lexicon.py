"""Lexicon bundles: the open format behind every category and scalar feature.

A bundle directory contains ``manifest.txt`` listing lexicon files, one
relative path per line, in schema order.  A category file starts with
``category <name> <family>`` followed by one pattern per line; a scalar
file starts with ``scalar <name>`` followed by ``<token> <value>`` lines.
``#`` begins a comment anywhere a line starts.  Patterns are lowercase,
whitespace-free, and may end in a single ``*`` for prefix (stem) matching,
the usual word-count dictionary convention.

Tokens missing from a scalar lexicon are skipped, not zero-filled, so that
out-of-vocabulary words do not drag means toward zero; coverage is reported
separately by the feature extractor.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

FAMILIES = frozenset({
    "BIBER", "WORDNET", "LCM", "EMOTION_BASIC", "EMOTION_COMPLEX",
    "CONNECTIVE", "LIWC",
})

MANIFEST_NAME = "manifest.txt"


@dataclass
class CategoryLexicon:
    """A named word category matched against tokens by literal or prefix."""

    name: str
    family: str
    entries: frozenset[str]
    literals: frozenset[str] = field(init=False)
    stems: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        self.literals = frozenset(e for e in self.entries if not e.endswith("*"))
        self.stems = tuple(sorted(e[:-1] for e in self.entries if e.endswith("*")))


@dataclass
class ScalarLexicon:
    """A token -> value map (e.g. frequency or familiarity norms)."""

    name: str
    values: dict[str, float]


@dataclass
class LexiconBundle:
    """Ordered category and scalar lexicons; the order is the feature schema."""

    categories: list[CategoryLexicon]
    scalars: list[ScalarLexicon]
    version: str
    schema_hash: str

    def lexicon_names(self) -> list[str]:
        return [c.name for c in self.categories] + [s.name for s in self.scalars]


def matches(lexicon: CategoryLexicon, token: str) -> bool:
    """True iff token equals a literal entry or starts with a prefix stem.

    The token is expected to be lowercase and nonempty (tokenizer output).
    """
    if token in lexicon.literals:
        return True
    for stem in lexicon.stems:
        if token.startswith(stem):
            return True
    return False


def lookup(scalar: ScalarLexicon, token: str) -> float | None:
    """Stored value for the token, or None when absent (skip policy)."""
    return scalar.values.get(token)


def _validate_name(name: str, where: str) -> None:
    if not name or name != name.lower():
        raise ValidationError(f"{where}: lexicon name must be nonempty lowercase, got '{name}'")
    if any(ch.isspace() for ch in name) or "," in name:
        raise ValidationError(f"{where}: lexicon name must not contain whitespace or commas")


def _validate_pattern(pattern: str, where: str) -> None:
    if not pattern:
        raise ValidationError(f"{where}: empty pattern")
    if any(ch.isspace() for ch in pattern):
        raise ValidationError(f"{where}: pattern '{pattern}' contains whitespace")
    if pattern != pattern.lower():
        raise ValidationError(f"{where}: pattern '{pattern}' is not lowercase")
    star = pattern.count("*")
    if star > 1 or (star == 1 and not pattern.endswith("*")):
        raise ValidationError(f"{where}: pattern '{pattern}' has a wildcard outside final position")


def _content_lines(path: Path) -> list[tuple[int, str]]:
    """Non-blank, non-comment lines of a lexicon file with their line numbers."""
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((lineno, line))
    return out


def _load_lexicon_file(path: Path) -> CategoryLexicon | ScalarLexicon:
    lines = _content_lines(path)
    if not lines:
        raise ValidationError(f"{path}: empty lexicon file")
    header_lineno, header = lines[0]
    fields = header.split()
    if fields[0] == "category":
        if len(fields) != 3:
            raise ValidationError(
                f"{path}:{header_lineno}: category header must be 'category <name> <family>'")
        _, name, family = fields
        _validate_name(name, f"{path}:{header_lineno}")
        if family not in FAMILIES:
            raise ValidationError(
                f"{path}:{header_lineno}: unknown family '{family}' "
                f"(expected one of {', '.join(sorted(FAMILIES))})")
        entries = set()
        for lineno, line in lines[1:]:
            _validate_pattern(line, f"{path}:{lineno}")
            entries.add(line)
        return CategoryLexicon(name=name, family=family, entries=frozenset(entries))
    if fields[0] == "scalar":
        if len(fields) != 2:
            raise ValidationError(f"{path}:{header_lineno}: scalar header must be 'scalar <name>'")
        name = fields[1]
        _validate_name(name, f"{path}:{header_lineno}")
        values: dict[str, float] = {}
        for lineno, line in lines[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected '<token> <value>'")
            token, raw_value = parts
            _validate_pattern(token, f"{path}:{lineno}")
            if token.endswith("*"):
                raise ValidationError(f"{path}:{lineno}: scalar tokens must be literal, not prefixes")
            try:
                value = float(raw_value)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad value '{raw_value}'") from None
            if not math.isfinite(value):
                raise ValidationError(f"{path}:{lineno}: value must be finite")
            if token in values:
                raise ValidationError(f"{path}:{lineno}: duplicate token '{token}'")
            values[token] = value
        return ScalarLexicon(name=name, values=values)
    raise ValidationError(
        f"{path}:{header_lineno}: first line must start with 'category' or 'scalar'")


def _bundle_digest(categories: list[CategoryLexicon], scalars: list[ScalarLexicon]) -> str:
    """Content digest over the full bundle, stable across loads."""
    h = hashlib.sha256()
    for cat in categories:
        h.update(f"category|{cat.name}|{cat.family}|".encode())
        h.update(",".join(sorted(cat.entries)).encode())
        h.update(b"\n")
    for sc in scalars:
        h.update(f"scalar|{sc.name}|".encode())
        h.update(",".join(f"{t}={sc.values[t]!r}" for t in sorted(sc.values)).encode())
        h.update(b"\n")
    return h.hexdigest()


def load_bundle(path) -> LexiconBundle:
    """Load a bundle directory, validating manifest order, names, and patterns."""
    root = Path(path)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        raise ValidationError(f"missing manifest: {manifest}")

    categories: list[CategoryLexicon] = []
    scalars: list[ScalarLexicon] = []
    seen: set[str] = set()
    for lineno, rel in _content_lines(manifest):
        lex_path = root / rel
        if not lex_path.is_file():
            raise ValidationError(f"{manifest}:{lineno}: listed file not found: {rel}")
        lex = _load_lexicon_file(lex_path)
        if lex.name in seen:
            raise ValidationError(f"{lex_path}: duplicate lexicon name '{lex.name}'")
        seen.add(lex.name)
        if isinstance(lex, CategoryLexicon):
            categories.append(lex)
        else:
            scalars.append(lex)
    if not categories and not scalars:
        raise ValidationError(f"{manifest}: manifest lists no lexicon files")

    digest = _bundle_digest(categories, scalars)
    return LexiconBundle(categories=categories, scalars=scalars,
                         version=digest[:12], schema_hash=digest)
