"""Feature extraction: songs x lexicon bundle -> fixed-order numeric matrix.

The schema is [word_count, type_token_ratio, one rate per category lexicon,
one mean per scalar lexicon], all in bundle order.  Category rates are
matches per 100 tokens; scalar means skip uncovered tokens, with per-token
coverage reported alongside the matrix rather than inside it.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import LabeledSong
from .errors import ValidationError
from .lexicon import CategoryLexicon, LexiconBundle, ScalarLexicon, lookup, matches

STRUCTURAL_FEATURES = ("word_count", "type_token_ratio")


def word_count(tokens: list[str]) -> float:
    return float(len(tokens))


def type_token_ratio(tokens: list[str]) -> float:
    """Distinct tokens over total tokens; 0 for an empty song."""
    if not tokens:
        return 0.0
    return len(set(tokens)) / len(tokens)


def category_rate(tokens: list[str], lexicon: CategoryLexicon) -> float:
    """Matching tokens per 100 words; 0 for an empty song."""
    return _rate_from_counts(Counter(tokens), len(tokens), lexicon)


def _rate_from_counts(counts: Counter, total: int, lexicon: CategoryLexicon) -> float:
    hits = sum(n for tok, n in counts.items() if matches(lexicon, tok))
    return hits / max(1, total) * 100.0


def scalar_mean(tokens: list[str], scalar: ScalarLexicon) -> tuple[float, float]:
    """Mean value over covered tokens and the covered fraction.

    Uncovered tokens are skipped; a song with no covered tokens gets mean 0
    with coverage 0 so degenerate records stay finite.
    """
    return _mean_from_counts(Counter(tokens), len(tokens), scalar)


def _mean_from_counts(counts: Counter, total: int,
                      scalar: ScalarLexicon) -> tuple[float, float]:
    covered = 0
    acc = 0.0
    for tok, n in counts.items():
        value = lookup(scalar, tok)
        if value is not None:
            covered += n
            acc += value * n
    mean = acc / covered if covered else 0.0
    return mean, covered / max(1, total)


@dataclass
class FeatureVector:
    song_id: str
    values: np.ndarray
    schema_hash: str


@dataclass
class FeatureMatrix:
    """Aligned rows, labels, and feature names for one corpus x bundle."""

    rows: list[FeatureVector]
    feature_names: list[str]
    labels: list[str]
    coverage: np.ndarray | None = None  # songs x scalar lexicons, diagnostics only

    @property
    def schema_hash(self) -> str:
        return self.rows[0].schema_hash

    def as_array(self) -> np.ndarray:
        return np.vstack([r.values for r in self.rows])

    def song_ids(self) -> list[str]:
        return [r.song_id for r in self.rows]


def feature_names(bundle: LexiconBundle) -> list[str]:
    return list(STRUCTURAL_FEATURES) + bundle.lexicon_names()


def feature_values(tokens: list[str], bundle: LexiconBundle) -> tuple[np.ndarray, np.ndarray]:
    """Raw feature vector plus per-scalar coverage for one token list."""
    counts = Counter(tokens)
    total = len(tokens)
    values = [word_count(tokens), type_token_ratio(tokens)]
    for cat in bundle.categories:
        values.append(_rate_from_counts(counts, total, cat))
    coverages = []
    for sc in bundle.scalars:
        mean, cov = _mean_from_counts(counts, total, sc)
        values.append(mean)
        coverages.append(cov)
    return np.array(values, dtype=float), np.array(coverages, dtype=float)


def extract(song: LabeledSong, bundle: LexiconBundle) -> FeatureVector:
    """One schema-ordered feature vector for a labeled song."""
    values, _ = feature_values(song.song.tokens, bundle)
    return FeatureVector(song_id=song.song.id, values=values,
                         schema_hash=bundle.schema_hash)


def assemble(songs: list[LabeledSong], bundle: LexiconBundle) -> FeatureMatrix:
    """Feature matrix with rows and labels in input order."""
    if not songs:
        raise ValidationError("cannot assemble a feature matrix from an empty song list")
    rows = []
    coverage = []
    labels = []
    for ls in songs:
        values, cov = feature_values(ls.song.tokens, bundle)
        rows.append(FeatureVector(song_id=ls.song.id, values=values,
                                  schema_hash=bundle.schema_hash))
        coverage.append(cov)
        labels.append(ls.label)
    return FeatureMatrix(rows=rows, feature_names=feature_names(bundle),
                         labels=labels, coverage=np.array(coverage, dtype=float))


def write_matrix_csv(matrix: FeatureMatrix, path) -> None:
    """Export the matrix as CSV; floats use repr so the round-trip is bit-exact.

    First line is a comment carrying the schema hash, then the header row
    ``song_id,label,<feature names...>``, then one row per song.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema_hash={matrix.schema_hash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["song_id", "label"] + matrix.feature_names)
        for row, label in zip(matrix.rows, matrix.labels):
            writer.writerow([row.song_id, label] + [repr(v) for v in row.values])


def coverage_summary(matrix: FeatureMatrix, bundle: LexiconBundle) -> dict:
    """Per-scalar coverage statistics for the diagnostics sidecar."""
    if matrix.coverage is None or not bundle.scalars:
        return {}
    summary = {}
    for j, sc in enumerate(bundle.scalars):
        col = matrix.coverage[:, j]
        summary[sc.name] = {
            "mean_coverage": float(col.mean()),
            "min_coverage": float(col.min()),
            "max_coverage": float(col.max()),
        }
    return summary
