"""Song corpus parsing, lyric cleaning, and top/bottom chart labeling.

Corpus files are UTF-8 JSON lines.  Each line is a flat object with keys
``id``, ``title``, ``artist``, ``year``, ``lyrics``, and exactly one of
``weekly_ranks`` (array of ints in [1, 100]) or ``peak_rank`` (single int).
A song's peak rank is the best (minimum) weekly rank it ever reached; songs
peaking at or above the top cut are labeled TOP, songs peaking at or below
the bottom cut are labeled BOTTOM, and songs in between are excluded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import ValidationError

TOP = "TOP"
BOTTOM = "BOTTOM"

# Characters replaced by spaces during cleaning. Note the apostrophe:
# contractions split ("don't" -> "don t"), so lexicons must list fragments.
PUNCTUATION_STRIP_SET = ".,!?;:'\"()[]{}—-"

_TAG_RE = re.compile(r"<[^>]*>")
_STRIP_RE = re.compile("[" + re.escape(PUNCTUATION_STRIP_SET) + "]")
_WS_RE = re.compile(r"\s+")


def clean_lyrics(raw: str) -> str:
    """Strip markup tags and punctuation, lowercase, and collapse whitespace."""
    text = _TAG_RE.sub("", raw)
    text = _STRIP_RE.sub(" ", text)
    text = text.lower()
    return _WS_RE.sub(" ", text).strip()


def tokenize(cleaned: str) -> list[str]:
    """Whitespace-split an already cleaned string; never yields empty tokens."""
    return cleaned.split()


@dataclass
class SongRecord:
    """One song with its chart observations and lyric text."""

    id: str
    title: str
    artist: str
    year: int
    weekly_ranks: list[int]
    raw_lyrics: str
    cleaned_lyrics: str
    tokens: list[str]

    @classmethod
    def from_raw(cls, id: str, title: str, artist: str, year: int,
                 weekly_ranks: list[int], raw_lyrics: str) -> "SongRecord":
        cleaned = clean_lyrics(raw_lyrics)
        return cls(id=id, title=title, artist=artist, year=year,
                   weekly_ranks=list(weekly_ranks), raw_lyrics=raw_lyrics,
                   cleaned_lyrics=cleaned, tokens=tokenize(cleaned))


@dataclass
class LabeledSong:
    """A song wrapped with its peak rank and TOP/BOTTOM label."""

    song: SongRecord
    peak_rank: int
    label: str


def derive_label(song: SongRecord, top_cut: int = 30,
                 bottom_cut: int = 71) -> LabeledSong | None:
    """Label a song by its peak (minimum) weekly rank.

    Returns None for songs peaking strictly between the cuts; those are
    excluded from the two-class problem.
    """
    if not (1 <= top_cut < bottom_cut <= 100):
        raise ValidationError(
            f"cuts must satisfy 1 <= top_cut < bottom_cut <= 100, "
            f"got top_cut={top_cut} bottom_cut={bottom_cut}")
    peak = min(song.weekly_ranks)
    if peak <= top_cut:
        return LabeledSong(song=song, peak_rank=peak, label=TOP)
    if peak >= bottom_cut:
        return LabeledSong(song=song, peak_rank=peak, label=BOTTOM)
    return None


def _parse_record(obj: dict, lineno: int) -> SongRecord:
    def fail(msg: str):
        raise ValidationError(f"line {lineno}: {msg}")

    for key in ("id", "title", "artist", "year", "lyrics"):
        if key not in obj:
            fail(f"missing key '{key}'")
    song_id = obj["id"]
    if not isinstance(song_id, str) or not song_id:
        fail("'id' must be a nonempty string")
    for key in ("title", "artist", "lyrics"):
        if not isinstance(obj[key], str):
            fail(f"'{key}' must be a string")
    year = obj["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        fail("'year' must be an integer")

    has_weekly = "weekly_ranks" in obj
    has_peak = "peak_rank" in obj
    if has_weekly == has_peak:
        fail("exactly one of 'weekly_ranks' or 'peak_rank' is required")
    if has_weekly:
        ranks = obj["weekly_ranks"]
        if not isinstance(ranks, list) or not ranks:
            fail("'weekly_ranks' must be a nonempty array")
    else:
        ranks = [obj["peak_rank"]]
    for r in ranks:
        if not isinstance(r, int) or isinstance(r, bool) or not 1 <= r <= 100:
            fail(f"rank {r!r} outside [1, 100]")

    return SongRecord.from_raw(id=song_id, title=obj["title"],
                               artist=obj["artist"], year=year,
                               weekly_ranks=ranks, raw_lyrics=obj["lyrics"])


def parse_corpus(source: IO[str] | Iterable[str]) -> list[SongRecord]:
    """Parse line-delimited song records, preserving input order.

    Raises ValidationError naming the offending line on malformed JSON,
    bad fields, out-of-range ranks, or duplicate ids.
    """
    songs: list[SongRecord] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ValidationError(f"line {lineno}: record must be a JSON object")
        song = _parse_record(obj, lineno)
        if song.id in seen_ids:
            raise ValidationError(f"line {lineno}: duplicate id '{song.id}'")
        seen_ids.add(song.id)
        songs.append(song)
    return songs


def load_corpus(path) -> list[SongRecord]:
    """Read a corpus file from disk. Reference reader for the JSONL format."""
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh)


def label_corpus(songs: list[SongRecord], top_cut: int = 30,
                 bottom_cut: int = 71) -> tuple[list[LabeledSong], int]:
    """Label every song; returns (labeled songs in input order, excluded count)."""
    labeled = []
    excluded = 0
    for song in songs:
        ls = derive_label(song, top_cut=top_cut, bottom_cut=bottom_cut)
        if ls is None:
            excluded += 1
        else:
            labeled.append(ls)
    return labeled, excluded
