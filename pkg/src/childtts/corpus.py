"""Corpus ingestion: manifests, text normalization, tokenization, splits.

Manifest format: UTF-8 JSON lines, one object per utterance with keys
exactly ``{"id", "audio_path", "text", "speaker", "duration_s",
"sample_rate"}``.  Audio files are mono 16-bit PCM WAV.  Relative
``audio_path`` values are resolved against the manifest's directory when
audio existence is checked; the stored string is never rewritten, so a
canonical manifest round-trips byte-identically through load/save.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import CorpusError, NormalizationError

logger = logging.getLogger(__name__)

ALLOWED_SAMPLE_RATES = (16000, 22050, 24000)
SPLIT_TAGS = ("train", "test", "synth")

MANIFEST_KEYS = ("id", "audio_path", "text", "speaker", "duration_s", "sample_rate")


@dataclass(frozen=True)
class UtteranceRecord:
    """One audio/transcript pair in a corpus manifest."""

    id: str
    audio_path: str
    transcript: str
    speaker_id: str
    duration_s: float
    sample_rate: int

    def validate(self) -> None:
        if not self.id:
            raise CorpusError("utterance id must be non-empty")
        if self.duration_s <= 0:
            raise CorpusError(f"utterance {self.id!r}: duration_s must be > 0, got {self.duration_s}")
        if self.sample_rate not in ALLOWED_SAMPLE_RATES:
            raise CorpusError(
                f"utterance {self.id!r}: sample_rate {self.sample_rate} not in {ALLOWED_SAMPLE_RATES}"
            )
        try:
            normalize_text(self.transcript)
        except NormalizationError as exc:
            raise CorpusError(f"utterance {self.id!r}: transcript empty after normalization") from exc


@dataclass
class CorpusManifest:
    """An ordered collection of utterances with a split role."""

    records: list[UtteranceRecord]
    split_tag: str = "train"

    def __post_init__(self) -> None:
        if self.split_tag not in SPLIT_TAGS:
            raise CorpusError(f"split_tag must be one of {SPLIT_TAGS}, got {self.split_tag!r}")
        seen: set[str] = set()
        for rec in self.records:
            rec.validate()
            if rec.id in seen:
                raise CorpusError(f"duplicate utterance id {rec.id!r}")
            seen.add(rec.id)

    @property
    def total_hours(self) -> float:
        return sum(r.duration_s for r in self.records) / 3600.0

    @property
    def speakers(self) -> list[str]:
        """Distinct speaker labels in first-appearance order."""
        out: list[str] = []
        seen: set[str] = set()
        for r in self.records:
            if r.speaker_id not in seen:
                seen.add(r.speaker_id)
                out.append(r.speaker_id)
        return out

    def speaker_seconds(self) -> dict[str, float]:
        totals: dict[str, float] = {}
        for r in self.records:
            totals[r.speaker_id] = totals.get(r.speaker_id, 0.0) + r.duration_s
        return totals

    def __len__(self) -> int:
        return len(self.records)


def _record_to_obj(rec: UtteranceRecord) -> dict:
    return {
        "id": rec.id,
        "audio_path": rec.audio_path,
        "text": rec.transcript,
        "speaker": rec.speaker_id,
        "duration_s": rec.duration_s,
        "sample_rate": rec.sample_rate,
    }


def load_manifest(
    path: str | Path,
    split_tag: str = "train",
    on_missing_audio: str = "error",
) -> CorpusManifest:
    """Load a JSON-lines manifest.

    Args:
        path: manifest file path.
        split_tag: role assigned to the loaded manifest.
        on_missing_audio: ``"error"`` raises when a referenced audio file
            does not exist; ``"drop"`` logs a warning and skips the record.

    Raises:
        CorpusError: missing file, malformed line (with line number),
            duplicate id, invariant violation, or missing audio in
            ``"error"`` mode.
    """
    if on_missing_audio not in ("error", "drop"):
        raise ValueError(f"on_missing_audio must be 'error' or 'drop', got {on_missing_audio!r}")
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}")

    records: list[UtteranceRecord] = []
    base = path.parent
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            if not isinstance(obj, dict) or set(obj) != set(MANIFEST_KEYS):
                raise CorpusError(
                    f"{path}:{lineno}: expected keys {sorted(MANIFEST_KEYS)}, "
                    f"got {sorted(obj) if isinstance(obj, dict) else type(obj).__name__}"
                )
            try:
                rec = UtteranceRecord(
                    id=str(obj["id"]),
                    audio_path=str(obj["audio_path"]),
                    transcript=str(obj["text"]),
                    speaker_id=str(obj["speaker"]),
                    duration_s=float(obj["duration_s"]),
                    sample_rate=int(obj["sample_rate"]),
                )
                rec.validate()
            except CorpusError as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc

            audio = resolve_audio_path(rec, base)
            if not audio.is_file():
                if on_missing_audio == "error":
                    raise CorpusError(f"{path}:{lineno}: audio file missing for {rec.id!r}: {audio}")
                logger.warning("dropping %r: audio file missing: %s", rec.id, audio)
                continue
            records.append(rec)

    return CorpusManifest(records=records, split_tag=split_tag)


def resolve_audio_path(rec: UtteranceRecord, manifest_dir: str | Path) -> Path:
    """Absolute audio path for a record loaded from ``manifest_dir``."""
    p = Path(rec.audio_path)
    return p if p.is_absolute() else Path(manifest_dir) / p


def save_manifest(manifest: CorpusManifest, path: str | Path) -> Path:
    """Write a manifest in canonical form (fixed key order, one line per record)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for rec in manifest.records:
            fh.write(json.dumps(_record_to_obj(rec), ensure_ascii=False) + "\n")
    tmp.replace(path)
    return path


def manifest_fingerprint(manifest: CorpusManifest) -> str:
    """Stable hex digest over the canonical serialized records."""
    import hashlib

    h = hashlib.sha256()
    for rec in manifest.records:
        h.update(json.dumps(_record_to_obj(rec), ensure_ascii=False).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Text normalization
#
# Rule table (applied in order, deterministic):
#   1. lowercase
#   2. digit runs (optionally followed by an ordinal suffix st/nd/rd/th) are
#      expanded to words; integers 0..9999 only, larger values are an error
#   3. hyphens, slashes and underscores become spaces
#   4. characters outside the tokenset (a-z, space, ' . , ?) are dropped
#   5. whitespace runs collapse to a single space; ends stripped
# The result is empty -> NormalizationError.  normalize_text is idempotent.
# ---------------------------------------------------------------------------

_ONES = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "twenty thirty forty fifty sixty seventy eighty ninety".split()

_ORDINAL_IRREGULAR = {
    "one": "first",
    "two": "second",
    "three": "third",
    "five": "fifth",
    "eight": "eighth",
    "nine": "ninth",
    "twelve": "twelfth",
}

_NUMBER_RE = re.compile(r"(\d+)(st|nd|rd|th)?")
_DASHES_RE = re.compile(r"[-_/‐-―]")
_KEEP_RE = re.compile(r"[^a-z '.,?]")
_WS_RE = re.compile(r"\s+")


def number_to_words(n: int) -> str:
    """Cardinal words for an integer in [0, 9999]."""
    if not 0 <= n <= 9999:
        raise NormalizationError(f"number out of supported range 0..9999: {n}")
    if n < 20:
        return _ONES[n]
    if n < 100:
        tens, rem = divmod(n, 10)
        word = _TENS[tens - 2]
        return f"{word} {_ONES[rem]}" if rem else word
    if n < 1000:
        hundreds, rem = divmod(n, 100)
        word = f"{_ONES[hundreds]} hundred"
        return f"{word} {number_to_words(rem)}" if rem else word
    thousands, rem = divmod(n, 1000)
    word = f"{_ONES[thousands]} thousand"
    return f"{word} {number_to_words(rem)}" if rem else word


def _ordinalize(words: str) -> str:
    parts = words.split()
    last = parts[-1]
    if last in _ORDINAL_IRREGULAR:
        parts[-1] = _ORDINAL_IRREGULAR[last]
    elif last.endswith("y"):
        parts[-1] = last[:-1] + "ieth"
    else:
        parts[-1] = last + "th"
    return " ".join(parts)


def _expand_number(match: re.Match) -> str:
    value = int(match.group(1))
    words = number_to_words(value)
    if match.group(2):
        words = _ordinalize(words)
    return f" {words} "


def normalize_text(raw: str) -> str:
    """Normalize raw text per the module rule table.

    Raises:
        NormalizationError: result empty, or a number exceeds 9999.
    """
    text = raw.lower()
    text = _NUMBER_RE.sub(_expand_number, text)
    text = _DASHES_RE.sub(" ", text)
    text = _KEEP_RE.sub("", text)
    text = _WS_RE.sub(" ", text).strip()
    if not text:
        raise NormalizationError(f"text empty after normalization: {raw!r}")
    return text


# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------

GRAPHEME_TOKENSET_ID = "graphemes_v1"
GRAPHEME_SYMBOLS = " abcdefghijklmnopqrstuvwxyz'.,?"
GRAPHEME_VOCAB_SIZE = len(GRAPHEME_SYMBOLS)

_GRAPHEME_TO_ID = {ch: i for i, ch in enumerate(GRAPHEME_SYMBOLS)}


@dataclass(frozen=True)
class TokenSequence:
    """Integer token ids under a named tokenset."""

    token_ids: tuple[int, ...]
    tokenset_id: str = GRAPHEME_TOKENSET_ID

    def __post_init__(self) -> None:
        if not self.token_ids:
            raise CorpusError("token sequence must be non-empty")

    def __len__(self) -> int:
        return len(self.token_ids)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.token_ids, dtype=np.int64)


def tokenize(text: str, tokenset_id: str = GRAPHEME_TOKENSET_ID) -> TokenSequence:
    """Map normalized text to token ids.

    The grapheme tokenset is reversible: ``detokenize(tokenize(t)) == t``.

    Raises:
        CorpusError: unknown tokenset, empty text, or a character outside
            the tokenset (cannot occur for normalize_text output).
    """
    if tokenset_id != GRAPHEME_TOKENSET_ID:
        raise CorpusError(f"unknown tokenset_id {tokenset_id!r}")
    if not text:
        raise CorpusError("cannot tokenize empty text")
    ids = []
    for ch in text:
        if ch not in _GRAPHEME_TO_ID:
            raise CorpusError(f"character {ch!r} not in tokenset {tokenset_id!r}")
        ids.append(_GRAPHEME_TO_ID[ch])
    return TokenSequence(token_ids=tuple(ids), tokenset_id=tokenset_id)


def detokenize(seq: TokenSequence) -> str:
    if seq.tokenset_id != GRAPHEME_TOKENSET_ID:
        raise CorpusError(f"unknown tokenset_id {seq.tokenset_id!r}")
    return "".join(GRAPHEME_SYMBOLS[i] for i in seq.token_ids)


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------


def split_corpus(
    manifest: CorpusManifest, train_hours: float, seed: int
) -> tuple[CorpusManifest, CorpusManifest]:
    """Partition a manifest into train/test splits by an hour budget.

    Records are visited in a seeded shuffled order.  The train split is
    seeded with one utterance from every speaker that has at least two
    utterances, then filled greedily until the budget is met; everything
    else lands in test.  The train total therefore ends within one
    utterance-duration of ``train_hours``.

    Raises:
        CorpusError: budget not below the corpus total, fewer than two
            speakers, or speaker coverage alone overshoots the budget.
    """
    if train_hours >= manifest.total_hours:
        raise CorpusError(
            f"insufficient data: train_hours={train_hours} >= total_hours={manifest.total_hours:.4f}"
        )
    if len(manifest.speakers) < 2:
        raise CorpusError("split requires at least 2 speakers")

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(manifest.records))
    shuffled = [manifest.records[i] for i in order]

    target_s = train_hours * 3600.0
    max_dur = max(r.duration_s for r in manifest.records)

    counts: dict[str, int] = {}
    for r in manifest.records:
        counts[r.speaker_id] = counts.get(r.speaker_id, 0) + 1

    train: list[UtteranceRecord] = []
    train_ids: set[str] = set()
    covered: set[str] = set()
    train_s = 0.0
    for rec in shuffled:
        if counts[rec.speaker_id] >= 2 and rec.speaker_id not in covered:
            covered.add(rec.speaker_id)
            train.append(rec)
            train_ids.add(rec.id)
            train_s += rec.duration_s
    if train_s >= target_s + max_dur:
        raise CorpusError(
            "insufficient data: speaker coverage alone exceeds the train budget "
            f"({train_s / 3600.0:.4f} h for {train_hours} h requested)"
        )

    for rec in shuffled:
        if rec.id in train_ids:
            continue
        if train_s >= target_s:
            break
        train.append(rec)
        train_ids.add(rec.id)
        train_s += rec.duration_s

    test = [r for r in shuffled if r.id not in train_ids]
    if not test:
        raise CorpusError("insufficient data: test split would be empty")

    # Restore original manifest order within each split.
    pos = {r.id: i for i, r in enumerate(manifest.records)}
    train.sort(key=lambda r: pos[r.id])
    test.sort(key=lambda r: pos[r.id])
    return (
        CorpusManifest(records=train, split_tag="train"),
        CorpusManifest(records=test, split_tag="test"),
    )


def sum_audio_hours(records: Iterable[UtteranceRecord]) -> float:
    return sum(r.duration_s for r in records) / 3600.0
