"""Puncturing patterns: representations, baseline generators, search-space
reduction, branch-role counting, the genotype-to-pattern projection, and the
pattern file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CodeSpec, bit_reverse

PATTERN_SCHEMA = "polar-pattern/1"


class PatternFileError(ValueError):
    """Raised when a pattern file fails validation; names the offending field."""


@dataclass(frozen=True)
class PuncturingPattern:
    """Set of coded-bit positions withheld from transmission.

    ``indices`` are 1-based positions into the length-N codeword, stored
    sorted ascending.
    """

    n_mother: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        object.__setattr__(self, "indices", idx)
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate puncturing indices: {idx}")
        if idx and not (1 <= idx[0] and idx[-1] <= self.n_mother):
            raise ValueError(
                f"puncturing indices must lie in [1, {self.n_mother}], got {idx}")
        if len(idx) >= self.n_mother:
            raise ValueError("cannot puncture every coded bit")

    @property
    def n_p(self) -> int:
        return len(self.indices)

    @property
    def n_transmitted(self) -> int:
        return self.n_mother - self.n_p

    def zero_based(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int64) - 1


def qup_pattern(spec: CodeSpec, n_p: int) -> PuncturingPattern:
    """Quasi-uniform puncturing: bit-reversed images of the first n_p integers."""
    _check_np(spec, n_p)
    idx = {bit_reverse(i, spec.m) + 1 for i in range(n_p)}
    return PuncturingPattern(spec.n_mother, tuple(idx))


def rqup_pattern(spec: CodeSpec, n_p: int) -> PuncturingPattern:
    """Reversal variant: bit-reversed images of the last n_p integers."""
    _check_np(spec, n_p)
    n = spec.n_mother
    idx = {bit_reverse(i, spec.m) + 1 for i in range(n - n_p, n)}
    return PuncturingPattern(n, tuple(idx))


def _check_np(spec: CodeSpec, n_p: int) -> None:
    if not 0 < n_p < spec.n_mother:
        raise ValueError(f"n_p must be in (0, {spec.n_mother}), got {n_p}")


def forbidden_set(spec: CodeSpec) -> frozenset[int]:
    """Coded bits excluded from puncturing candidacy: the even-indexed bits
    together with bit N-1 (1-based)."""
    if spec.n_mother < 4:
        raise ValueError("forbidden set is defined for N >= 4")
    n = spec.n_mother
    return frozenset(range(2, n + 1, 2)) | {n - 1}


def reduced_dimension(spec: CodeSpec) -> int:
    """Size of the reduced search space: N/2 - 1 odd bits (bit N-1 excluded)."""
    return spec.n_mother // 2 - 1


def branch_role_counts(spec: CodeSpec) -> list[tuple[int, int]]:
    """Per coded bit, how often its branch acts as the upper versus the lower
    arm of a butterfly across the m encoding layers.

    Entry i describes coded bit i+1.  The lower count equals the popcount of
    the 0-based bit index; upper + lower = m for every bit.
    """
    if spec.n_mother < 2:
        raise ValueError("need N >= 2")
    out = []
    for i in range(spec.n_mother):
        lower = bin(i).count("1")
        out.append((spec.m - lower, lower))
    return out


def vector_to_pattern(candidate, n_p: int, spec: CodeSpec,
                      reduced: bool = True) -> PuncturingPattern:
    """Project a real-valued candidate vector onto a puncturing pattern.

    The n_p largest entries win (ties broken toward the lower column).  In the
    reduced space, column j (1-based) stands for coded bit 2j-1, covering the
    odd bits 1, 3, ..., N-3; otherwise column j stands for bit j.
    """
    candidate = np.asarray(candidate, dtype=np.float64)
    if candidate.ndim != 1:
        raise ValueError("candidate must be a 1-D vector")
    want = reduced_dimension(spec) if reduced else spec.n_mother
    if candidate.size != want:
        raise ValueError(
            f"candidate length {candidate.size} does not match D={want} "
            f"({'reduced' if reduced else 'full'} space, N={spec.n_mother})")
    if n_p > candidate.size:
        raise ValueError(f"n_p={n_p} exceeds candidate dimension {candidate.size}")
    cols = np.argsort(-candidate, kind="stable")[:n_p] + 1
    bits = 2 * cols - 1 if reduced else cols
    return PuncturingPattern(spec.n_mother, tuple(int(b) for b in bits))


# ---------------------------------------------------------------------------
# Pattern file format: JSON document with a versioned schema field.
# ---------------------------------------------------------------------------

def save_pattern(path, pattern: PuncturingPattern, info_set=None,
                 provenance=None) -> None:
    """Write a pattern file.  Round-trips bit-exactly through load_pattern."""
    doc = {
        "schema": PATTERN_SCHEMA,
        "n_mother": pattern.n_mother,
        "n_p": pattern.n_p,
        "indices": list(pattern.indices),
    }
    if info_set is not None:
        doc["info_set"] = sorted(int(i) for i in info_set)
    doc["provenance"] = provenance if provenance is not None else ""
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_pattern(path):
    """Read a pattern file.

    Returns
    -------
    (pattern, info_set, provenance)
        ``info_set`` is a sorted tuple of 1-based input positions or None.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise PatternFileError("top level must be an object")
    if doc.get("schema") != PATTERN_SCHEMA:
        raise PatternFileError(
            f"field 'schema': expected {PATTERN_SCHEMA!r}, got {doc.get('schema')!r}")

    n = _require_int(doc, "n_mother")
    if n < 2 or (n & (n - 1)) != 0:
        raise PatternFileError(f"field 'n_mother': {n} is not a power of 2 >= 2")
    n_p = _require_int(doc, "n_p")
    indices = doc.get("indices")
    if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
        raise PatternFileError("field 'indices': must be a list of integers")
    if any(i < 1 or i > n for i in indices):
        bad = [i for i in indices if i < 1 or i > n]
        raise PatternFileError(f"field 'indices': values {bad} outside [1, {n}]")
    if len(set(indices)) != len(indices):
        raise PatternFileError("field 'indices': duplicate entries")
    if len(indices) != n_p:
        raise PatternFileError(
            f"field 'n_p': declared {n_p} but 'indices' has {len(indices)} entries")

    info_set = None
    if "info_set" in doc and doc["info_set"] is not None:
        raw = doc["info_set"]
        if not isinstance(raw, list) or not all(isinstance(i, int) for i in raw):
            raise PatternFileError("field 'info_set': must be a list of integers")
        if any(i < 1 or i > n for i in raw):
            bad = [i for i in raw if i < 1 or i > n]
            raise PatternFileError(f"field 'info_set': values {bad} outside [1, {n}]")
        if len(set(raw)) != len(raw):
            raise PatternFileError("field 'info_set': duplicate entries")
        info_set = tuple(sorted(raw))

    pattern = PuncturingPattern(n, tuple(indices))
    return pattern, info_set, doc.get("provenance", "")


def _require_int(doc: dict, key: str) -> int:
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise PatternFileError(f"field {key!r}: must be an integer, got {value!r}")
    return value


def reference_pattern_path(name: str) -> Path:
    """Path of a pattern file shipped with the package (see polarkit/data)."""
    root = Path(__file__).parent / "data"
    path = root / name
    if not path.exists():
        available = sorted(p.name for p in root.glob("*.json"))
        raise FileNotFoundError(f"no shipped pattern {name!r}; available: {available}")
    return path
