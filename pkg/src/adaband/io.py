"""File formats and run configuration for the command-line front end.

Formats:

* FASTA in (``>`` headers, sequence lines concatenated, CRLF tolerated).
* Pairs files: tab-separated ``id  reference  query`` with an optional
  ``id\treference\tquery`` header line.
* Results: JSON lines (one object per pair, keys sorted) and CSV tables.

Configuration is ``key = value`` text; unknown keys are hard errors.
Precedence is flags > config file > defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

from .core import BandPolicy, ScoringScheme
from .pimmodel import ArchConfig


class ConfigError(ValueError):
    pass


class FastaFormatError(ValueError):
    pass


class PairsFormatError(ValueError):
    pass


_ACGT = set("ACGT")


@dataclass
class FastaRecord:
    name: str
    sequence: str
    masked_positions: tuple[int, ...] = ()


def parse_fasta(path: str, mask_n: bool = False) -> list[FastaRecord]:
    """Parse a FASTA file into named ACGT sequences.

    Lowercase bases are accepted and upcased.  ``N`` is replaced by ``A``
    (recorded in ``masked_positions``) when ``mask_n`` is set, otherwise it
    is rejected like any other non-ACGT byte, with file/line/column context.
    """
    records: list[FastaRecord] = []
    name = None
    chunks: list[str] = []
    masked: list[int] = []
    last_line = 0

    def flush(line_no):
        if name is None:
            return
        seq = "".join(chunks)
        if not seq:
            raise FastaFormatError(f"{path}:{line_no}: record {name!r} is empty")
        records.append(FastaRecord(name, seq, tuple(masked)))

    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            last_line = line_no
            line = raw.rstrip("\r\n")
            if not line:
                continue
            if line.startswith(">"):
                flush(line_no)
                name = line[1:].strip()
                if not name:
                    raise FastaFormatError(f"{path}:{line_no}: empty header")
                chunks = []
                masked = []
                continue
            if name is None:
                raise FastaFormatError(
                    f"{path}:{line_no}: sequence data before any '>' header")
            offset = sum(len(c) for c in chunks)
            cleaned = []
            for col, ch in enumerate(line.upper()):
                if ch in _ACGT:
                    cleaned.append(ch)
                elif ch == "N" and mask_n:
                    cleaned.append("A")
                    masked.append(offset + col)
                else:
                    raise FastaFormatError(
                        f"{path}:{line_no}:{col + 1}: illegal character {ch!r}")
            chunks.append("".join(cleaned))
    flush(last_line)
    if not records:
        raise FastaFormatError(f"{path}: no records")
    return records


@dataclass
class Pair:
    pair_id: str
    reference: str
    query: str


def _check_seq(path, line_no, label, seq):
    for col, ch in enumerate(seq):
        if ch not in _ACGT:
            raise PairsFormatError(
                f"{path}:{line_no}: {label} has illegal character {ch!r} "
                f"at position {col}")
    if not seq:
        raise PairsFormatError(f"{path}:{line_no}: empty {label}")


def read_pairs(path: str) -> list[Pair]:
    pairs: list[Pair] = []
    seen: set[str] = set()
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            if line_no == 1 and line.split("\t")[:1] == ["id"]:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise PairsFormatError(
                    f"{path}:{line_no}: expected 3 tab-separated fields, "
                    f"got {len(parts)}")
            pid, ref, qry = parts
            if pid in seen:
                raise PairsFormatError(f"{path}:{line_no}: duplicate id {pid!r}")
            seen.add(pid)
            _check_seq(path, line_no, "reference", ref)
            _check_seq(path, line_no, "query", qry)
            pairs.append(Pair(pid, ref, qry))
    if not pairs:
        raise PairsFormatError(f"{path}: no pairs")
    return pairs


def write_pairs(path: str, pairs) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("id\treference\tquery\n")
        for p in pairs:
            fh.write(f"{p.pair_id}\t{p.reference}\t{p.query}\n")


_BOOL_STRINGS = {"true": True, "on": True, "yes": True, "1": True,
                 "false": False, "off": False, "no": False, "0": False}


def _parse_bool(v: str) -> bool:
    try:
        return _BOOL_STRINGS[v.lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {v!r}") from None


@dataclass
class RunConfig:
    """Every tunable of the toolkit, with defaults matching the evaluation
    setup (scoring 2/4/4/2, base bandwidth 10 rounded to multiples, cap 100,
    adaptive direction on, 64 tiles of 1024x1024 subarrays with 15 traceback
    subarrays each, 128-bit column mux, 500 MHz)."""

    match_score: int = 2
    mismatch_penalty: int = 4
    gap_open: int = 4
    gap_extend: int = 2
    w: int = 10
    band_slope: float = 0.01
    band_cap: int = 100
    band_round: bool = True
    adaptive: bool = True
    tie_right: bool = False
    profile: str = "illumina"
    seed: int = 42
    threads: int = 1
    tiles: int = 64
    subarray_rows: int = 1024
    subarray_cols: int = 1024
    tbms_per_tile: int = 15
    column_width: int = 128
    clock_hz: float = 5.0e8
    write_endurance: float = 1.0e12

    def scheme(self) -> ScoringScheme:
        return ScoringScheme(self.match_score, self.mismatch_penalty,
                             self.gap_open, self.gap_extend)

    def band_policy(self) -> BandPolicy:
        return BandPolicy(self.w, self.band_slope, self.band_cap, self.band_round)

    def arch_config(self) -> ArchConfig:
        return ArchConfig(
            tiles=self.tiles, subarray_rows=self.subarray_rows,
            subarray_cols=self.subarray_cols, tbms_per_tile=self.tbms_per_tile,
            column_width=self.column_width, clock_hz=self.clock_hz,
            write_endurance=self.write_endurance)


_CONFIG_TYPES = {f.name: f.type for f in dc_fields(RunConfig)}


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            setattr(cfg, key, _coerce(key, value, path, line_no))
    return cfg


def _coerce(key, value, path, line_no):
    ftype = _CONFIG_TYPES[key]
    try:
        if ftype in ("int", int):
            return int(value)
        if ftype in ("float", float):
            return float(value)
        if ftype in ("bool", bool):
            return _parse_bool(value)
        return value
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{path}:{line_no}: bad value for {key}: {exc}") from None


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply non-None flag values on top of the config (flags win)."""
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"unknown option {key!r}")
        setattr(cfg, key, value)
    return cfg
