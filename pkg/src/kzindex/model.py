"""Record types and ingestion of publication records (JSON and long-format CSV)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import (
    DuplicateIdError,
    FieldError,
    FutureDatedError,
    HeaderError,
    ParseError,
    RowError,
    YearRangeError,
)

MIN_YEAR = 1500
CSV_HEADER = ("researcher_id", "year", "citations")


@dataclass(frozen=True)
class Publication:
    year: int
    citations: int

    def __post_init__(self):
        if self.citations < 0:
            raise ValueError(f"citations must be non-negative, got {self.citations}")


@dataclass(frozen=True)
class ResearcherProfile:
    id: str
    publications: tuple[Publication, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("researcher id must be non-empty")
        object.__setattr__(self, "publications", tuple(self.publications))

    @property
    def citations(self) -> list[int]:
        return [p.citations for p in self.publications]


@dataclass(frozen=True)
class EvaluationContext:
    evaluation_year: int


@dataclass(frozen=True)
class ProfileSet:
    researchers: tuple[ResearcherProfile, ...] = ()
    source: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "researchers", tuple(self.researchers))
        seen = set()
        for r in self.researchers:
            if r.id in seen:
                raise DuplicateIdError(r.id)
            seen.add(r.id)

    def __len__(self):
        return len(self.researchers)

    def __iter__(self):
        return iter(self.researchers)

    def get(self, researcher_id: str) -> ResearcherProfile:
        for r in self.researchers:
            if r.id == researcher_id:
                return r
        raise KeyError(researcher_id)


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc.reason}", position=exc.start) from None


def _require_int(obj, key, path):
    if key not in obj:
        raise FieldError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FieldError(f"{path}.{key}", f"expected integer, got {value!r}")
    return value


def parse_profiles_json(data: bytes | str, source: str = "") -> ProfileSet:
    text = _decode(data)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        byte_pos = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno, byte_pos) from None

    if not isinstance(doc, dict):
        raise FieldError("$", "top-level value must be an object")
    if "researchers" not in doc:
        raise FieldError("$.researchers", "missing required field")
    entries = doc["researchers"]
    if not isinstance(entries, list):
        raise FieldError("$.researchers", "expected a list")

    researchers = []
    seen = set()
    for i, entry in enumerate(entries):
        path = f"$.researchers[{i}]"
        if not isinstance(entry, dict):
            raise FieldError(path, "expected an object")
        rid = entry.get("id")
        if "id" not in entry:
            raise FieldError(f"{path}.id", "missing required field")
        if not isinstance(rid, str) or not rid:
            raise FieldError(f"{path}.id", f"expected non-empty string, got {rid!r}")
        if rid in seen:
            raise DuplicateIdError(rid)
        seen.add(rid)
        if "publications" not in entry:
            raise FieldError(f"{path}.publications", "missing required field")
        pubs_raw = entry["publications"]
        if not isinstance(pubs_raw, list):
            raise FieldError(f"{path}.publications", "expected a list")
        pubs = []
        for j, p in enumerate(pubs_raw):
            ppath = f"{path}.publications[{j}]"
            if not isinstance(p, dict):
                raise FieldError(ppath, "expected an object")
            year = _require_int(p, "year", ppath)
            cites = _require_int(p, "citations", ppath)
            if cites < 0:
                raise FieldError(f"{ppath}.citations", f"must be non-negative, got {cites}")
            pubs.append(Publication(year, cites))
        researchers.append(ResearcherProfile(rid, tuple(pubs)))
    return ProfileSet(tuple(researchers), source)


def parse_profiles_csv(data: bytes | str, source: str = "") -> ProfileSet:
    text = _decode(data)
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise HeaderError(f"expected header {','.join(CSV_HEADER)!r}, got {header!r}", line=1)

    grouped: dict[str, list[Publication]] = {}
    for rownum, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise RowError(rownum, f"expected 3 fields, got {len(row)}")
        rid, year_s, cites_s = row
        if not rid:
            raise RowError(rownum, "empty researcher_id")
        try:
            year = int(year_s)
        except ValueError:
            raise RowError(rownum, f"year is not an integer: {year_s!r}") from None
        try:
            cites = int(cites_s)
        except ValueError:
            raise RowError(rownum, f"citations is not an integer: {cites_s!r}") from None
        if cites < 0:
            raise RowError(rownum, f"citations must be non-negative, got {cites}")
        grouped.setdefault(rid, []).append(Publication(year, cites))

    return ProfileSet(
        tuple(ResearcherProfile(rid, tuple(pubs)) for rid, pubs in grouped.items()),
        source,
    )


def parse_profiles(data: bytes | str, source: str = "") -> ProfileSet:
    """Parse either encoding, sniffing JSON by its leading brace."""
    text = _decode(data)
    if text.lstrip("\ufeff \t\r\n").startswith("{"):
        return parse_profiles_json(text, source)
    return parse_profiles_csv(text, source)


def profiles_to_json(profiles: ProfileSet) -> str:
    doc = {
        "researchers": [
            {
                "id": r.id,
                "publications": [{"year": p.year, "citations": p.citations} for p in r.publications],
            }
            for r in profiles
        ]
    }
    return json.dumps(doc, indent=2) + "\n"


def profiles_to_csv(profiles: ProfileSet) -> str:
    # Profiles with no publications have no rows and cannot survive a CSV round trip.
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in profiles:
        for p in r.publications:
            writer.writerow((r.id, p.year, p.citations))
    return buf.getvalue()


def validate(profiles: ProfileSet, ctx: EvaluationContext) -> ProfileSet:
    """Check every publication year lies in [1500, evaluation year].

    Returns the input unchanged. Profiles without publications pass; the
    reporting stage flags them.
    """
    for r in profiles:
        for p in r.publications:
            if p.year > ctx.evaluation_year:
                raise FutureDatedError(p.year, ctx.evaluation_year, r.id)
            if p.year < MIN_YEAR:
                raise YearRangeError(
                    f"researcher {r.id!r}: publication year {p.year} is before {MIN_YEAR}"
                )
    return profiles


def empty_profiles(profiles: ProfileSet) -> list[str]:
    return [r.id for r in profiles if not r.publications]
