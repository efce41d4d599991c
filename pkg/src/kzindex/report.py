"""Tabular rendering of metric reports and K_z breakdowns (csv, json, aligned text)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

from .errors import FieldError, HeaderError, ParseError, RowError
from .metrics import KzBreakdownRow, MetricReport, career_zone, kz_from_breakdown, tabulated_sum

FORMATS = ("csv", "json", "text")
REPORT_COLUMNS = (
    "researcher_id",
    "career_length",
    "publications",
    "total_citations",
    "h_index",
    "g_index",
    "kz",
)
BREAKDOWN_COLUMNS = ("year", "citations", "impact", "age", "weighted_impact")


@dataclass(frozen=True)
class RenderOptions:
    format: str = "text"
    decimals: int = 4
    kz_decimals: int = 3

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        for name in ("decimals", "kz_decimals"):
            value = getattr(self, name)
            if not 0 <= value <= 12:
                raise ValueError(f"{name} must lie in [0, 12], got {value}")


def _fmt(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}"
    # no "-0.000" for tiny negatives
    if s.startswith("-") and float(s) == 0:
        s = s[1:]
    return s


def _align(header: Sequence[str], rows: Sequence[Sequence[str]], right_from: int = 1) -> list[str]:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(cells):
        parts = [
            c.ljust(w) if i < right_from else c.rjust(w)
            for i, (c, w) in enumerate(zip(cells, widths))
        ]
        return "  ".join(parts).rstrip()

    return [line(header)] + [line(r) for r in rows]


def display_kz(r: MetricReport, decimals: int) -> float:
    """K_z as a table would print it: per-paper terms rounded, then summed."""
    if r.addends:
        return tabulated_sum(r.addends, decimals)
    return r.kz


def sort_reports(reports: Sequence[MetricReport]) -> list[MetricReport]:
    return sorted(reports, key=lambda r: -r.kz)


def _report_cells(r: MetricReport, opts: RenderOptions) -> list[str]:
    return [
        r.researcher_id,
        str(r.career_length),
        str(r.publication_count),
        str(r.total_citations),
        str(r.h_index),
        str(r.g_index),
        _fmt(display_kz(r, opts.kz_decimals), opts.kz_decimals),
    ]


def render_reports(
    reports: Sequence[MetricReport],
    opts: RenderOptions = RenderOptions(),
    presorted: bool = False,
    evaluation_year: int | None = None,
) -> str:
    """Render one row per researcher, K_z descending unless ``presorted``.

    Text and CSV print K_z tabulated at ``opts.kz_decimals`` (see
    :func:`display_kz`); JSON keeps the exact value so a downstream
    re-ranking is exact.
    """
    ordered = list(reports) if presorted else sort_reports(reports)

    if opts.format == "json":
        doc = {}
        if evaluation_year is not None:
            doc["evaluation_year"] = evaluation_year
        doc["reports"] = [
            {
                "researcher_id": r.researcher_id,
                "career_length": r.career_length,
                "career_zone": r.career_zone,
                "publications": r.publication_count,
                "total_citations": r.total_citations,
                "h_index": r.h_index,
                "g_index": r.g_index,
                "kz": r.kz,
                "empty": r.empty,
            }
            for r in ordered
        ]
        return json.dumps(doc, indent=2) + "\n"

    if opts.format == "csv":
        buf = io.StringIO()
        if evaluation_year is not None:
            buf.write(f"# evaluation_year={evaluation_year}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in ordered:
            writer.writerow(_report_cells(r, opts))
        return buf.getvalue()

    lines = []
    if evaluation_year is not None:
        lines.append(f"# evaluation year: {evaluation_year}")
    header = ["researcher_id", "career", "N", "TC", "h", "g", "Kz"]
    lines += _align(header, [_report_cells(r, opts) for r in ordered])
    return "\n".join(lines) + "\n"


def _strip_comments(text: str) -> tuple[str, int | None]:
    year = None
    kept = []
    for line in text.splitlines(keepends=True):
        if line.startswith("#"):
            if "evaluation_year=" in line:
                try:
                    year = int(line.split("=", 1)[1])
                except ValueError:
                    pass
            continue
        kept.append(line)
    return "".join(kept), year


def parse_reports(text: str) -> tuple[list[MetricReport], int | None]:
    """Read back CSV or JSON produced by :func:`render_reports`.

    Returns the reports and the echoed evaluation year, if any.
    """
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if "reports" not in doc or not isinstance(doc["reports"], list):
            raise FieldError("$.reports", "missing or not a list")
        out = []
        for i, d in enumerate(doc["reports"]):
            try:
                out.append(
                    MetricReport(
                        researcher_id=str(d["researcher_id"]),
                        publication_count=int(d["publications"]),
                        total_citations=int(d["total_citations"]),
                        h_index=int(d["h_index"]),
                        g_index=int(d["g_index"]),
                        career_length=int(d["career_length"]),
                        kz=float(d["kz"]),
                        career_zone=d.get("career_zone") or career_zone(int(d["career_length"])),
                        empty=bool(d.get("empty", False)),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FieldError(f"$.reports[{i}]", f"bad or missing field: {exc}") from None
        return out, doc.get("evaluation_year")

    body, year = _strip_comments(text)
    reader = csv.reader(io.StringIO(body, newline=""))
    header = next(reader, None)
    if header is None or tuple(header) != REPORT_COLUMNS:
        raise HeaderError(f"expected header {','.join(REPORT_COLUMNS)!r}, got {header!r}")
    out = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(REPORT_COLUMNS):
            raise RowError(rownum, f"expected {len(REPORT_COLUMNS)} fields, got {len(row)}")
        try:
            rid, length, n, tc, h, g, kz = row
            out.append(
                MetricReport(rid, int(n), int(tc), int(h), int(g), int(length), float(kz), career_zone(int(length)))
            )
        except ValueError as exc:
            raise RowError(rownum, str(exc)) from None
    return out, year


def render_breakdown(
    rows: Sequence[KzBreakdownRow],
    opts: RenderOptions = RenderOptions(),
    researcher_id: str | None = None,
    h: int | None = None,
    evaluation_year: int | None = None,
) -> str:
    """Per-publication table with a ``TC = ..., Kz = ...`` footer."""
    tc = sum(r.citations for r in rows)
    kz = kz_from_breakdown(rows)
    kz_table = tabulated_sum((r.weighted_impact for r in rows), opts.kz_decimals)
    footer = f"TC = {tc}, Kz = {_fmt(kz_table, opts.kz_decimals)}"

    if opts.format == "json":
        doc = {}
        if evaluation_year is not None:
            doc["evaluation_year"] = evaluation_year
        if researcher_id is not None:
            doc["researcher_id"] = researcher_id
        if h is not None:
            doc["h_index"] = h
        doc["rows"] = [
            {
                "year": r.year,
                "citations": r.citations,
                "impact": r.impact,
                "age": r.age,
                "weighted_impact": r.weighted_impact,
            }
            for r in rows
        ]
        doc["total_citations"] = tc
        doc["kz"] = kz
        doc["kz_tabulated"] = kz_table
        return json.dumps(doc, indent=2) + "\n"

    cells = [
        [str(r.year), str(r.citations), _fmt(r.impact, opts.decimals), str(r.age), _fmt(r.weighted_impact, opts.decimals)]
        for r in rows
    ]

    if opts.format == "csv":
        buf = io.StringIO()
        if evaluation_year is not None:
            buf.write(f"# evaluation_year={evaluation_year}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BREAKDOWN_COLUMNS)
        writer.writerows(cells)
        buf.write(f"# {footer}\n")
        return buf.getvalue()

    lines = []
    if evaluation_year is not None:
        lines.append(f"# evaluation year: {evaluation_year}")
    if researcher_id is not None:
        title = f"Researcher {researcher_id}"
        if h is not None:
            title += f", h = {h}"
        lines.append(title)
    numbered = [[str(i)] + c for i, c in enumerate(cells, start=1)]
    lines += _align(["S.No", "P_y", "C", "k", "dt", "k'"], numbered)
    lines.append(footer)
    return "\n".join(lines) + "\n"
