import csv
import io
import json

import pytest

from kzindex.errors import HeaderError, ParseError, RowError
from kzindex.metrics import kz_breakdown, metric_report
from kzindex.model import EvaluationContext, Publication, ResearcherProfile
from kzindex.report import (
    REPORT_COLUMNS,
    RenderOptions,
    display_kz,
    parse_reports,
    render_breakdown,
    render_reports,
    sort_reports,
)
from golden_tables import TABLES

CTX = EvaluationContext(2023)


def table(name, rid):
    return ResearcherProfile(rid, tuple(Publication(y, c) for y, c, *_ in TABLES[name][rid]["rows"]))


def reports(name):
    return [metric_report(table(name, rid), CTX) for rid in TABLES[name]]


def test_empty_list_renders_header_only():
    out = render_reports([], RenderOptions("csv"))
    assert out == ",".join(REPORT_COLUMNS) + "\n"
    assert json.loads(render_reports([], RenderOptions("json"))) == {"reports": []}


def test_table1_csv_ordering_and_values():
    out = render_reports(reports("table1"), RenderOptions("csv"), evaluation_year=2023)
    lines = out.splitlines()
    assert lines[0] == "# evaluation_year=2023"
    assert lines[1] == ",".join(REPORT_COLUMNS)
    assert lines[2] == "R2,9,10,110,4,10,2.753"
    assert lines[3] == "R1,9,10,110,4,10,2.459"


def test_text_output_is_aligned():
    out = render_reports(reports("table1"), RenderOptions("text"), evaluation_year=2023)
    lines = out.splitlines()
    assert lines[0] == "# evaluation year: 2023"
    assert lines[1].split() == ["researcher_id", "career", "N", "TC", "h", "g", "Kz"]
    assert len({len(line) for line in lines[1:]}) == 1
    assert lines[2].split()[-1] == "2.753"


def test_json_keeps_exact_kz():
    rs = reports("table4")
    doc = json.loads(render_reports(rs, RenderOptions("json"), evaluation_year=2023))
    assert doc["evaluation_year"] == 2023
    by_id = {d["researcher_id"]: d for d in doc["reports"]}
    assert by_id["R2"]["kz"] == next(r.kz for r in rs if r.researcher_id == "R2")
    assert by_id["R2"]["career_zone"] == "early"


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(fmt):
    rs = sort_reports(reports("table2") + reports("table3"))
    back, year = parse_reports(render_reports(rs, RenderOptions(fmt, kz_decimals=12), evaluation_year=2023))
    assert year == 2023
    assert [r.researcher_id for r in back] == [r.researcher_id for r in rs]
    for a, b in zip(back, rs):
        assert (a.h_index, a.g_index, a.total_citations, a.career_length) == (
            b.h_index, b.g_index, b.total_citations, b.career_length)
        assert a.kz == pytest.approx(b.kz, abs=1e-9 if fmt == "csv" else 0)


def test_sort_is_stable_for_ties():
    r = metric_report(table("table1", "R1"), CTX)
    twins = [r, metric_report(ResearcherProfile("Z", table("table1", "R1").publications), CTX)]
    assert [x.researcher_id for x in sort_reports(twins)] == ["R1", "Z"]


def test_display_kz_uses_tabulated_terms():
    r = metric_report(table("table1", "R1"), CTX)
    assert display_kz(r, 3) == 2.459
    assert r.kz == pytest.approx(2.458, abs=1e-3)


@pytest.mark.parametrize(
    "name, rid, footer", [("table1", "R1", "TC = 110, Kz = 2.459"), ("table4", "R2", "TC = 452, Kz = 4.969"),
                          ("table3", "R1", "TC = 250, Kz = 4.026")],
)
def test_breakdown_footer(name, rid, footer):
    p = table(name, rid)
    out = render_breakdown(kz_breakdown(p, CTX), researcher_id=rid, h=TABLES[name][rid]["h"])
    lines = out.splitlines()
    assert lines[0] == f"Researcher {rid}, h = {TABLES[name][rid]['h']}"
    assert lines[1].split() == ["S.No", "P_y", "C", "k", "dt", "k'"]
    assert len(lines) == 13
    assert lines[-1] == footer


def test_breakdown_rows_have_four_decimals():
    out = render_breakdown(kz_breakdown(table("table1", "R1"), CTX))
    lines = out.splitlines()
    assert lines[1].split() == ["1", "2014", "40", "2.2920", "9", "0.2547"]
    assert lines[10].split() == ["10", "2022", "10", "1.4307", "1", "1.4307"]


def test_breakdown_single_zero_paper():
    out = render_breakdown(kz_breakdown(ResearcherProfile("x", (Publication(2022, 0),)), CTX))
    assert out.splitlines()[-1] == "TC = 0, Kz = 0.000"


def test_breakdown_csv_and_json():
    rows = kz_breakdown(table("table1", "R1"), CTX)
    text = render_breakdown(rows, RenderOptions("csv"), evaluation_year=2023)
    body = [line for line in text.splitlines() if not line.startswith("#")]
    parsed = list(csv.reader(io.StringIO("\n".join(body))))
    assert parsed[0] == ["year", "citations", "impact", "age", "weighted_impact"]
    assert len(parsed) == 11
    assert text.splitlines()[-1] == "# TC = 110, Kz = 2.459"
    doc = json.loads(render_breakdown(rows, RenderOptions("json")))
    assert doc["total_citations"] == 110 and doc["kz_tabulated"] == 2.459
    assert len(doc["rows"]) == 10 and doc["rows"][0]["age"] == 9


@pytest.mark.parametrize("kwargs", [{"format": "xml"}, {"decimals": -1}, {"kz_decimals": 13}])
def test_render_options_validated(kwargs):
    with pytest.raises(ValueError):
        RenderOptions(**kwargs)


def test_parse_reports_errors():
    with pytest.raises(HeaderError):
        parse_reports("a,b\n1,2\n")
    with pytest.raises(RowError):
        parse_reports(",".join(REPORT_COLUMNS) + "\nR1,9,10,110,4,10\n")
    with pytest.raises(ParseError):
        parse_reports('{"reports": [}')
