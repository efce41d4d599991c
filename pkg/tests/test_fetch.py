import pytest

from fakehttp import FakeResponse, FakeSession, connection_error, recorded
from kzindex.errors import FetchError, NotFoundError, SchemaError
from kzindex.fetch import DEFAULT_BASE_URL, FetchConfig, fetch_author_profile, map_works_payload
from kzindex.model import Publication

CFG = FetchConfig("A5023888391", base_url="http://mock.test/", page_size=2, delay=0)


def no_sleep(_):
    pass


def test_three_works(fixtures_dir):
    session = FakeSession(recorded(fixtures_dir, "three_works"))
    p = fetch_author_profile(CFG, session, sleep=no_sleep)
    assert p.id == "A5023888391"
    assert sorted(p.citations) == [0, 30, 40]
    url, params, timeout = session.calls[0]
    assert url == "http://mock.test/works"
    assert params == {"filter": "author.id:A5023888391", "per-page": "2", "cursor": "*"}
    assert timeout == 30.0


def test_no_works_gives_empty_profile(fixtures_dir):
    p = fetch_author_profile(CFG, FakeSession(recorded(fixtures_dir, "no_works")), sleep=no_sleep)
    assert p.publications == ()


def test_missing_year_names_the_work(fixtures_dir):
    with pytest.raises(SchemaError, match="W3002"):
        fetch_author_profile(CFG, FakeSession(recorded(fixtures_dir, "missing_year")), sleep=no_sleep)


def test_cursor_pagination_and_sort(fixtures_dir):
    session = FakeSession(recorded(fixtures_dir, "page1", "page2", "page3"))
    delays = []
    p = fetch_author_profile(CFG, session, sleep=delays.append)
    assert [c[1]["cursor"] for c in session.calls] == ["*", "IlsxNjA5MzcyODAwMDAwXSI=", "IlsxNjQwOTk1MjAwMDAwXSI="]
    assert len(delays) == 2
    assert p.publications == (Publication(2018, 3), Publication(2018, 55), Publication(2021, 12), Publication(2021, 12))


def test_fetch_is_order_stable(fixtures_dir):
    a = fetch_author_profile(CFG, FakeSession(recorded(fixtures_dir, "page1", "page2", "page3")), sleep=no_sleep)
    b = fetch_author_profile(CFG, FakeSession(recorded(fixtures_dir, "page2", "page1", "page3")), sleep=no_sleep)
    assert a == b


def test_polite_email_is_sent(fixtures_dir):
    cfg = FetchConfig("A1", polite_email="me@example.org", delay=0)
    session = FakeSession(recorded(fixtures_dir, "no_works"))
    fetch_author_profile(cfg, session, sleep=no_sleep)
    url, params, _ = session.calls[0]
    assert url == DEFAULT_BASE_URL + "/works"
    assert params["mailto"] == "me@example.org"


def test_not_found():
    with pytest.raises(NotFoundError) as exc:
        fetch_author_profile(CFG, FakeSession([FakeResponse(404, {"error": "not found"})]), sleep=no_sleep)
    assert exc.value.status == 404


def test_server_error_carries_status():
    with pytest.raises(FetchError) as exc:
        fetch_author_profile(CFG, FakeSession([FakeResponse(503, {})]), sleep=no_sleep)
    assert exc.value.status == 503 and not isinstance(exc.value, NotFoundError)


def test_failure_after_first_page_reports_progress(fixtures_dir):
    session = FakeSession(recorded(fixtures_dir, "page1") + [connection_error()])
    with pytest.raises(FetchError) as exc:
        fetch_author_profile(CFG, session, sleep=no_sleep)
    assert exc.value.pages_fetched == 1


def test_non_json_body():
    with pytest.raises(SchemaError):
        fetch_author_profile(CFG, FakeSession([FakeResponse(200, text="<html>")]), sleep=no_sleep)


def test_map_works_payload_examples():
    one = {"results": [{"id": "W1", "publication_year": 2020, "cited_by_count": 7}]}
    assert map_works_payload(one) == [Publication(2020, 7)]
    assert map_works_payload({"results": []}) == []
    two = {"results": [{"id": "W1", "publication_year": 2020, "cited_by_count": 1},
                       {"id": "W2", "publication_year": 2020, "cited_by_count": 9}]}
    assert map_works_payload(two) == [Publication(2020, 1), Publication(2020, 9)]


@pytest.mark.parametrize(
    "payload",
    [
        {},
        {"results": "nope"},
        {"results": [{"id": "W1", "publication_year": 2020}]},
        {"results": [{"id": "W1", "publication_year": 2020, "cited_by_count": -2}]},
        {"results": [{"id": "W1", "publication_year": "2020", "cited_by_count": 2}]},
        {"results": [{"id": "W1", "publication_year": True, "cited_by_count": 2}]},
    ],
)
def test_map_works_payload_schema_errors(payload):
    with pytest.raises(SchemaError):
        map_works_payload(payload)


def test_from_env():
    env = {"KZ_API_BASE_URL": "http://local:9000", "KZ_POLITE_EMAIL": "x@y.z"}
    cfg = FetchConfig.from_env("A1", environ=env)
    assert (cfg.base_url, cfg.polite_email) == ("http://local:9000", "x@y.z")
    cfg = FetchConfig.from_env("A1", environ=env, base_url="http://other", page_size=None)
    assert cfg.base_url == "http://other" and cfg.page_size == 200
    assert FetchConfig.from_env("A1", environ={}).base_url == DEFAULT_BASE_URL


@pytest.mark.parametrize("kwargs", [{"author_id": ""}, {"author_id": "A", "page_size": 0},
                                    {"author_id": "A", "page_size": 201}, {"author_id": "A", "timeout": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FetchConfig(**kwargs)
