"""Batch command line: ``kz <command> ...``.

Exit status: 0 success, 1 usage error, 2 data error, 3 transport error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import re
import sys
from typing import Callable, TextIO

from . import __version__
from .errors import FetchError, FieldError, KzError, ParseError
from .fetch import FetchConfig, fetch_author_profile
from .metrics import MetricReport, h_index, kz_breakdown, metric_report
from .model import EvaluationContext, ProfileSet, empty_profiles, parse_profiles, profiles_to_json, validate
from .report import RenderOptions, parse_reports, render_breakdown, render_reports
from .stats import (
    CLASS_Z,
    classify,
    contributor_thresholds,
    goodness_of_fit,
    log_kz_stats,
)
from .svg import ScatterSpec, render_histogram_svg, render_scatter_svg

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRANSPORT = 0, 1, 2, 3

RANK_KEYS = {
    "kz": lambda r: r.kz,
    "h": lambda r: r.h_index,
    "g": lambda r: r.g_index,
    "citations": lambda r: r.total_citations,
    "career": lambda r: r.career_length,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _year(text: str) -> int:
    if not re.fullmatch(r"\d{4}", text):
        raise argparse.ArgumentTypeError(f"expected a 4-digit year, got {text!r}")
    return int(text)


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kz", description="K_z research impact index and cohort statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def common(p, fmt=True):
        p.add_argument("input", help="profiles (JSON/CSV), compute output, or scores JSON; '-' for stdin")
        p.add_argument("--year", type=_year, help="evaluation year (default: current year)")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("csv", "json", "text"), default="text")

    p = sub.add_parser("compute", help="metric report per researcher")
    common(p)

    p = sub.add_parser("breakdown", help="per-publication K_z table for one researcher")
    common(p)
    p.add_argument("--researcher", required=True)

    p = sub.add_parser("rank", help="researchers sorted by a metric")
    common(p)
    p.add_argument("--by", choices=sorted(RANK_KEYS), default="kz")

    p = sub.add_parser("cohort", help="log-normal goodness of fit and contributor thresholds")
    common(p, fmt=False)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--alpha", type=_fraction, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--tail", type=_fraction, default=0.25, help="contributor tail fraction (default 0.25)")
    p.add_argument("--exact-expected", action="store_true", help="use unrounded expected frequencies")
    p.add_argument("--strict-dof", action="store_true", help="subtract the two fitted parameters from dof")

    p = sub.add_parser("classify", help="top / middle / bottom contributors")
    common(p, fmt=False)
    p.add_argument("--alpha", type=_fraction, default=0.25, help="tail fraction (default 0.25)")

    p = sub.add_parser("plot", help="SVG scatter (K_z vs career length) or log(K_z) histogram")
    common(p, fmt=False)
    p.add_argument("--kind", choices=("scatter", "hist"), default="scatter")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--log-y", action="store_true", help="logarithmic K_z axis (scatter)")

    p = sub.add_parser("fetch", help="download one author's works as a profile JSON")
    p.add_argument("--author", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--base-url")
    p.add_argument("--email")
    p.add_argument("--page-size", type=int)
    p.add_argument("--timeout", type=float)
    return parser


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8", position=exc.start) from None


def _kind(text: str) -> str:
    stripped = text.lstrip("\ufeff \t\r\n")
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError:
            return "profiles"  # let the profile parser report the position
        if isinstance(doc, dict):
            if "reports" in doc:
                return "reports"
            if "scores" in doc:
                return "scores"
        return "profiles"
    for line in stripped.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        return "profiles" if line.strip().startswith("researcher_id,year,") else "reports"
    return "profiles"


def _parse_scores(text: str) -> list[tuple[str, float]]:
    doc = json.loads(text)
    entries = doc["scores"]
    if not isinstance(entries, list):
        raise FieldError("$.scores", "expected a list")
    out = []
    for i, e in enumerate(entries):
        try:
            out.append((str(e["id"]), float(e["kz"])))
        except (KeyError, TypeError, ValueError):
            raise FieldError(f"$.scores[{i}]", "expected {'id': ..., 'kz': number}") from None
    return out


class _Session:
    """Per-invocation state: clock, streams, and input loading."""

    def __init__(self, args, clock, stdin, stdout, stderr):
        self.args = args
        self.year = args.year if getattr(args, "year", None) else clock()
        self.ctx = EvaluationContext(self.year)
        self.stdin, self.stdout, self.stderr = stdin, stdout, stderr

    def warn(self, msg):
        self.stderr.write(f"warning: {msg}\n")

    def emit(self, text):
        if getattr(self.args, "output", None):
            with open(self.args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            self.stdout.write(text)

    def profiles(self) -> ProfileSet:
        text = _read(self.args.input, self.stdin)
        if _kind(text) != "profiles":
            raise KzError(f"{self.args.input}: expected publication profiles")
        profiles = validate(parse_profiles(text, self.args.input), self.ctx)
        for rid in empty_profiles(profiles):
            self.warn(f"researcher {rid!r} has no publications; metrics reported as zero")
        return profiles

    def reports(self) -> list[MetricReport]:
        return self._reports_from(_read(self.args.input, self.stdin))

    def scores(self) -> list[tuple[str, float]]:
        text = _read(self.args.input, self.stdin)
        if _kind(text) == "scores":
            return _parse_scores(text)
        return [(r.researcher_id, r.kz) for r in self._reports_from(text) if not r.empty]

    def _reports_from(self, text) -> list[MetricReport]:
        kind = _kind(text)
        if kind == "reports":
            return parse_reports(text)[0]
        if kind == "scores":
            raise KzError(f"{self.args.input}: a scores document carries no career data")
        profiles = validate(parse_profiles(text, self.args.input), self.ctx)
        for rid in empty_profiles(profiles):
            self.warn(f"researcher {rid!r} has no publications; metrics reported as zero")
        return [metric_report(p, self.ctx) for p in profiles]


def _cmd_compute(s: _Session):
    reports = [metric_report(p, s.ctx) for p in s.profiles()]
    s.emit(render_reports(reports, RenderOptions(s.args.format), evaluation_year=s.year))


def _cmd_breakdown(s: _Session):
    profiles = s.profiles()
    try:
        profile = profiles.get(s.args.researcher)
    except KeyError:
        raise KzError(f"researcher {s.args.researcher!r} not found in {s.args.input}") from None
    rows = kz_breakdown(profile, s.ctx)
    s.emit(
        render_breakdown(
            rows,
            RenderOptions(s.args.format),
            researcher_id=profile.id,
            h=h_index(profile.citations),
            evaluation_year=s.year,
        )
    )


def _cmd_rank(s: _Session):
    key = RANK_KEYS[s.args.by]
    ordered = sorted(s.reports(), key=lambda r: (-key(r), r.researcher_id))
    s.emit(render_reports(ordered, RenderOptions(s.args.format), presorted=True, evaluation_year=s.year))


def _class_labels():
    def bound(z):
        if z == 0:
            return "mu"
        coef = "" if abs(z) == 1 else f"{abs(z):g}"
        return f"mu {'+' if z > 0 else '-'} {coef}sigma"

    labels = [f"log(Kz) < {bound(CLASS_Z[0])}"]
    for lo, hi in zip(CLASS_Z, CLASS_Z[1:]):
        labels.append(f"{bound(lo)} <= log(Kz) < {bound(hi)}")
    labels.append(f"log(Kz) >= {bound(CLASS_Z[-1])}")
    return labels


def _cmd_cohort(s: _Session):
    a = s.args
    scores = s.scores()
    gof = goodness_of_fit([kz for _, kz in scores], a.alpha, a.exact_expected, a.strict_dof)
    thr = contributor_thresholds(gof.stats, a.tail)
    decision = "reject" if gof.reject else "fail to reject"

    if a.format == "json":
        doc = {
            "evaluation_year": s.year,
            "n": gof.stats.n,
            "excluded": gof.stats.excluded,
            "mu": gof.stats.mu,
            "sigma": gof.stats.sigma,
            "class_edges": list(gof.class_edges),
            "observed": list(gof.observed),
            "expected": list(gof.expected),
            "exact_expected": gof.exact_expected,
            "chi_square": gof.chi_square,
            "dof": gof.dof,
            "alpha": gof.alpha,
            "critical_value": gof.critical_value,
            "decision": decision,
            "thresholds": {"tail": thr.alpha, "z": thr.z_alpha, "lower": thr.lower, "upper": thr.upper},
        }
        s.emit(json.dumps(doc, indent=2) + "\n")
        return

    exp_fmt = (lambda e: f"{e:.3f}") if gof.exact_expected else str
    labels = _class_labels()
    width = max(len(x) for x in labels)
    lines = [
        f"# evaluation year: {s.year}",
        f"n = {gof.stats.n} (non-positive K_z excluded: {gof.stats.excluded})",
        f"mu = {gof.stats.mu:.5f}",
        f"sigma = {gof.stats.sigma:.5f}",
        "",
        f"{'class'.ljust(width)}  {'observed':>8}  {'expected':>9}",
    ]
    for label, o, e in zip(labels, gof.observed, gof.expected):
        lines.append(f"{label.ljust(width)}  {o:>8}  {exp_fmt(e):>9}")
    lines += [
        f"{'total'.ljust(width)}  {sum(gof.observed):>8}",
        "",
        f"chi-square = {gof.chi_square:.3f}",
        f"dof = {gof.dof}",
        f"alpha = {gof.alpha:g}",
        f"critical value = {gof.critical_value:.3f}",
        f"decision: {decision}",
        "",
        f"top {thr.alpha:.0%} threshold: Kz >= {thr.upper:.4f}",
        f"bottom {thr.alpha:.0%} threshold: Kz <= {thr.lower:.4f}",
    ]
    s.emit("\n".join(lines) + "\n")


def _cmd_classify(s: _Session):
    scores = s.scores()
    stats = log_kz_stats([kz for _, kz in scores])
    thr = contributor_thresholds(stats, s.args.alpha)
    parts = classify(scores, thr)
    lines = [
        f"# evaluation year: {s.year}",
        f"# tail = {thr.alpha:g}, z = {thr.z_alpha:.4f}, lower = {thr.lower:.4f}, upper = {thr.upper:.4f}",
    ]
    for name, tier in (("top", parts.top), ("middle", parts.middle), ("bottom", parts.bottom)):
        lines.append(f"{name} ({len(tier)})")
        lines += [f"  {rid}  {kz:.3f}" for rid, kz in tier]
    s.emit("\n".join(lines) + "\n")


def _cmd_plot(s: _Session):
    a = s.args
    if a.kind == "scatter":
        svg = render_scatter_svg(ScatterSpec.from_reports(s.reports(), log_y=a.log_y))
    else:
        svg = render_histogram_svg([kz for _, kz in s.scores()], bins=a.bins)
    s.emit(svg)


def _cmd_fetch(s: _Session, http_session=None):
    a = s.args
    cfg = FetchConfig.from_env(
        a.author, base_url=a.base_url, polite_email=a.email, page_size=a.page_size, timeout=a.timeout
    )
    profile = fetch_author_profile(cfg, session=http_session)
    if not profile.publications:
        s.warn(f"author {a.author!r} has no works")
    s.emit(profiles_to_json(ProfileSet((profile,), source=cfg.base_url)))


COMMANDS = {
    "compute": _cmd_compute,
    "breakdown": _cmd_breakdown,
    "rank": _cmd_rank,
    "cohort": _cmd_cohort,
    "classify": _cmd_classify,
    "plot": _cmd_plot,
}


def _current_year() -> int:
    return datetime.date.today().year


def run(
    argv,
    clock: Callable[[], int] = _current_year,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
    stdin: TextIO | None = None,
    http_session=None,
) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE

    session = _Session(args, clock, stdin, stdout, stderr)
    try:
        if args.command == "fetch":
            _cmd_fetch(session, http_session)
        else:
            COMMANDS[args.command](session)
    except FetchError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_TRANSPORT
    except (KzError, ValueError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))
