"""Knowledge agent: grows the rule-base from curated HTML pages.

Sources opt in by marking a table with the ``kb-rules`` class; its rows
carry condition A, condition B, conclusion, and solution in the first
four cells (one header row is skipped). Extraction is tolerant of the
HTML around the table: broken markup outside marked tables is simply
never seen, and malformed rows inside them are counted, not fatal.

Acquisition is add-only. A scraped pair that already exists keeps the
stored rule; every sync produces an exact accounting report and runs
offline in tests through an injected fetch transport.
"""

from __future__ import annotations

import json
import threading
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from .rules import DuplicateRuleError, EmptyFieldError, RuleBase, match_key, normalize

Fetcher = Callable[[str, float], str]

TABLE_CLASS = "kb-rules"


class Candidate(NamedTuple):
    """A well-formed scraped row, not yet checked against the rule-base."""

    condition_a: str
    condition_b: str
    conclusion: str
    solution: str


@dataclass(frozen=True)
class SourceConfig:
    """Where to scrape and how often."""

    sources: tuple[str, ...] = ()
    poll_interval_seconds: float = 3600
    fetch_timeout_seconds: float = 10

    def __post_init__(self) -> None:
        if self.poll_interval_seconds <= 0 or self.fetch_timeout_seconds <= 0:
            raise ValueError("intervals must be positive")
        object.__setattr__(self, "sources", tuple(self.sources))


@dataclass
class SourceReport:
    """Per-source accounting; candidates = added + skipped_duplicates + malformed."""

    url: str
    fetched: bool = False
    candidates: int = 0
    added: int = 0
    skipped_duplicates: int = 0
    malformed: int = 0
    error: str | None = None


@dataclass
class SyncReport:
    started: datetime
    finished: datetime
    sources: list[SourceReport] = field(default_factory=list)

    @property
    def total_added(self) -> int:
        return sum(s.added for s in self.sources)

    def to_dict(self) -> dict:
        return {
            "started": self.started.isoformat(),
            "finished": self.finished.isoformat(),
            "sources": [
                {
                    "url": s.url,
                    "fetched": s.fetched,
                    "candidates": s.candidates,
                    "added": s.added,
                    "skipped_duplicates": s.skipped_duplicates,
                    "malformed": s.malformed,
                    "error": s.error,
                }
                for s in self.sources
            ],
        }


class _RuleTableScan(HTMLParser):
    """Stream scan collecting cell texts of rows inside kb-rules tables.

    Tables nest; rows are credited to the innermost open table, and only
    marked tables accumulate anything. Stray/unclosed tr and td tags are
    tolerated by flushing whatever is open.
    """

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.tables: list[list[list[str]]] = []  # finished kb-rules tables
        self._open: list[list[list[str]] | None] = []  # None = unmarked table
        self._row: list[str] | None = None
        self._cell: list[str] | None = None

    def _capturing(self) -> bool:
        return bool(self._open) and self._open[-1] is not None

    def _flush_cell(self) -> None:
        if self._cell is not None and self._row is not None:
            self._row.append("".join(self._cell))
        self._cell = None

    def _flush_row(self) -> None:
        self._flush_cell()
        if self._row is not None and self._capturing():
            self._open[-1].append(self._row)
        self._row = None

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag == "table":
            self._flush_row()
            classes = (dict(attrs).get("class") or "").split()
            self._open.append([] if TABLE_CLASS in classes else None)
        elif tag == "tr" and self._capturing():
            self._flush_row()
            self._row = []
        elif tag in ("td", "th") and self._row is not None:
            self._flush_cell()
            self._cell = []

    def handle_endtag(self, tag: str) -> None:
        if tag == "table":
            self._flush_row()
            if self._open:
                finished = self._open.pop()
                if finished is not None:
                    self.tables.append(finished)
        elif tag == "tr" and self._capturing():
            self._flush_row()
        elif tag in ("td", "th"):
            self._flush_cell()

    def handle_data(self, data: str) -> None:
        if self._cell is not None:
            self._cell.append(data)

    def close(self) -> None:
        super().close()
        while self._open:  # unclosed tables at EOF still count
            self.handle_endtag("table")


def extract_rules(html_text: str) -> tuple[list[Candidate], int]:
    """Pull rule candidates out of a page.

    Returns the well-formed candidates in document order plus the count
    of malformed rows (fewer than four cells, or an empty field among
    the first four). The first row of every marked table is a header
    and is dropped without judgment.
    """
    scan = _RuleTableScan()
    scan.feed(html_text)
    scan.close()

    candidates: list[Candidate] = []
    malformed = 0
    for rows in scan.tables:
        for row in rows[1:]:
            if len(row) < 4:
                malformed += 1
                continue
            fields = [normalize(cell) for cell in row[:4]]
            if any(not f for f in fields):
                malformed += 1
                continue
            candidates.append(Candidate(*fields))
    return candidates, malformed


def dedup(
    candidates: Sequence[Candidate], rulebase: RuleBase
) -> tuple[list[Candidate], list[Candidate]]:
    """Split candidates into (new, duplicates), order preserved.

    Duplicate means: condition pair already in the rule-base, or seen
    earlier in this same candidate list.
    """
    known = {rule.pair for rule in rulebase}
    fresh: list[Candidate] = []
    dupes: list[Candidate] = []
    for cand in candidates:
        key = (match_key(cand.condition_a), match_key(cand.condition_b))
        if key in known:
            dupes.append(cand)
        else:
            known.add(key)
            fresh.append(cand)
    return fresh, dupes


def default_fetcher(url: str, timeout: float) -> str:
    """Plain urllib transport; handles http(s) and file URLs."""
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read().decode("utf-8", errors="replace")


def sync(
    rulebase: RuleBase,
    config: SourceConfig,
    fetcher: Fetcher = default_fetcher,
) -> SyncReport:
    """One acquisition pass over every configured source.

    Fetch failures mark the source and move on; nothing in a page can
    corrupt the rule-base because every insertion goes through
    add_rule. Raises ValueError if no sources are configured.
    """
    if not config.sources:
        raise ValueError("no sources configured")
    started = datetime.now(timezone.utc)
    reports: list[SourceReport] = []
    for url in config.sources:
        report = SourceReport(url=url)
        reports.append(report)
        try:
            page = fetcher(url, config.fetch_timeout_seconds)
        except Exception as exc:
            report.error = f"{type(exc).__name__}: {exc}"
            continue
        report.fetched = True
        candidates, malformed = extract_rules(page)
        report.malformed = malformed
        report.candidates = len(candidates) + malformed
        fresh, dupes = dedup(candidates, rulebase)
        report.skipped_duplicates = len(dupes)
        for cand in fresh:
            try:
                rulebase.add_rule(*cand)
                report.added += 1
            except DuplicateRuleError:
                report.skipped_duplicates += 1
            except EmptyFieldError:
                report.malformed += 1
    return SyncReport(started, datetime.now(timezone.utc), reports)


def append_report(log_path: str | Path, report: SyncReport) -> None:
    """Append one JSON line per sync to the agent log."""
    with open(log_path, "a", encoding="utf-8") as log:
        log.write(json.dumps(report.to_dict(), ensure_ascii=False) + "\n")


def run_periodic(
    rulebase: RuleBase,
    config: SourceConfig,
    fetcher: Fetcher = default_fetcher,
    stop_signal: threading.Event | None = None,
    *,
    log_path: str | Path | None = None,
    on_report: Callable[[SyncReport], None] | None = None,
    sync_once: Callable[[], SyncReport] | None = None,
) -> int:
    """Sync on every poll tick until the stop signal arrives.

    The first sync happens one interval after start, and runs execute
    inline on this thread, so two syncs can never overlap; a tick whose
    predecessor is still running is simply absorbed. ``sync_once``
    substitutes the sync step (the HTTP service routes it through its
    writer lock); ``rulebase`` is ignored when it is given. Returns the
    number of syncs performed.
    """
    if stop_signal is None:
        stop_signal = threading.Event()
    if sync_once is None:
        sync_once = lambda: sync(rulebase, config, fetcher)  # noqa: E731

    runs = 0
    while not stop_signal.wait(config.poll_interval_seconds):
        report = sync_once()
        runs += 1
        if log_path is not None:
            append_report(log_path, report)
        if on_report is not None:
            on_report(report)
    return runs


def start_background(
    rulebase: RuleBase,
    config: SourceConfig,
    fetcher: Fetcher = default_fetcher,
    **kwargs,
) -> tuple[threading.Thread, threading.Event]:
    """Spawn run_periodic on a daemon thread; set the event to stop it."""
    stop = threading.Event()
    thread = threading.Thread(
        target=run_periodic,
        args=(rulebase, config, fetcher, stop),
        kwargs=kwargs,
        name="knowledge-agent",
        daemon=True,
    )
    thread.start()
    return thread, stop
