"""Deterministic per-namespace daily Markdown digests.

A summary is a pure function of store state for one UTC calendar day:
sessions active that day, how many records of each type were written,
which conflicts opened, and which were still open at day end. Regenerating
the same day always produces identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .conflicts import ConflictRecord, ConflictState
from .errors import FutureDate
from .model import Session

MS_PER_DAY = 86_400_000


def parse_date(date_str: str) -> int:
    """YYYY-MM-DD -> UTC midnight in ms. Raises ValueError on bad input."""
    day = datetime.strptime(date_str, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    return int(day.timestamp() * 1000)


def format_date(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc).strftime("%Y-%m-%d")


def _hhmm(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc).strftime("%H:%M")


@dataclass(frozen=True)
class DailySummary:
    namespace: str
    date: str
    sessions: list
    counts_by_type: dict
    new_conflicts: list
    unresolved_conflicts: list
    rendered: str

    def to_dict(self) -> dict:
        return {
            "namespace": self.namespace,
            "date": self.date,
            "sessions": self.sessions,
            "counts_by_type": self.counts_by_type,
            "new_conflicts": self.new_conflicts,
            "unresolved_conflicts": self.unresolved_conflicts,
            "rendered": self.rendered,
        }


def _conflict_line(conflict: ConflictRecord) -> str:
    n = len(conflict.candidates)
    plural = "s" if n != 1 else ""
    return (
        f"- `{conflict.conflict_id}` — record `{conflict.new_record}` vs "
        f"{n} candidate{plural}, {conflict.state.value} "
        f"([review](/ui/#conflict-{conflict.conflict_id}))"
    )


def _render(namespace: str, date: str, sessions: list[Session],
            counts: dict, new_conflicts: list[ConflictRecord],
            unresolved: list[ConflictRecord]) -> str:
    lines = [f"# Daily summary — {namespace} — {date}", ""]

    lines.append("## Sessions")
    if sessions:
        for s in sessions:
            lines.append(
                f"- `{s.session_id}` {_hhmm(s.start)}–{_hhmm(s.end)} UTC"
            )
    else:
        lines.append("- none")
    lines.append("")

    lines.append("## Memory counts")
    total = sum(counts.values())
    for label in sorted(counts):
        lines.append(f"- {label}: {counts[label]}")
    lines.append(f"- **total**: {total}")
    lines.append("")

    lines.append("## New conflicts")
    if new_conflicts:
        lines.extend(_conflict_line(c) for c in new_conflicts)
    else:
        lines.append("- none")
    lines.append("")

    lines.append("## Unresolved conflicts")
    if unresolved:
        lines.extend(_conflict_line(c) for c in unresolved)
    else:
        lines.append("- none")
    lines.append("")

    return "\n".join(lines)


def generate(store, namespace: str, date_str: str, *,
             write: bool = True) -> DailySummary:
    """Build (and by default persist) the digest for one UTC day.

    The day must not lie in the future of the store's clock.
    """
    day_start = parse_date(date_str)
    day_end = day_start + MS_PER_DAY
    today_start = (store.clock() // MS_PER_DAY) * MS_PER_DAY
    if day_start > today_start:
        raise FutureDate(
            f"{date_str} is in the future (today is {format_date(today_start)})"
        )

    sessions = [
        s for s in store.sessions(namespace)
        if s.start < day_end and s.end > day_start
    ]

    counts: dict[str, int] = {}
    for record in store.changed_since(namespace, day_start, day_end):
        if day_start <= record.created_at < day_end:
            label = record.type.label
            counts[label] = counts.get(label, 0) + 1

    conflicts = store.list_conflicts(namespace)
    new_conflicts = sorted(
        (c for c in conflicts if day_start <= c.opened_at < day_end),
        key=lambda c: c.conflict_id,
    )
    unresolved = sorted(
        (
            c for c in conflicts
            if c.opened_at < day_end
            and (c.state is ConflictState.OPEN
                 or (c.resolution or {}).get("at", 0) >= day_end)
        ),
        key=lambda c: c.conflict_id,
    )

    rendered = _render(namespace, date_str, sessions, counts,
                       new_conflicts, unresolved)
    summary = DailySummary(
        namespace=namespace,
        date=date_str,
        sessions=[s.to_dict() for s in sessions],
        counts_by_type=dict(sorted(counts.items())),
        new_conflicts=[c.to_dict() for c in new_conflicts],
        unresolved_conflicts=[c.to_dict() for c in unresolved],
        rendered=rendered,
    )
    if write:
        path = Path(store.root) / namespace / "daily" / f"{date_str}.md"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(rendered, encoding="utf-8")
    return summary
