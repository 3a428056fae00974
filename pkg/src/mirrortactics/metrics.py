"""Gameplay metrics: per-team event counters and the comparison report.

Counted per episode and team: kills, deaths, attacks (initiated combats),
movements (any on-board displacement, including attack launch relocations),
advantage / disadvantage attacks (weapon-triangle 1.2x / 0.8x), effective
attacks (the 1.5x bow-vs-flier bonus), and wins/ties.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    AttackEvent,
    Event,
    GameOverEvent,
    KillEvent,
    MoveEvent,
    Outcome,
    Team,
)

METRIC_KEYS = (
    "kills",
    "deaths",
    "attacks",
    "movements",
    "advantage_attacks",
    "disadvantage_attacks",
    "effective_attacks",
    "wins",
)
CSV_HEADER = [
    "episode",
    "team",
    "opponent",
    "kills",
    "deaths",
    "attacks",
    "movements",
    "advantage_attacks",
    "disadvantage_attacks",
    "effective_attacks",
    "win",
    "tie",
]


class MetricsError(Exception):
    pass


@dataclass
class TeamCounters:
    kills: int = 0
    deaths: int = 0
    attacks: int = 0
    movements: int = 0
    advantage_attacks: int = 0
    disadvantage_attacks: int = 0
    effective_attacks: int = 0
    win: int = 0
    tie: int = 0


@dataclass
class EpisodeMetrics:
    """Counters for one episode, updated from the engine event stream."""

    blue: TeamCounters = field(default_factory=TeamCounters)
    red: TeamCounters = field(default_factory=TeamCounters)
    outcome: Outcome | None = None

    def team(self, team: Team) -> TeamCounters:
        return self.blue if team is Team.BLUE else self.red

    def observe(self, event: Event) -> None:
        if isinstance(event, AttackEvent):
            c = self.team(event.team)
            c.attacks += 1
            if event.triangle > 1.0:
                c.advantage_attacks += 1
            elif event.triangle < 1.0:
                c.disadvantage_attacks += 1
            if event.effectiveness > 1.0:
                c.effective_attacks += 1
        elif isinstance(event, MoveEvent):
            if event.to_tile != event.from_tile:
                self.team(event.team).movements += 1
        elif isinstance(event, KillEvent):
            self.team(event.team).deaths += 1
            self.team(event.team.opponent).kills += 1
        elif isinstance(event, GameOverEvent):
            self.outcome = event.outcome
            if event.outcome is Outcome.BLUE_WIN:
                self.blue.win = 1
            elif event.outcome is Outcome.RED_WIN:
                self.red.win = 1
            elif event.outcome is Outcome.TIE:
                self.blue.tie = 1
                self.red.tie = 1

    def observe_all(self, events: list[Event]) -> None:
        for e in events:
            self.observe(e)


class MetricsWriter:
    """Accumulates per-episode rows and writes the fixed-header CSV."""

    def __init__(self, opponent_labels: dict[Team, str] | None = None):
        self.rows: list[dict] = []
        self.opponent_labels = opponent_labels or {Team.BLUE: "red", Team.RED: "blue"}

    def add_episode(self, episode: int, metrics: EpisodeMetrics) -> None:
        for team in (Team.BLUE, Team.RED):
            c = metrics.team(team)
            self.rows.append(
                {
                    "episode": episode,
                    "team": team.value,
                    "opponent": self.opponent_labels[team],
                    "kills": c.kills,
                    "deaths": c.deaths,
                    "attacks": c.attacks,
                    "movements": c.movements,
                    "advantage_attacks": c.advantage_attacks,
                    "disadvantage_attacks": c.disadvantage_attacks,
                    "effective_attacks": c.effective_attacks,
                    "win": c.win,
                    "tie": c.tie,
                }
            )

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
            writer.writeheader()
            writer.writerows(self.rows)


def load_metrics(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_HEADER:
                raise MetricsError(f"{path}: unexpected header {reader.fieldnames}")
            return [
                {k: (v if k in ("team", "opponent") else int(v)) for k, v in row.items()}
                for row in reader
            ]
    except OSError as exc:
        raise MetricsError(f"cannot read metrics {path}: {exc}") from exc


@dataclass
class SourceSummary:
    name: str
    episodes: int
    opponents: int
    totals: dict
    per_episode: dict
    per_opponent: dict


def summarize(name: str, rows: list[dict], team: str | None = None) -> SourceSummary:
    """Totals and means for one metrics file.

    ``team`` restricts to one side (e.g. the agent's); per-opponent means
    divide the totals by the number of distinct opponents the source played,
    which is how multi-opponent agent averages are reported.
    """
    selected = [r for r in rows if team is None or r["team"] == team]
    episodes = len({r["episode"] for r in selected})
    if episodes == 0:
        raise MetricsError(f"{name}: no episodes for team {team!r}")
    opponents = len({r["opponent"] for r in selected})
    totals = {}
    for key in METRIC_KEYS:
        col = "win" if key == "wins" else key
        totals[key] = sum(r[col] for r in selected)
    per_episode = {k: v / episodes for k, v in totals.items()}
    per_opponent = {k: v / opponents for k, v in totals.items()}
    return SourceSummary(
        name=name,
        episodes=episodes,
        opponents=opponents,
        totals=totals,
        per_episode=per_episode,
        per_opponent=per_opponent,
    )


def report(
    sources: list[tuple[str, list[dict], str | None]],
    out_csv: str | Path | None = None,
    out_fig: str | Path | None = None,
) -> tuple[str, list[SourceSummary]]:
    """Comparison table over sources: totals, per-episode and per-opponent means.

    Returns (aligned text table, summaries). Optionally writes the table as
    CSV and a bar-chart figure per metric.
    """
    if not sources:
        raise MetricsError("report requires at least one metrics source")
    summaries = [summarize(name, rows, team) for name, rows, team in sources]

    lines = []
    name_w = max(len(s.name) for s in summaries) + 2
    header = "metric".ljust(22) + "".join(s.name.rjust(name_w + 14) for s in summaries)
    lines.append(header)
    for key in METRIC_KEYS:
        cells = []
        for s in summaries:
            cells.append(
                f"{s.totals[key]:6d} tot {s.per_episode[key]:7.2f}/ep".rjust(name_w + 14)
            )
        lines.append(key.ljust(22) + "".join(cells))
    lines.append(
        "episodes".ljust(22)
        + "".join(f"{s.episodes:6d}".rjust(name_w + 14) for s in summaries)
    )
    text = "\n".join(lines)

    if out_csv is not None:
        with open(out_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric"] + [f"{s.name}_{c}" for s in summaries for c in ("total", "per_episode", "per_opponent")])
            for key in METRIC_KEYS:
                row = [key]
                for s in summaries:
                    row += [s.totals[key], f"{s.per_episode[key]:.4f}", f"{s.per_opponent[key]:.4f}"]
                writer.writerow(row)
    if out_fig is not None:
        from .plotting import plot_metric_comparison

        table = {s.name: s.per_episode for s in summaries}
        plot_metric_comparison(table, list(METRIC_KEYS), out_fig)
    return text, summaries
