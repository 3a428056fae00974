"""Batch episode runners: demo-recording simulation and mirror evaluation."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import standard_ai
from .demos import DemoSession
from .engine import (
    GameConfig,
    Outcome,
    Team,
    advance_phase,
    apply_action,
    new_game,
    phase_complete,
)
from .metrics import EpisodeMetrics, MetricsWriter
from .mirror_runtime import MirrorPolicy
from .scripted import get_scripted


def _play_scripted_team_phase(state, config, policy, rng, team, session=None, metrics=None):
    """The scripted blue side acts in slot order, optionally recording demos."""
    while state.outcome is Outcome.ONGOING:
        unit = next((u for u in state.team_units(team) if u.alive and not u.acted), None)
        if unit is None:
            break
        action = policy(state, unit, config, rng)
        if session is not None:
            session.record(state, team, unit.slot, action)
        state, events = apply_action(state, team, unit.slot, action, config)
        if metrics is not None:
            metrics.observe_all(events)
    return state


def run_standard_episodes(
    config: GameConfig,
    blue: str,
    episodes: int,
    seed: int = 0,
    session: DemoSession | None = None,
    writer: MetricsWriter | None = None,
) -> list[Outcome]:
    """Standard-mode games: scripted blue demonstrator vs the rule-based red."""
    policy = get_scripted(blue)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    outcomes = []
    for ep in range(episodes):
        state = new_game(config, mode="standard", seed=seed * 100_003 + ep)
        metrics = EpisodeMetrics()
        while state.outcome is Outcome.ONGOING:
            state = _play_scripted_team_phase(
                state, config, policy, rng, Team.BLUE, session=session, metrics=metrics
            )
            if state.outcome is not Outcome.ONGOING:
                break
            state, _ = advance_phase(state)
            state, events = standard_ai.play_phase(state, config, Team.RED)
            metrics.observe_all(events)
            if state.outcome is Outcome.ONGOING:
                state, _ = advance_phase(state)
        outcomes.append(state.outcome)
        if writer is not None:
            writer.add_episode(ep, metrics)
        if session is not None:
            session.next_episode()
    return outcomes


def run_mirror_episodes(
    config: GameConfig,
    blue: str,
    policy: MirrorPolicy,
    episodes: int,
    seed: int = 0,
    writer: MetricsWriter | None = None,
) -> list[Outcome]:
    """Mirror-mode games: scripted blue vs the trained policy on the mirrored red team."""
    blue_policy = get_scripted(blue)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    outcomes = []
    for ep in range(episodes):
        state = new_game(config, mode="mirror", seed=seed * 100_003 + ep)
        metrics = EpisodeMetrics()
        while state.outcome is Outcome.ONGOING:
            state = _play_scripted_team_phase(
                state, config, blue_policy, rng, Team.BLUE, metrics=metrics
            )
            if state.outcome is not Outcome.ONGOING:
                break
            state, _ = advance_phase(state)
            state, events = policy.play_phase(state, Team.RED)
            metrics.observe_all(events)
            if state.outcome is Outcome.ONGOING:
                state, _ = advance_phase(state)
        outcomes.append(state.outcome)
        if writer is not None:
            writer.add_episode(ep, metrics)
    return outcomes


def simulate(
    config: GameConfig,
    blue: str,
    episodes: int,
    seed: int = 0,
    record_path: str | Path | None = None,
    metrics_path: str | Path | None = None,
    session_id: str | None = None,
) -> list[Outcome]:
    """`simulate` CLI body: record demos and metrics from standard games."""
    session = None
    if record_path is not None:
        session = DemoSession(session_id or f"sim-{blue.split(':')[-1]}-{seed}", config)
    writer = MetricsWriter({Team.BLUE: "standard", Team.RED: blue.split(":")[-1]}) if metrics_path else None
    outcomes = run_standard_episodes(config, blue, episodes, seed=seed, session=session, writer=writer)
    if session is not None and record_path is not None:
        session.flush(record_path)
    if writer is not None and metrics_path is not None:
        writer.save(metrics_path)
    return outcomes


def evaluate(
    config: GameConfig,
    model_path: str | Path,
    blue: str,
    episodes: int,
    seed: int = 0,
    metrics_path: str | Path | None = None,
    sample: bool = False,
) -> tuple[list[Outcome], MirrorPolicy]:
    """`eval` CLI body: mirror games against a trained checkpoint."""
    policy = MirrorPolicy.from_checkpoint(
        model_path, config, rng=np.random.default_rng(np.random.SeedSequence(seed + 1)), sample=sample
    )
    writer = (
        MetricsWriter({Team.BLUE: str(Path(model_path).stem), Team.RED: blue.split(":")[-1]})
        if metrics_path
        else None
    )
    outcomes = run_mirror_episodes(config, blue, policy, episodes, seed=seed, writer=writer)
    if writer is not None and metrics_path is not None:
        writer.save(metrics_path)
    return outcomes, policy
