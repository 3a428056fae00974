"""Demonstration recording, 4-way symmetry augmentation, and persistence.

File format: UTF-8 line-delimited JSON. The first line is a header carrying
the format version, the map and stat-bound hashes of the rule set the demos
were played under, the record count, and a checksum of the record lines.
Each following line is one record. The schema is documented in
docs/demo_format.md.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoding import BranchMasks, FlipAxis, action_masks, encode_observation, flip_action, flip_state
from .engine import ActionTriple, GameConfig, GameState, IllegalAction, Team, legal_action

FORMAT_VERSION = 1
AUG_TAGS = ("orig", "cols", "rows", "both")
_AXIS_FOR_TAG = {"cols": FlipAxis.COLS, "rows": FlipAxis.ROWS, "both": FlipAxis.BOTH}


class DemoError(Exception):
    """Demo dataset failure (corrupt file, schema mismatch, bad augmentation)."""


@dataclass(frozen=True)
class DemoRecord:
    session: str
    episode: int
    step: int
    team: Team
    observation: np.ndarray
    action: ActionTriple
    masks: BranchMasks
    aug: str = "orig"

    def to_json(self) -> dict:
        return {
            "session": self.session,
            "episode": self.episode,
            "step": self.step,
            "team": self.team.value,
            "aug": self.aug,
            "action": self.action.to_json(),
            "masks": self.masks.to_json(),
            "observation": [float(x) for x in self.observation],
        }

    @staticmethod
    def from_json(obj: dict) -> "DemoRecord":
        return DemoRecord(
            session=str(obj["session"]),
            episode=int(obj["episode"]),
            step=int(obj["step"]),
            team=Team(obj["team"]),
            observation=np.asarray(obj["observation"], dtype=np.float32),
            action=ActionTriple.from_json(obj["action"]),
            masks=BranchMasks.from_json(obj["masks"]),
            aug=str(obj["aug"]),
        )


def record_decision(
    session: str,
    episode: int,
    step: int,
    state: GameState,
    team: Team,
    acting_slot: int,
    action: ActionTriple,
    config: GameConfig,
) -> list[DemoRecord]:
    """One original record plus its three board-flip augmentations.

    Each augmented record is built by flipping the state, re-encoding the
    observation, recomputing the masks, and flipping the action, so all four
    are internally consistent decision samples.
    """
    if not legal_action(state, state.unit(team, acting_slot), action, config):
        raise IllegalAction("illegal_demo_action", f"{team.value} slot {acting_slot}")

    records = [
        DemoRecord(
            session=session,
            episode=episode,
            step=step,
            team=team,
            observation=encode_observation(state, team, acting_slot),
            action=action,
            masks=action_masks(state, team, acting_slot, config),
            aug="orig",
        )
    ]
    for tag, axis in _AXIS_FOR_TAG.items():
        f_state = flip_state(state, axis)
        records.append(
            DemoRecord(
                session=session,
                episode=episode,
                step=step,
                team=team,
                observation=encode_observation(f_state, team, acting_slot),
                action=flip_action(action, axis),
                masks=action_masks(f_state, team, acting_slot, config),
                aug=tag,
            )
        )
    return records


def augment_records(records: list[DemoRecord]) -> None:
    """Guard used when augmenting a raw record set in place is requested.

    Augmentation happens at recording time; re-running it over records that
    already carry non-original tags would double-count flips.
    """
    for r in records:
        if r.aug != "orig":
            raise DemoError(f"records already augmented (found tag {r.aug!r})")
    raise DemoError("augmentation is applied at recording time; re-record instead")


@dataclass
class DemoDataset:
    records: list[DemoRecord] = field(default_factory=list)
    map_hash: str = ""
    stat_hash: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DemoDataset):
            return NotImplemented
        if (self.map_hash, self.stat_hash) != (other.map_hash, other.stat_hash):
            return False
        if len(self.records) != len(other.records):
            return False
        return all(a.to_json() == b.to_json() for a, b in zip(self.records, other.records))

    def extend(self, records: list[DemoRecord]) -> None:
        self.records.extend(records)


def _record_line(record: DemoRecord) -> str:
    return json.dumps(record.to_json(), separators=(",", ":"))


def save(dataset: DemoDataset, path: str | Path) -> None:
    lines = [_record_line(r) for r in dataset.records]
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]
    header = {
        "format_version": FORMAT_VERSION,
        "map_hash": dataset.map_hash,
        "stat_hash": dataset.stat_hash,
        "count": len(lines),
        "checksum": digest,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for line in lines:
            fh.write(line + "\n")


def load(path: str | Path, expected_config: GameConfig | None = None) -> DemoDataset:
    """Load and verify a demo file.

    Raises ``DemoError`` naming the failing line on version mismatch,
    truncation, or checksum failure. A config-hash mismatch against
    ``expected_config`` only warns: the data is usable, just from another
    rule set.
    """
    import warnings

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DemoError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise DemoError(f"{path}: empty file, no header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DemoError(f"{path}: bad header line: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise DemoError(f"{path}: unsupported format version {header.get('format_version')}")

    body = lines[1:]
    expected_count = int(header["count"])
    records: list[DemoRecord] = []
    for i, line in enumerate(body):
        if i >= expected_count:
            break
        try:
            records.append(DemoRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise DemoError(
                f"{path}: corrupt record at line {i + 2} (last valid record index {i - 1}): {exc}"
            ) from exc
    if len(records) != expected_count:
        raise DemoError(
            f"{path}: truncated: header promises {expected_count} records, "
            f"found {len(records)} (last valid record index {len(records) - 1})"
        )
    digest = hashlib.sha256("\n".join(body[:expected_count]).encode()).hexdigest()[:16]
    if digest != header.get("checksum"):
        raise DemoError(f"{path}: checksum mismatch over {expected_count} records")

    dataset = DemoDataset(records=records, map_hash=header.get("map_hash", ""), stat_hash=header.get("stat_hash", ""))
    if expected_config is not None:
        if dataset.map_hash != expected_config.map_hash() or dataset.stat_hash != expected_config.stat_hash():
            warnings.warn(
                f"{path}: demo rule-set hashes do not match the current game config",
                stacklevel=2,
            )
    return dataset


def dataset_stats(dataset: DemoDataset) -> dict:
    histogram = {0: 0, 1: 0, 2: 0}
    per_team = {Team.BLUE.value: 0, Team.RED.value: 0}
    episodes = set()
    for r in dataset.records:
        histogram[r.action.action_type] += 1
        per_team[r.team.value] += 1
        episodes.add((r.session, r.episode))
    return {
        "records": len(dataset.records),
        "episodes": len(episodes),
        "action_type_histogram": histogram,
        "per_team": per_team,
    }


class DemoSession:
    """Accumulates records for one play session and flushes them on close."""

    def __init__(self, session_id: str, config: GameConfig):
        self.session_id = session_id
        self.config = config
        self.dataset = DemoDataset(map_hash=config.map_hash(), stat_hash=config.stat_hash())
        self.episode = 0
        self.step = 0

    def record(self, state: GameState, team: Team, acting_slot: int, action: ActionTriple) -> None:
        self.dataset.extend(
            record_decision(
                self.session_id, self.episode, self.step, state, team, acting_slot, action, self.config
            )
        )
        self.step += 1

    def next_episode(self) -> None:
        self.episode += 1
        self.step = 0

    def flush(self, path: str | Path) -> None:
        save(self.dataset, path)
