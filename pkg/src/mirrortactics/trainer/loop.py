"""The full training run: rollouts, GAIL, BC, PPO updates, logging, checkpoints.

Determinism contract: one master seed fans out into independent substreams
(init, env seeds, action sampling, repair, shuffles, demo sampling), all
stepping in a fixed order, so two runs with the same seed produce
bit-identical training logs and checkpoints.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import demos as demos_mod
from ..encoding import ACTION_ONEHOT_SIZE, OBS_SIZE
from ..engine import GameConfig, Outcome
from ..neural import (
    Adam,
    DiscArch,
    NumericError,
    PolicyArch,
    Params,
    bc_grads,
    init_disc_params,
    init_policy_params,
    save_checkpoint,
)
from .config import TrainerConfig, TrainerConfigError
from .env import GameEnv
from .rollout import collect_rollouts
from .update import DemoArrays, ppo_update, update_discriminator

LOG_HEADER = "step,mean_cum_reward,gail_loss,bc_loss,policy_loss,value_loss,entropy,win_rate,tie_rate"


@dataclass
class TrainResult:
    checkpoint_path: Path
    log_path: Path
    rows: list[dict]
    final_params: Params


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _row_line(row: dict) -> str:
    return ",".join(
        [str(row["step"])]
        + [
            _fmt(row[k])
            for k in (
                "mean_cum_reward",
                "gail_loss",
                "bc_loss",
                "policy_loss",
                "value_loss",
                "entropy",
                "win_rate",
                "tie_rate",
            )
        ]
    )


def _demo_file_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


class Trainer:
    def __init__(
        self,
        tcfg: TrainerConfig,
        game_config: GameConfig,
        demo_path: str | Path | None = None,
        out_dir: str | Path = "run",
    ):
        self.tcfg = tcfg
        self.game_config = game_config
        self.out_dir = Path(out_dir)
        self.demo_path = Path(demo_path) if demo_path is not None else None
        if tcfg.uses_demos and self.demo_path is None:
            raise TrainerConfigError(
                "GAIL or BC strength is positive but no demonstration file was given"
            )
        self.demo: DemoArrays | None = None
        self.demo_hash = ""
        if self.demo_path is not None:
            dataset = demos_mod.load(self.demo_path, expected_config=game_config)
            if tcfg.uses_demos and len(dataset) == 0:
                raise TrainerConfigError(f"demo file {self.demo_path} holds no records")
            self.demo = DemoArrays.from_dataset(dataset)
            self.demo_hash = _demo_file_hash(self.demo_path)

        root = np.random.SeedSequence(tcfg.seed)
        (
            ss_policy,
            ss_disc,
            ss_sample,
            ss_shuffle,
            ss_demo,
            ss_repair,
            ss_envs,
        ) = root.spawn(7)
        self.policy_arch = PolicyArch(obs_size=OBS_SIZE, hidden=tcfg.ppo_hidden, n_signals=tcfg.n_signals)
        self.params = init_policy_params(self.policy_arch, seed=int(ss_policy.generate_state(1)[0]))
        self.policy_opt = Adam(self.params)
        self.disc_arch = None
        self.disc_params: Params | None = None
        self.disc_opt = None
        if tcfg.gail_strength > 0:
            self.disc_arch = DiscArch(obs_size=OBS_SIZE, action_size=ACTION_ONEHOT_SIZE, hidden=tcfg.gail_hidden)
            self.disc_params = init_disc_params(self.disc_arch, seed=int(ss_disc.generate_state(1)[0]))
            self.disc_opt = Adam(self.disc_params)

        self.sample_rng = np.random.default_rng(ss_sample)
        self.shuffle_rng = np.random.default_rng(ss_shuffle)
        self.demo_rng = np.random.default_rng(ss_demo)
        repair_children = ss_repair.spawn(tcfg.env_count)
        env_children = ss_envs.spawn(tcfg.env_count)
        self.envs = [
            GameEnv(game_config, np.random.default_rng(env_children[i]), np.random.default_rng(repair_children[i]))
            for i in range(tcfg.env_count)
        ]

    # -- manifest / checkpointing ------------------------------------------

    def _manifest(self, step_count: int) -> dict:
        return {
            "format_version": 1,
            "arch": self.policy_arch.to_json(),
            "disc_arch": self.disc_arch.to_json() if self.disc_arch else None,
            "trainer_config": self.tcfg.to_json(),
            "config_hash": self.game_config.config_hash(),
            "demo_hash": self.demo_hash,
            "step_count": step_count,
        }

    def _save(self, path: Path, step_count: int) -> None:
        tensors = dict(self.params)
        if self.disc_params is not None:
            tensors.update(self.disc_params)
        save_checkpoint(path, self._manifest(step_count), tensors)

    # -- the run --------------------------------------------------------------

    def train(self) -> TrainResult:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if self.tcfg.preset == "bc_only":
            rows = self._train_bc_only()
        else:
            rows = self._train_rl()

        log_path = self.out_dir / "training_log.csv"
        log_path.write_text(LOG_HEADER + "\n" + "\n".join(_row_line(r) for r in rows) + "\n")
        final_path = self.out_dir / "checkpoint_final.ckpt"
        self._save(final_path, rows[-1]["step"] if rows else 0)
        (self.out_dir / "trainer_config.json").write_text(json.dumps(self.tcfg.to_json(), indent=2) + "\n")
        try:
            from ..plotting import plot_training_curves

            plot_training_curves(rows, self.out_dir / "training_curves.png")
        except Exception:
            pass  # figures are a convenience; the CSV is the artifact
        return TrainResult(final_path, log_path, rows, self.params)

    def _lr(self, base: float, steps_done: int) -> float:
        frac = min(1.0, steps_done / max(1, self.tcfg.total_steps))
        return base * max(0.0, 1.0 - frac)

    def _train_rl(self) -> list[dict]:
        tcfg = self.tcfg
        for env in self.envs:
            env.reset()
        rows: list[dict] = []
        steps_done = 0
        updates = 0
        last_mean_reward = 0.0
        while steps_done < tcfg.total_steps:
            lr = self._lr(tcfg.ppo_lr, steps_done)
            disc_lr = self._lr(tcfg.gail_lr, steps_done)
            buffer, episodes = collect_rollouts(
                self.params, self.envs, tcfg, self.sample_rng, disc_params=self.disc_params
            )

            gail_loss = 0.0
            if self.disc_params is not None:
                gail_loss = self._update_disc(buffer, disc_lr)

            policy_weight = 0.0 if updates < tcfg.bc_pretrain_updates else 1.0
            losses = ppo_update(
                self.params,
                self.policy_opt,
                buffer,
                self.demo,
                tcfg,
                lr,
                self.shuffle_rng,
                self.demo_rng,
                policy_weight=policy_weight,
            )

            steps_done += len(buffer)
            updates += 1
            if episodes:
                last_mean_reward = float(np.mean([e.reward for e in episodes]))
                win_rate = float(np.mean([e.outcome is Outcome.BLUE_WIN for e in episodes]))
                tie_rate = float(np.mean([e.outcome is Outcome.TIE for e in episodes]))
            else:
                win_rate = tie_rate = 0.0
            rows.append(
                {
                    "step": steps_done,
                    "mean_cum_reward": last_mean_reward,
                    "gail_loss": gail_loss,
                    "bc_loss": losses["bc"],
                    "policy_loss": losses["policy"],
                    "value_loss": losses["value"],
                    "entropy": losses["entropy"],
                    "win_rate": win_rate,
                    "tie_rate": tie_rate,
                }
            )
            if tcfg.checkpoint_every_updates and updates % tcfg.checkpoint_every_updates == 0:
                self._save(self.out_dir / f"checkpoint_{steps_done}.ckpt", steps_done)
        return rows

    def _update_disc(self, buffer, disc_lr: float) -> float:
        """Balanced discriminator steps; returns the mean post-step loss."""
        tcfg = self.tcfg
        n_steps = tcfg.disc_minibatches_per_update
        if n_steps == 0:
            n_steps = tcfg.epochs * math.ceil(len(buffer) / tcfg.ppo_batch)
        onehot = buffer.action_onehot()
        losses = []
        for _ in range(n_steps):
            eidx = self.demo.sample(tcfg.ppo_batch, self.demo_rng)
            pidx = self.demo_rng.choice(len(buffer), size=min(tcfg.ppo_batch, len(buffer)), replace=False)
            losses.append(
                update_discriminator(
                    self.disc_params,
                    self.disc_opt,
                    self.demo.obs[eidx],
                    self.demo.onehot[eidx],
                    buffer.obs[pidx],
                    onehot[pidx],
                    disc_lr,
                )
            )
        return float(np.mean(losses))

    def _train_bc_only(self) -> list[dict]:
        """Pure supervised imitation; a step is one minibatch update."""
        tcfg = self.tcfg
        if self.demo is None or len(self.demo) == 0:
            raise TrainerConfigError("bc_only training requires demonstrations")
        interval = tcfg.summary_interval or max(1, tcfg.total_steps // 50)
        rows: list[dict] = []
        running = 0.0
        seen = 0
        for step in range(1, tcfg.total_steps + 1):
            lr = self._lr(tcfg.ppo_lr, step - 1)
            idx = self.demo.sample(tcfg.ppo_batch, self.demo_rng)
            loss, grads = bc_grads(
                self.params, self.demo.obs[idx], [m[idx] for m in self.demo.masks], self.demo.actions[idx]
            )
            if not np.isfinite(loss):
                raise NumericError(f"non-finite BC loss at step {step}")
            self.policy_opt.step(self.params, grads, lr)
            running += loss
            seen += 1
            if step % interval == 0 or step == tcfg.total_steps:
                rows.append(
                    {
                        "step": step,
                        "mean_cum_reward": float("nan"),
                        "gail_loss": 0.0,
                        "bc_loss": running / seen,
                        "policy_loss": 0.0,
                        "value_loss": 0.0,
                        "entropy": 0.0,
                        "win_rate": 0.0,
                        "tie_rate": 0.0,
                    }
                )
                running = 0.0
                seen = 0
        return rows


def train(
    tcfg: TrainerConfig,
    game_config: GameConfig,
    demo_path: str | Path | None,
    out_dir: str | Path,
) -> TrainResult:
    return Trainer(tcfg, game_config, demo_path=demo_path, out_dir=out_dir).train()
