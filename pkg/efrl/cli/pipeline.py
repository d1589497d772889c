"""What the commands do, separated from argument parsing.

Every function takes a resolved :class:`~.RunConfig` and writes into
``config.out_dir``:

- ``references/``: filtered-DNS snapshots at every coarse step, with manifest
- ``dns/``: fine-grid snapshots at the configured times
- ``agent.efdq``, ``checkpoints/``, ``training_log.csv``, ``steps.csv``
- ``eval/<method>/`` and ``eval/summary.json``
"""

from __future__ import annotations

__all__ = [
    "fluid_params",
    "reward_params",
    "agent_config",
    "initial_conditions",
    "generate_references",
    "ensure_references",
    "build_env",
    "run_training",
    "run_evaluation",
    "compare_runs",
    "METHODS",
]

import json
from pathlib import Path
from typing import Any

import numpy as np
from tqdm import tqdm

from .. import logger
from .._config.run_config import RunConfig
from ..constants import (
    DNS_BLOW_UP_MESSAGE,
    REFERENCE_MANIFEST,
    SNAPSHOT_NAME_FORMAT,
    StartPolicy,
)
from ..dqn.agent import AgentConfig, DQNAgent
from ..dqn.checkpoint import checkpoint_load, checkpoint_save
from ..dqn.training import TRAINING_LOG_HEADER, EpisodeRecord, greedy_rollout, train_agent
from ..env.episode import EpisodeConfig, EvolveFilterEnv, Transition
from ..env.references import ReferenceStore
from ..fields.grid import GridSpec, VelocityField
from ..fields.snapshot import save_snapshot
from ..metrics.diagnostics import SpectrumStats, energy_spectrum, filtered_dns_project
from ..metrics.errors import err_energy, err_spectrum
from ..metrics.export import TimeSeries, write_spectrum, write_timeseries
from ..rewards import STEP_LOG_HEADER, RewardParams
from ..solver.initial import decaying_spectrum, init_filtered_pair
from ..solver.rollout import StepCallback, rollout
from ..solver.state import FluidParams, SolverState
from ..solver.steps import dns_step, kolmogorov_scale
from ..utils.exceptions import BlowUpError, CheckpointError, ConfigurationError, GridMismatchError
from ..utils.file_ops import guarantee_existence, write_csv, write_json

METHODS = ("filtered-dns", "rl-ef", "noef", "ef-kolmogorov")
SUMMARY_FILE = "summary.json"


def fluid_params(config: RunConfig) -> FluidParams:
    return FluidParams.from_reynolds(config.re, config.dt)


def reward_params(config: RunConfig) -> RewardParams:
    return RewardParams(
        alpha=config.alpha,
        alpha_res=config.alpha_res,
        alpha_grad=config.alpha_grad,
        alpha_energy=config.alpha_energy,
        alpha_enstrophy=config.alpha_enstrophy,
        grad_form=config.grad_form,
    )


def agent_config(config: RunConfig) -> AgentConfig:
    return AgentConfig(
        gamma=config.gamma,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        max_grad_norm=config.max_grad_norm,
        target_update_interval=config.target_update_interval,
        replay_capacity=config.replay_capacity,
        epsilon_start=config.epsilon_start,
        epsilon_end=config.epsilon_end,
        exploration_fraction=config.exploration_fraction,
        hidden_layers=config.hidden_layers,
        seed=config.seed,
    )


def _grids(config: RunConfig) -> tuple[GridSpec, GridSpec]:
    return GridSpec(config.fine, config.side), GridSpec(config.coarse, config.side)


def initial_conditions(config: RunConfig) -> tuple[VelocityField, VelocityField]:
    """The fine-grid initial condition and its coarse restriction."""
    fine, coarse = _grids(config)
    return init_filtered_pair(
        fine,
        coarse,
        decaying_spectrum(config.kappa_peak),
        config.total_energy,
        config.initial_seed,
    )


def generate_references(config: RunConfig, n_coarse_steps: int) -> ReferenceStore:
    """Run the DNS over ``n_coarse_steps`` coarse steps and restrict it.

    Each coarse step is ``fine_substeps`` steps of :func:`~.dns_step`.
    Fine-grid snapshots at the configured times are written to ``dns/``.

    Raises
    ------
    :class:`~.BlowUpError`
        If the DNS itself blows up.
    """
    fine, coarse = _grids(config)
    u_fine, u_coarse = initial_conditions(config)
    fine_params = fluid_params(config).with_dt(config.dt / config.fine_substeps)
    dns_dir = guarantee_existence(config.out_dir / "dns")
    snapshot_steps = {round(t / config.dt) for t in config.snapshot_times}
    snapshot_steps.add(n_coarse_steps)

    logger.info(
        "DNS on %(fine)s for %(steps)s coarse steps of %(sub)s substeps",
        {"fine": fine, "steps": n_coarse_steps, "sub": config.fine_substeps},
    )
    store = ReferenceStore(coarse, config.dt, [u_coarse])
    state = SolverState.initial(u_fine)
    steps = range(1, n_coarse_steps + 1)
    for k in tqdm(steps, desc="DNS", disable=not config.progress_bar):
        for _ in range(config.fine_substeps):
            state = dns_step(state, fine_params)
            if state.blown_up:
                break
        if state.blown_up:
            raise BlowUpError(
                DNS_BLOW_UP_MESSAGE.format(state.t, k), time=state.t, step=k
            )
        store.append(filtered_dns_project(state.u, coarse))
        if k in snapshot_steps:
            save_snapshot(dns_dir / SNAPSHOT_NAME_FORMAT.format(k), state.u, k * config.dt)
    return store


def ensure_references(config: RunConfig, last_step: int) -> ReferenceStore:
    """References covering ``0..last_step``, read from ``references/`` when they
    reach far enough, else generated and written there."""
    directory = config.out_dir / "references"
    if (directory / REFERENCE_MANIFEST).exists():
        store = ReferenceStore.load(directory, progress=config.progress_bar)
        if store.grid != GridSpec(config.coarse, config.side) or store.dt != config.dt:
            raise GridMismatchError(
                f"References in {directory} were made on {store.grid} with dt = {store.dt}"
            )
        if store.covers(last_step):
            return store
        logger.info(
            "References end at step %(count)s, %(need)s needed; regenerating",
            {"count": store.count, "need": last_step},
        )
    store = generate_references(config, last_step)
    store.save(directory, progress=config.progress_bar)
    return store


def build_env(
    config: RunConfig,
    refs: ReferenceStore | None,
    episode: EpisodeConfig | None = None,
) -> EvolveFilterEnv:
    _, u0 = initial_conditions(config)
    episode = episode or EpisodeConfig.for_variant(config.variant, config.n_steps, config.gamma)
    return EvolveFilterEnv(
        u0,
        fluid_params(config),
        episode,
        reward_params(config),
        refs=refs,
        seed=config.seed,
    )


def _checkpoint_metadata(config: RunConfig, agent: DQNAgent, episodes: int) -> dict[str, Any]:
    return {
        "seed": config.seed,
        "variant": config.variant.value,
        "coarse": config.coarse,
        "episodes": episodes,
        "total_steps": agent.env_steps,
    }


def run_training(config: RunConfig) -> list[EpisodeRecord]:
    """Train an agent for ``config.variant`` and write its logs and checkpoints."""
    out = guarantee_existence(config.out_dir)
    refs = None
    episode = EpisodeConfig.for_variant(config.variant, config.n_steps, config.gamma)
    if config.variant.needs_references or episode.start_policy is StartPolicy.UNIFORM_RANDOM:
        directory = out / "references"
        if not (directory / REFERENCE_MANIFEST).exists():
            raise ConfigurationError(
                f"Variant '{config.variant.value}' needs references in {directory}; "
                "run `efrl gen-dns` first"
            )
        refs = ReferenceStore.load(directory, progress=config.progress_bar)

    env = build_env(config, refs, episode)
    agent = DQNAgent(env.obs_dim, env.n_actions, agent_config(config))
    budget = config.episode_budget
    steps_path = out / "steps.csv"
    log_path = out / "training_log.csv"
    write_csv(steps_path, STEP_LOG_HEADER, [])
    write_csv(log_path, TRAINING_LOG_HEADER, [])
    pending: list[tuple] = []

    def on_step(episode_index: int, transition: Transition, env: EvolveFilterEnv) -> None:
        diag = env.last_diagnostics
        if diag is None:
            nan = float("nan")
            row = (episode_index, env.steps_taken, env.state.t, env.last_delta, transition.reward)
            pending.append(row + (nan, nan, nan, nan))
        else:
            pending.append(
                diag.log_row(
                    episode_index, env.steps_taken, env.state.t, env.last_delta, transition.reward
                )
            )

    def on_episode(record: EpisodeRecord, agent: DQNAgent) -> None:
        write_csv(steps_path, STEP_LOG_HEADER, pending, append=True)
        pending.clear()
        write_csv(log_path, TRAINING_LOG_HEADER, [record.row()], append=True)
        done = record.episode + 1
        if config.checkpoint_every > 0 and done % config.checkpoint_every == 0:
            checkpoint_save(
                out / "checkpoints" / f"episode_{done:04d}.efdq",
                agent.online,
                agent.adam,
                _checkpoint_metadata(config, agent, done),
            )

    records = train_agent(
        env,
        agent,
        budget,
        on_step=on_step,
        on_episode=on_episode,
        stop_on_plateau=config.stop_on_plateau,
        plateau_window=config.plateau_window,
        plateau_tolerance=config.plateau_tolerance,
        progress=config.progress_bar,
    )
    path = checkpoint_save(
        out / "agent.efdq",
        agent.online,
        agent.adam,
        _checkpoint_metadata(config, agent, len(records)),
    )
    logger.info("Writing final checkpoint %(path)s", {"path": path})
    return records


class _MethodRecord:
    """Diagnostics of one method along the evaluation window."""

    def __init__(self) -> None:
        self.series = TimeSeries()
        self.spectra: list[SpectrumStats] = []
        self.blow_up_time: float | None = None

    def record(self, state: SolverState, delta: float = float("nan")) -> None:
        if state.blown_up:
            self.blow_up_time = state.t
            return
        self.series.record(state.t, state.u, delta)
        self.spectra.append(energy_spectrum(state.u, state.t))


def _recorder(record: _MethodRecord, delta: float | None) -> StepCallback:
    applied = float("nan") if delta is None else delta

    def callback(state: SolverState) -> None:
        record.record(state, applied)

    return callback


def _write_method(directory: Path, record: _MethodRecord, snapshot_times: tuple[float, ...]) -> None:
    directory = guarantee_existence(directory)
    write_timeseries(directory / "timeseries.csv", record.series)
    for t in snapshot_times:
        for stats in record.spectra:
            if np.isclose(stats.time, t):
                write_spectrum(directory / "spectra", stats)
                break


def run_evaluation(config: RunConfig, checkpoint: Path) -> dict[str, Any]:
    """Roll out the trained agent and both baselines over ``[0, T]``.

    Raises
    ------
    :class:`~.GridMismatchError`
        If the checkpoint was trained on another grid.
    """
    checkpoint = Path(checkpoint)
    if not checkpoint.exists():
        raise CheckpointError(f"Checkpoint {checkpoint} does not exist")
    params, _, metadata = checkpoint_load(checkpoint)
    expected = 2 * config.coarse**2
    if params.obs_dim != expected:
        raise GridMismatchError(
            f"{checkpoint} observes {params.obs_dim} values, "
            f"a {config.coarse}x{config.coarse} grid gives {expected}"
        )

    n = config.n_steps
    refs = ensure_references(config, n)
    p = fluid_params(config)
    eval_dir = guarantee_existence(config.out_dir / "eval")
    records = {method: _MethodRecord() for method in METHODS}

    for k in range(n + 1):
        records["filtered-dns"].record(SolverState(refs[k], k * config.dt, k))

    episode = EpisodeConfig(config.variant, n, gamma=config.gamma, start_policy=StartPolicy.FIXED_AT_ZERO)
    env = build_env(config, refs, episode)
    start = SolverState.initial(env.initial)
    actions: list[tuple[int, float, int, float]] = []

    rl = records["rl-ef"]
    rl.record(start)

    def on_rl_step(action: int, delta: float, state: SolverState) -> None:
        actions.append((state.step_index, state.t, action, delta))
        rl.record(state, delta)

    logger.info("Evaluating the greedy policy of %(path)s", {"path": checkpoint})
    greedy_rollout(env, params, on_step=on_rl_step, progress=config.progress_bar)

    eta = kolmogorov_scale(p)
    for method, delta in (("noef", None), ("ef-kolmogorov", eta)):
        record = records[method]
        record.record(start)
        logger.info("Evaluating %(method)s", {"method": method})
        rollout(
            start,
            p,
            n,
            delta=delta,
            callback=_recorder(record, delta),
            progress=config.progress_bar,
            description=method,
        )

    for method, record in records.items():
        _write_method(eval_dir / method, record, config.snapshot_times)
    write_csv(eval_dir / "rl-ef" / "actions.csv", ("step", "t", "action", "delta"), actions)
    counts = np.bincount([a[2] for a in actions], minlength=env.n_actions)
    total = max(int(counts.sum()), 1)
    write_csv(
        eval_dir / "rl-ef" / "action_histogram.csv",
        ("action", "delta", "count", "frequency"),
        [(i, env.actions.decode(i), int(c), c / total) for i, c in enumerate(counts)],
    )

    reference = records["filtered-dns"]
    summary: dict[str, Any] = {
        "coarse": config.coarse,
        "fine": config.fine,
        "side": config.side,
        "dt": config.dt,
        "t_final": config.t_final,
        "re": config.re,
        "variant": config.variant.value,
        "checkpoint": str(checkpoint),
        "trained_episodes": metadata.get("episodes"),
        "kolmogorov_scale": eta,
        "methods": {},
    }
    for method, record in records.items():
        length = len(record.spectra)
        entry: dict[str, Any] = {
            "blown_up": record.blow_up_time is not None,
            "blow_up_time": record.blow_up_time,
            "steps": length - 1,
            "err_energy": err_energy(record.series.energy, reference.series.energy[:length]),
        }
        for K in config.spectrum_k:
            entry[f"err_spectrum_{K}"] = err_spectrum(record.spectra, reference.spectra[:length], K)
            entry[f"err_spectrum_abs_{K}"] = err_spectrum(
                record.spectra, reference.spectra[:length], K, absolute=True
            )
        summary["methods"][method] = entry
    write_json(eval_dir / SUMMARY_FILE, summary)
    return summary


_COMPATIBLE_KEYS = ("coarse", "side", "dt", "t_final")


def compare_runs(run_dirs: list[Path]) -> list[dict[str, Any]]:
    """One row per method and run, from the evaluation summaries.

    Raises
    ------
    :class:`~.ConfigurationError`
        If a run has no evaluation summary.
    :class:`~.GridMismatchError`
        If the runs differ in grid or time window.
    """
    rows = []
    first: dict[str, Any] | None = None
    for run_dir in run_dirs:
        path = Path(run_dir) / "eval" / SUMMARY_FILE
        if not path.exists():
            raise ConfigurationError(f"No evaluation summary in {run_dir}; run `efrl eval` first")
        summary = json.loads(path.read_text())
        if first is None:
            first = summary
        mismatched = [k for k in _COMPATIBLE_KEYS if summary[k] != first[k]]
        if mismatched:
            raise GridMismatchError(
                f"{run_dir} differs from {run_dirs[0]} in {', '.join(mismatched)}"
            )
        for method, entry in summary["methods"].items():
            rows.append({"run": str(run_dir), "variant": summary["variant"], "method": method, **entry})
    return rows

