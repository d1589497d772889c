from __future__ import annotations

import json
import logging

import pytest

from efrl import logger
from efrl._config import RunConfig, make_config_parser
from efrl._config.logger_utils import set_file_logger
from efrl._config.utils import read_user_config
from efrl.cli.pipeline import agent_config, reward_params
from efrl.constants import DEFAULT_KAPPA_PEAK, GradForm, Variant
from efrl.dqn import AgentConfig
from efrl.rewards import RewardParams
from efrl.utils.exceptions import ConfigurationError


def resolve(tmp_path=None, text=None, profile=None, **flags):
    user = None
    if text is not None:
        path = tmp_path / "user.cfg"
        path.write_text(text)
        user = read_user_config(path)
    return RunConfig.from_sources(make_config_parser(), user, profile, **flags)


def test_defaults_are_the_full_size_setup():
    config = resolve()
    assert config.profile == "full"
    assert (config.coarse, config.fine, config.side) == (64, 256, 1.0)
    assert config.re == 40_000 and config.nu == pytest.approx(2.5e-5)
    assert config.dt == 1e-3 and config.t_final == 2.0
    assert config.variant is Variant.DF
    assert config.grad_form is GradForm.DIFFERENCE
    assert config.hidden_layers == (64, 64)
    assert config.snapshot_times == (0.5, 1.0, 1.5)
    assert config.spectrum_k == (8, 32)
    assert config.initial_seed == 2024


def test_derived_step_counts():
    config = resolve()
    assert config.n_steps == 2000
    assert config.n_train == 500
    assert config.n_rand_train == 200
    assert config.reference_steps == 500
    assert config.episode_length == 500
    assert config.target_update_interval == 2500
    assert config.fine_substeps == 4
    assert config.fine_dt == pytest.approx(2.5e-4)

    rand = resolve(variant="dd-rand")
    assert rand.reference_steps == 700
    assert rand.episode_length == 200
    assert rand.target_update_interval == 1000
    assert rand.episode_budget == 210


def test_dns_substeps_override():
    config = resolve(dns_substeps=16)
    assert config.fine_substeps == 16
    assert config.fine_dt == pytest.approx(1e-3 / 16)


def test_ci_profile():
    config = resolve(profile="ci")
    assert (config.coarse, config.fine) == (32, 128)
    assert config.n_steps == 500
    assert config.episode_budget == 20


def test_resolution_order(tmp_path):
    text = "[CLI]\nprofile = ci\nseed = 3\n[grid]\ncoarse = 16\n[reward]\ngrad_form = equation\n"
    config = resolve(tmp_path, text)
    assert config.profile == "ci"
    assert config.coarse == 16
    assert config.fine == 128
    assert config.seed == 3
    assert config.grad_form is GradForm.EQUATION

    flagged = resolve(tmp_path, text, profile="full", seed=9, variant="sp-dd")
    assert flagged.profile == "full"
    assert flagged.coarse == 16
    assert flagged.fine == 256
    assert flagged.seed == 9
    assert flagged.variant is Variant.SP_DD

    unchanged = resolve(tmp_path, text, seed=None)
    assert unchanged.seed == 3


@pytest.mark.parametrize(
    "text",
    [
        "[grid]\ncoarse = 48\n",
        "[grid]\ncoarse = 4\n",
        "[grid]\ncoarse = 64\nfine = 32\n",
        "[flow]\nt_final = 0.0025\n",
        "[flow]\nt_final = 0.005\n",
        "[flow]\nre = -1\n",
        "[flow]\ndns_substeps = -1\n",
        "[flow]\ndt = fast\n",
        "[CLI]\nvariant = bogus\n",
        "[agent]\nbatch_size = 64\nreplay_capacity = 32\n",
        "[agent]\ngamma = 1.5\n",
    ],
)
def test_invalid_values(tmp_path, text):
    with pytest.raises(ConfigurationError):
        resolve(tmp_path, text)


def test_unknown_profile_and_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        resolve(profile="huge")
    with pytest.raises(ConfigurationError):
        read_user_config(tmp_path / "absent.cfg")


def test_written_config_reads_back(tmp_path):
    config = resolve(variant="sp-df", seed=4, dns_substeps=8, out=str(tmp_path / "run"))
    path = config.write(tmp_path / "run" / "config.cfg")
    text = path.read_text()
    assert "[initial]" in text and "seed = 2024" in text
    again = RunConfig.from_sources(make_config_parser(), read_user_config(path))
    assert again.dumps() == config.dumps()
    assert again.variant is Variant.SP_DF and again.dns_substeps == 8


def test_dict_access():
    config = resolve()
    assert config["re"] == config.re
    config["seed"] = 7
    assert config.seed == 7
    with pytest.raises(KeyError):
        config["nonsense"] = 1
    with pytest.raises(KeyError):
        config["nonsense"]
    assert RunConfig().update(config).dumps() == config.dumps()


def test_file_log_is_json_lines(tmp_path):
    first = set_file_logger("train", tmp_path)
    second = set_file_logger("eval", tmp_path)
    logger.info("Episode %(episode)s: reward %(reward).2f", {"episode": 3, "reward": 4.5})
    for handler in logger.handlers:
        handler.flush()
    records = [json.loads(line) for line in second.read_text().splitlines()]
    assert records[-1]["message"] == "Episode 3: reward 4.50"
    assert records[-1]["args"] == {"episode": 3, "reward": 4.5}
    assert "Episode 3" not in first.read_text()
    for handler in [h for h in logger.handlers if isinstance(h, logging.FileHandler)]:
        logger.removeHandler(handler)
        handler.close()


def test_packaged_defaults_match_library_defaults():
    config = resolve()
    assert reward_params(config) == RewardParams()
    agent = agent_config(config)
    library = AgentConfig()
    for name in (
        "gamma",
        "learning_rate",
        "batch_size",
        "max_grad_norm",
        "replay_capacity",
        "epsilon_start",
        "epsilon_end",
        "exploration_fraction",
        "hidden_layers",
    ):
        assert getattr(agent, name) == getattr(library, name), name
    assert config.kappa_peak == DEFAULT_KAPPA_PEAK


def test_incomplete_defaults_are_rejected():
    parser = make_config_parser()
    parser.remove_option("flow", "re")
    with pytest.raises(ConfigurationError, match="re"):
        RunConfig.from_sources(parser)
