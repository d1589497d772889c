from __future__ import annotations

import numpy as np
import pytest

from efrl.constants import Variant
from efrl.dqn import (
    AdamState,
    AgentConfig,
    DQNAgent,
    MlpParams,
    ReplayBuffer,
    TransitionBatch,
    adam_update,
    checkpoint_load,
    checkpoint_save,
    clip_gradients,
    epsilon_at,
    global_norm,
    greedy_rollout,
    init_mlp,
    loss_and_gradients,
    q_forward,
    reward_plateau,
    select_action,
    target_sync,
    td_targets,
    train_agent,
)
from efrl.env import EpisodeConfig, EvolveFilterEnv, Transition
from efrl.fields import GridSpec
from efrl.solver import FluidParams, decaying_spectrum, init_decaying_turbulence
from efrl.utils.exceptions import CheckpointError


def small_net(rng, sizes=(3, 4, 2)):
    return init_mlp(list(sizes), rng)


def test_init_bounds(rng):
    params = init_mlp([16, 8, 4], rng)
    assert params.layer_sizes == [16, 8, 4]
    assert np.abs(params.weights[0]).max() <= 0.25
    assert np.abs(params.weights[1]).max() <= 1 / np.sqrt(8)
    with pytest.raises(ValueError):
        init_mlp([4], rng)


def test_zero_network_outputs_zero(rng):
    params = small_net(rng).zeros_like()
    assert np.array_equal(q_forward(params, np.ones(3)), np.zeros(2))
    assert q_forward(params, np.ones((5, 3))).shape == (5, 2)
    with pytest.raises(ValueError):
        q_forward(params, np.ones(4))


def test_gradients_match_finite_differences(rng):
    params = small_net(rng)
    obs = rng.standard_normal((5, 3))
    actions = rng.integers(2, size=5)
    targets = rng.standard_normal(5)
    _, grads = loss_and_gradients(params, obs, actions, targets)

    h = 1e-6
    for p, g in zip(params.arrays(), grads.arrays()):
        numeric = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            saved = p[idx]
            p[idx] = saved + h
            up, _ = loss_and_gradients(params, obs, actions, targets)
            p[idx] = saved - h
            down, _ = loss_and_gradients(params, obs, actions, targets)
            p[idx] = saved
            numeric[idx] = (up - down) / (2 * h)
        np.testing.assert_allclose(g, numeric, rtol=1e-5, atol=1e-8)


def test_clip_gradients(rng):
    grads = small_net(rng).zeros_like()
    grads.weights[0][0, 0] = 30.0
    grads.biases[1][0] = 40.0
    clipped, norm = clip_gradients(grads, 5.0)
    assert norm == pytest.approx(50.0)
    assert global_norm(clipped) == pytest.approx(5.0)
    assert clipped.weights[0][0, 0] == pytest.approx(3.0)
    same, _ = clip_gradients(grads, 100.0)
    assert same is grads


def test_zero_loss_leaves_parameters(rng):
    params = small_net(rng)
    before = params.copy()
    obs = rng.standard_normal((4, 3))
    actions = np.array([0, 1, 1, 0])
    targets = q_forward(params, obs)[np.arange(4), actions]
    loss, grads = loss_and_gradients(params, obs, actions, targets)
    assert loss == 0.0
    adam_update(params, grads, AdamState.zeros_like(params), 1e-3)
    for a, b in zip(params.arrays(), before.arrays()):
        assert np.array_equal(a, b)


def test_adam_moves_against_the_gradient(rng):
    params = small_net(rng)
    grads = params.zeros_like()
    grads.biases[1][:] = [1.0, -1.0]
    before = params.biases[1].copy()
    state = AdamState.zeros_like(params)
    adam_update(params, grads, state, 1e-2)
    np.testing.assert_allclose(params.biases[1] - before, [-1e-2, 1e-2], rtol=1e-6)
    assert state.step == 1


def test_select_action(rng):
    params = small_net(rng).zeros_like()
    assert select_action(params, np.ones(3), 0.0, rng) == 0
    params.biases[1][:] = [0.0, 1.0]
    assert select_action(params, np.ones(3), 0.0, rng) == 1
    picks = np.array([select_action(params, np.ones(3), 1.0, rng) for _ in range(4000)])
    assert abs(np.mean(picks) - 0.5) < 0.05
    with pytest.raises(ValueError):
        select_action(params, np.ones(3), 1.5, rng)


def test_td_targets(rng):
    target = small_net(rng).zeros_like()
    target.biases[1][:] = [2.0, 3.0]
    batch = TransitionBatch(
        np.zeros((2, 3)),
        np.array([0, 1]),
        np.array([1.0, -1.0]),
        np.zeros((2, 3)),
        np.array([0.0, 1.0]),
    )
    np.testing.assert_allclose(td_targets(batch, target, 0.5), [2.5, -1.0])


def test_target_sync(rng):
    online, target = small_net(rng), small_net(rng)
    assert target_sync(online, target, 3, 4) is target
    synced = target_sync(online, target, 4, 4)
    assert synced is not online
    assert all(np.array_equal(a, b) for a, b in zip(synced.arrays(), online.arrays()))


def test_epsilon_schedule():
    cfg = AgentConfig(epsilon_start=1.0, epsilon_end=0.05, exploration_fraction=0.5)
    assert epsilon_at(0, 100, cfg) == 1.0
    assert epsilon_at(25, 100, cfg) == pytest.approx(0.525)
    assert epsilon_at(50, 100, cfg) == 0.05
    assert epsilon_at(99, 100, cfg) == 0.05


def test_agent_config_validation():
    with pytest.raises(ValueError):
        AgentConfig(gamma=0.0)
    with pytest.raises(ValueError):
        AgentConfig(batch_size=64, replay_capacity=32)
    with pytest.raises(ValueError):
        AgentConfig(epsilon_end=1.5)


def test_replay_buffer_ring(rng):
    buffer = ReplayBuffer(3)
    for i in range(5):
        buffer.push(Transition(np.full(2, i), i, float(i), np.full(2, i + 1), False))
    assert len(buffer) == 3
    assert sorted(t.action for t in buffer.storage) == [2, 3, 4]
    batch = buffer.sample(3, rng)
    assert sorted(batch.actions) == [2, 3, 4]
    assert batch.obs.shape == (3, 2)
    with pytest.raises(ValueError):
        buffer.sample(4, rng)


def test_checkpoint_round_trip(tmp_path, rng):
    params = init_mlp([6, 5, 4], rng)
    adam = AdamState.zeros_like(params)
    adam_update(params, params.copy(), adam, 1e-3)
    path = checkpoint_save(tmp_path / "ckpt" / "agent.efdq", params, adam, {"variant": "df", "episode": 3})
    loaded, loaded_adam, metadata = checkpoint_load(path, expected_sizes=[6, 5, 4])
    for a, b in zip(loaded.arrays(), params.arrays()):
        assert np.array_equal(a, b)
    for a, b in zip(loaded_adam.v.arrays(), adam.v.arrays()):
        assert np.array_equal(a, b)
    assert loaded_adam.step == 1
    assert metadata == {"variant": "df", "episode": "3"}
    obs = rng.standard_normal(6)
    assert np.array_equal(q_forward(loaded, obs), q_forward(params, obs))


def test_checkpoint_errors(tmp_path, rng):
    params = init_mlp([6, 5, 4], rng)
    path = checkpoint_save(tmp_path / "agent.efdq", params, AdamState.zeros_like(params))
    data = path.read_bytes()

    with pytest.raises(CheckpointError):
        checkpoint_load(path, expected_sizes=[6, 8, 4])
    truncated = tmp_path / "truncated.efdq"
    truncated.write_bytes(data[:-20])
    with pytest.raises(CheckpointError):
        checkpoint_load(truncated)
    trailing = tmp_path / "trailing.efdq"
    trailing.write_bytes(data + b"\0")
    with pytest.raises(CheckpointError):
        checkpoint_load(trailing)
    foreign = tmp_path / "foreign.efdq"
    foreign.write_bytes(b"NOPE" + data[4:])
    with pytest.raises(CheckpointError):
        checkpoint_load(foreign)


def test_reward_plateau():
    assert not reward_plateau([1.0, 2.0], window=10, tolerance=0.02, n_train=500)
    assert reward_plateau([3.0] * 10, window=10, tolerance=0.02, n_train=500)
    rising = [float(10 * i) for i in range(10)]
    assert not reward_plateau(rising, window=10, tolerance=0.02, n_train=500)
    assert reward_plateau(rising, window=10, tolerance=0.5, n_train=500)


def test_agent_is_deterministic(rng):
    transitions = [
        Transition(rng.standard_normal(4), int(rng.integers(3)), float(rng.standard_normal()), rng.standard_normal(4), False)
        for _ in range(40)
    ]
    cfg = AgentConfig(batch_size=8, replay_capacity=100, hidden_layers=(8,), seed=5)

    def train():
        agent = DQNAgent(4, 3, cfg)
        losses = [agent.observe(t) for t in transitions]
        return agent, losses

    (a, la), (b, lb) = train(), train()
    assert la[:7] == [None] * 7 and la[7] is not None
    assert la == lb
    for x, y in zip(a.online.arrays(), b.online.arrays()):
        assert np.array_equal(x, y)
    assert a.updates == 33


def test_learns_two_state_values():
    # Next state is the action taken; reward 1 for staying in state 0 and 0.5
    # for staying in state 1.
    states = np.eye(2)
    rewards = np.array([[1.0, 0.0], [0.0, 0.5]])
    cfg = AgentConfig(
        gamma=0.5,
        learning_rate=1e-3,
        batch_size=32,
        max_grad_norm=10.0,
        target_update_interval=100,
        replay_capacity=10_000,
        hidden_layers=(32, 32),
        seed=11,
    )
    agent = DQNAgent(2, 2, cfg)
    rng = np.random.default_rng(3)
    s = 0
    for _ in range(20_000):
        a = agent.act(states[s], 1.0)
        agent.observe(Transition(states[s], a, rewards[s, a], states[a], False))
        s = a if rng.random() < 0.9 else int(rng.integers(2))
    q = q_forward(agent.online, states)
    np.testing.assert_allclose(q, [[2.0, 0.5], [1.0, 1.0]], rtol=0.05, atol=0.02)


@pytest.fixture
def tiny_env():
    u0 = init_decaying_turbulence(GridSpec(8), decaying_spectrum(2.0), 0.5, seed=9)
    return EvolveFilterEnv(u0, FluidParams.from_reynolds(1000, 1e-3), EpisodeConfig(Variant.SP_DF, 3))


def test_train_agent_records_episodes(tiny_env):
    agent = DQNAgent(tiny_env.obs_dim, tiny_env.n_actions, AgentConfig(batch_size=2, hidden_layers=(8,)))
    seen = []
    episodes = []
    records = train_agent(
        tiny_env,
        agent,
        2,
        on_step=lambda episode, transition, env: seen.append(episode),
        on_episode=lambda record, _: episodes.append(record.episode),
    )
    assert [r.steps for r in records] == [3, 3]
    assert seen == [0, 0, 0, 1, 1, 1]
    assert episodes == [0, 1]
    assert agent.env_steps == 6 and agent.updates == 5
    for r in records:
        assert not r.blown_up
        assert -9.0 <= r.total_reward <= 3.0
        assert len(r.row()) == 7


def test_greedy_rollout_follows_the_argmax(tiny_env):
    params = init_mlp([tiny_env.obs_dim, 4, tiny_env.n_actions], np.random.default_rng(0)).zeros_like()
    params.biases[-1][17] = 1.0
    taken = []
    state = greedy_rollout(tiny_env, params, on_step=lambda a, delta, s: taken.append((a, delta)))
    assert state.step_index == 3
    assert taken == [(17, tiny_env.actions.decode(17))] * 3
