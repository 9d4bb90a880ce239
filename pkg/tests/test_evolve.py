import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk2d import (
    a1_coin,
    custom_coin,
    evolve,
    grover_coin,
    origin_superposition,
    pure_state,
    step,
    symmetric_family,
    InitialSpec,
)


def random_unitary_coin(seed: int):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, r = np.linalg.qr(z)
    q = q * np.exp(-1j * np.angle(np.diag(r)))[None, :]
    return custom_coin(q, label=f"random-{seed}")


def test_identity_coin_is_pure_right_shift():
    identity = custom_coin(np.eye(4), label="identity")
    state = evolve(pure_state(5, "R"), identity, 3)
    assert state.amplitude(-2, 0, "R") == 1.0  # 3 steps right wraps to -2 on N=5
    state = evolve(pure_state(5, "R"), identity, 5)
    assert state.amplitude(0, 0, "R") == 1.0


def test_one_grover_step_amplitudes():
    state = step(pure_state(5, "R"), grover_coin())
    assert state.t == 1
    assert state.amplitude(1, 0, "R") == pytest.approx(-0.5)
    assert state.amplitude(-1, 0, "L") == pytest.approx(0.5)
    assert state.amplitude(0, 1, "U") == pytest.approx(0.5)
    assert state.amplitude(0, -1, "D") == pytest.approx(0.5)
    assert state.norm_sq() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "coin", [grover_coin(), a1_coin(), symmetric_family(0.25)]
)
def test_norm_preserved_many_steps(coin):
    state = evolve(pure_state(5, "U"), coin, 500)
    assert abs(state.norm_sq() - 1.0) < 1e-12


def test_norm_drift_budget_hundred_thousand_steps():
    state = evolve(pure_state(5, "R"), grover_coin(), 100_000)
    assert abs(state.norm_sq() - 1.0) < 1e-10


def test_zero_steps_returns_input():
    state = pure_state(5, "R")
    assert evolve(state, grover_coin(), 0) is state


def test_negative_steps_rejected():
    with pytest.raises(ValueError):
        evolve(pure_state(5, "R"), grover_coin(), -1)


@settings(deadline=None, max_examples=25)
@given(
    st.integers(min_value=0, max_value=10 ** 6),
    st.integers(min_value=-4, max_value=4),
    st.integers(min_value=-4, max_value=4),
)
def test_translation_covariance_is_exact(seed, dx, dy):
    coin = random_unitary_coin(seed)
    state = pure_state(5, "D", 1, -1)
    shifted_then_evolved = evolve(state.translated(dx, dy), coin, 3)
    evolved_then_shifted = evolve(state, coin, 3).translated(dx, dy)
    assert np.array_equal(
        shifted_then_evolved.amplitudes, evolved_then_shifted.amplitudes
    )


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_random_unitary_coin_preserves_probability(seed):
    coin = random_unitary_coin(seed)
    state = evolve(pure_state(5, "L"), coin, 20)
    assert abs(state.norm_sq() - 1.0) < 1e-11


def _snapshot(coin, n=51, steps=30, spec=None):
    spec = spec or InitialSpec.pure("R")
    state = evolve(origin_superposition(n, spec), coin, steps)
    return state.probability_grid(), state


def test_grover_snapshot_localizes():
    grid, state = _snapshot(grover_coin())
    origin = state.probability_at(0, 0)
    assert origin == pytest.approx(grid.max())
    # origin dominates every site outside the |x| + |y| <= 2 neighborhood
    xs = np.add.outer(np.abs(np.arange(-25, 26)), np.abs(np.arange(-25, 26)))
    assert origin > grid[xs > 2].max()


def test_a1_snapshot_spreads():
    _, state = _snapshot(a1_coin())
    assert state.probability_at(0, 0) < 0.01


def test_a4_snapshot_localizes():
    grid, state = _snapshot(symmetric_family(1 / 3))
    assert state.probability_at(0, 0) == pytest.approx(grid.max())
    assert state.probability_at(0, 0) > 0.3


def test_delocalizing_superposition_snapshot():
    w = np.exp(1j / 3) / 2
    _, state = _snapshot(grover_coin(), spec=InitialSpec(w, w, -w, -w))
    assert state.probability_at(0, 0) < 0.01
