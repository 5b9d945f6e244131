"""Tests for Markov chain types and validation."""

import math

import numpy as np
import pytest

from src.core.errors import (
    DanglingTarget,
    DuplicateTransition,
    EmptyDtmcRow,
    NegativeOrZeroWeight,
    RowSumInvalid,
)
from src.models.markov_chain import Ctmc, Dtmc, Transition, atom_holds, validate


def _dtmc(rows, n_states=None, initial=0, labels=None):
    rows = tuple(tuple(Transition(t, w) for t, w in row) for row in rows)
    return Dtmc(n_states=n_states or len(rows), initial=initial, rows=rows, labels=labels or {})


def test_validate_accepts_stochastic_rows():
    """Test that rows summing to 1 pass unchanged."""
    model = _dtmc([[(1, 0.9), (2, 0.1)], [(1, 1.0)], [(2, 1.0)]])
    assert validate(model) == model


def test_validate_renormalizes_small_drift():
    """Test that rows off by less than the tolerance are renormalized to sum to exactly 1."""
    third = 0.3333333333
    model = validate(_dtmc([[(0, third), (1, third), (2, third + 1e-10)], [(1, 1.0)], [(2, 1.0)]]))

    assert math.fsum(t.weight for t in model.rows[0]) == 1.0
    assert [t.target for t in model.rows[0]] == [0, 1, 2]


def _near_stochastic_dtmc(rng, n_states=5):
    """Random chain whose rows are rounded to 10 decimals and then pushed off 1 by a small residual."""
    rows = []
    for _ in range(n_states):
        weights = np.round(rng.dirichlet(np.ones(n_states)), 10)
        weights[np.argmax(weights)] += 1.0 - weights.sum() + rng.uniform(-5e-10, 5e-10)
        rows.append([(target, float(w)) for target, w in enumerate(weights) if w > 0])
    return _dtmc(rows)


def test_validate_is_idempotent():
    """Test that validating a validated chain returns an equal chain with rows summing to exactly 1."""
    rng = np.random.default_rng(2024)
    for _ in range(2000):
        validated = validate(_near_stochastic_dtmc(rng))
        assert validate(validated) == validated
        assert all(math.fsum(t.weight for t in row) == 1.0 for row in validated.rows)


def test_validate_rejects_bad_row_sum():
    """Test that a DTMC row summing to 0.9 is rejected with its state."""
    with pytest.raises(RowSumInvalid) as exc_info:
        validate(_dtmc([[(0, 0.5), (1, 0.4)], [(1, 1.0)]]))
    assert exc_info.value.state == 0


def test_validate_rejects_empty_dtmc_row():
    """Test that a DTMC state without successors is rejected."""
    with pytest.raises(EmptyDtmcRow):
        validate(_dtmc([[(1, 1.0)], []]))


def test_validate_rejects_non_positive_weight():
    """Test that zero and negative weights are rejected."""
    with pytest.raises(NegativeOrZeroWeight):
        validate(_dtmc([[(0, 1.0), (1, 0.0)], [(1, 1.0)]]))

    with pytest.raises(NegativeOrZeroWeight):
        validate(Ctmc(n_states=2, initial=0, rows=((Transition(1, -2.0),), ())))


def test_validate_rejects_dangling_references():
    """Test out-of-range targets, initial states and labels."""
    with pytest.raises(DanglingTarget):
        validate(_dtmc([[(5, 1.0)]]))

    with pytest.raises(DanglingTarget):
        validate(_dtmc([[(0, 1.0)]], initial=3))

    with pytest.raises(DanglingTarget):
        validate(_dtmc([[(0, 1.0)]], labels={"goal": frozenset({4})}))


def test_validate_rejects_duplicate_transition():
    """Test that the same target may appear only once per row."""
    with pytest.raises(DuplicateTransition):
        validate(_dtmc([[(0, 0.5), (0, 0.5)]]))


def test_ctmc_empty_row_is_absorbing(repair_model):
    """Test that a CTMC state without transitions is absorbing with exit rate 0."""
    assert repair_model.absorbing_states == frozenset({2})
    assert repair_model.exit_rates == (0.5, 2.1, 0.0)


def test_dtmc_absorbing_states(coin_model):
    """Test that single self-loops are absorbing."""
    assert coin_model.absorbing_states == frozenset({1, 2})


def test_jump_inverts_cumulative_distribution(coin_model):
    """Test successor choice for uniforms on both sides of the 0.9 boundary."""
    assert coin_model.jump(0, 0.0) == 1
    assert coin_model.jump(0, 0.5) == 1
    assert coin_model.jump(0, 0.9) == 2
    assert coin_model.jump(0, 0.999) == 2


def test_atom_holds(coin_model):
    """Test label lookup; unknown atoms are false everywhere."""
    assert atom_holds(coin_model, 1, "goal")
    assert not atom_holds(coin_model, 0, "goal")
    assert not atom_holds(coin_model, 1, "nonexistent")
    assert coin_model.has_transition(0, 2)
    assert not coin_model.has_transition(1, 0)
