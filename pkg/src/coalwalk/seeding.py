"""Deterministic seed derivation and counter-based per-step randomness.

Every Monte Carlo draw in the toolkit is a pure function of
(master_seed, trial, step, walk_id): trial seeds come from ``mix64``, each
simulation step reads a Philox stream keyed by the trial seed with the
step index placed in the most-significant counter word, and walk ids index
into that step's block of uniforms. Results are therefore bitwise
reproducible regardless of execution order or worker count, and two
processes sharing a trial seed see identical per-(step, id) moves.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(*parts: int) -> int:
    """Mix integers into one 64-bit value (splitmix64 finalizer chain)."""
    acc = _GOLDEN
    for part in parts:
        acc = (acc + (int(part) & _MASK64) + _GOLDEN) & _MASK64
        z = acc
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        acc = z ^ (z >> 31)
    return acc


def trial_seed(master_seed: int, trial_index: int) -> int:
    return mix64(master_seed, trial_index)


def step_uniforms(seed: int, step: int, count: int) -> np.ndarray:
    """Uniforms for walk ids 0..count-1 at one step of one trial.

    Reference implementation: a fresh Philox stream keyed by the trial
    seed, with the step index in the top counter word so each step owns a
    disjoint 2**192-block range. ``StepStream`` produces identical values
    without reconstructing the generator.
    """
    bg = np.random.Philox(key=mix64(seed), counter=[0, 0, 0, step])
    return np.random.Generator(bg).random(count)


class StepStream:
    """Reusable per-trial stream of per-(step, id) uniforms.

    Bitwise-identical to ``step_uniforms`` but about 10x faster in step
    loops: one Philox instance whose counter is repositioned per step.
    """

    __slots__ = ("_bit", "_gen", "_state")

    def __init__(self, seed: int):
        self._bit = np.random.Philox(key=mix64(seed))
        self._gen = np.random.Generator(self._bit)
        self._state = self._bit.state

    def uniforms(self, step: int, count: int) -> np.ndarray:
        state = self._state
        counter = state["state"]["counter"]
        counter[0] = 0
        counter[1] = 0
        counter[2] = 0
        counter[3] = step
        state["buffer_pos"] = 4  # discard any buffered words
        self._bit.state = state
        return self._gen.random(count)


def generator(seed: int, *context: int) -> np.random.Generator:
    """A free-running generator for draws that are not per-step keyed."""
    return np.random.Generator(np.random.Philox(key=mix64(seed, *context)))
