"""Seedable pseudo-random generator used by the interpreter.

The generator state is a single nonzero 64-bit word advanced by
xorshift64* (shifts 12, 25, 27; multiplier 2685821657736338717).  Seeds
are scrambled through one splitmix64 step so that small consecutive
seeds produce unrelated streams.  Each output word maps to [0, 1) by
taking its top 53 bits over 2^53.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
MULTIPLIER = 2685821657736338717
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
# substitute state used when scrambling would yield the forbidden zero
FALLBACK_STATE = _SPLITMIX_GAMMA


def splitmix64(x: int) -> int:
    x = (x + _SPLITMIX_GAMMA) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def seed_state(seed: int) -> int:
    """Initial nonzero state for an integer seed."""
    state = splitmix64(seed & MASK64)
    return state if state != 0 else FALLBACK_STATE


def next_state(state: int) -> int:
    x = state & MASK64
    x ^= x >> 12
    x = (x ^ (x << 25)) & MASK64
    x ^= x >> 27
    return x


def output_word(state: int) -> int:
    return (state * MULTIPLIER) & MASK64


def to_unit_interval(word: int) -> float:
    return (word >> 11) / float(1 << 53)


def draw(state: int):
    """Advance once; returns (new_state, uniform double in [0, 1))."""
    new_state = next_state(state)
    return new_state, to_unit_interval(output_word(new_state))
