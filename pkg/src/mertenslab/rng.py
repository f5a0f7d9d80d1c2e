"""Deterministic 64-bit random streams for the Monte Carlo experiments.

The generator is a counter with a fixed mixing finalizer (splitmix64):
the state advances by the odd constant GAMMA and each output is the
mixed state.  All constants are pinned so that independent
implementations reproduce the streams bit for bit:

    GAMMA = 0x9E3779B97F4A7C15
    mix(z):  z ^= z >> 30;  z *= 0xBF58476D1ADB4FB1   (mod 2^64)
             z ^= z >> 27;  z *= 0x94D49BD3ECEB9C3F   (mod 2^64)
             z ^= z >> 31

Stream derivation for trial t from a 64-bit seed s:

    origin(s, t) = mix(s XOR mix((t + 1) * GAMMA mod 2^64))
    output k     = mix(origin + (k + 1) * GAMMA mod 2^64),  k = 0, 1, ...

Pinned mappings used by the experiments:
  * coin step: +1 if bit 0 of the output is 1, else -1
  * uniform in [0, 1): (output >> 11) * 2^-53
  * integer below m: output mod m
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1ADB4FB1
_MIX2 = 0x94D49BD3ECEB9C3F

_U = np.uint64


def mix64(z: int) -> int:
    """Scalar splitmix64 finalizer over Python ints (mod 2^64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U(30))) * _U(_MIX1)
    z = (z ^ (z >> _U(27))) * _U(_MIX2)
    return z ^ (z >> _U(31))


def stream_origin(seed: int, trial: int) -> int:
    """Starting counter of the derived stream for (seed, trial)."""
    return mix64((seed ^ mix64(((trial + 1) * GAMMA) & MASK64)) & MASK64)


@dataclass(frozen=True)
class Seed:
    """A 64-bit experiment seed; any value is valid."""

    value: int = 0

    def __post_init__(self):
        if not 0 <= self.value <= MASK64:
            raise ValueError(f"seed must fit in 64 bits, got {self.value}")


class Stream:
    """Sequential view of the derived stream for one (seed, trial) pair."""

    __slots__ = ("origin", "pos")

    def __init__(self, seed: Seed, trial: int):
        self.origin = stream_origin(seed.value, trial)
        self.pos = 0

    def next_uint64_block(self, count: int) -> np.ndarray:
        """Next `count` raw outputs as a uint64 array."""
        ks = np.arange(self.pos + 1, self.pos + count + 1, dtype=np.uint64)
        self.pos += count
        return _mix64_array(_U(self.origin) + ks * _U(GAMMA))

    def next_uniform_block(self, count: int) -> np.ndarray:
        """Next `count` uniforms in [0, 1) via the pinned 53-bit mapping."""
        return (self.next_uint64_block(count) >> _U(11)) * np.float64(2.0**-53)

    def next_uint64(self) -> int:
        self.pos += 1
        return mix64((self.origin + self.pos * GAMMA) & MASK64)

    def next_below(self, bound: int) -> int:
        """Next integer in [0, bound) via the pinned modulo mapping."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_uint64() % bound
