"""64-bit mixing and the counter-based PRNG used by stochastic patterns.

Both are defined by their recurrences so any implementation reproduces the
same streams bit for bit:

    GOLDEN = 0x9E3779B97F4A7C15
    mix64(x):
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9   (mod 2**64)
        x = (x ^ (x >> 27)) * 0x94D049BB133111EB   (mod 2**64)
        return x ^ (x >> 31)

    splitmix64(seed, i) = mix64(seed + (i + 1) * GOLDEN)   (mod 2**64)

``splitmix64(seed, i)`` is the i-th output of the splitmix64 generator
started at ``seed``; being counter-based it can be evaluated at any cycle
without replaying the stream.
"""

import zlib

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_C1 = 0xBF58476D1CE4E5B9
MIX_C2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    x &= MASK64
    x = ((x ^ (x >> 30)) * MIX_C1) & MASK64
    x = ((x ^ (x >> 27)) * MIX_C2) & MASK64
    return x ^ (x >> 31)


def splitmix64(seed: int, index: int) -> int:
    return mix64(seed + (index + 1) * GOLDEN)


def unit_float(seed: int, index: int) -> float:
    """Uniform double in [0, 1) from the top 53 bits of ``splitmix64``."""
    return (splitmix64(seed, index) >> 11) * (1.0 / (1 << 53))


def name_key(name: str) -> int:
    """Stable 64-bit key for an element name (CRC-32 spread through mix64)."""
    return mix64(zlib.crc32(name.encode("utf-8")))


def derive_seed(run_seed: int, name: str, pattern_seed: int = 0) -> int:
    return mix64((run_seed & MASK64) ^ name_key(name) ^ mix64(pattern_seed + GOLDEN))
