"""Seeded randomness.

Distribution files are generated with SplitMix64 so that a seed pins the
exact bytes of the output independent of numpy's generator versions:

    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)                       (all arithmetic mod 2**64)

and a double in [0, 1) is ``(out >> 11) * 2**-53``. Everything else
(random juntas, DAG weights, sample inputs) uses ``numpy.random.default_rng``.
"""
import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def default_rng(seed):
    return np.random.default_rng(seed)
