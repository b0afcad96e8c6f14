"""Counter-based random streams.

Each draw site gets its own Philox stream keyed by ``(seed, point)`` with
the trial index and a stream id in the counter, so trial ``t`` sees the
same message, channel and noise no matter which worker runs it or in what
order.
"""

import numpy as np

MESSAGE, CHANNEL, NOISE = 0, 1, 2

_MASK64 = (1 << 64) - 1


def stream(seed: int, point: int, trial: int, stream_id: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, point & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, trial & _MASK64, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def trial_streams(seed: int, point: int, trial: int):
    """``(message, channel, noise)`` generators for one trial."""
    return tuple(stream(seed, point, trial, s) for s in (MESSAGE, CHANNEL, NOISE))
