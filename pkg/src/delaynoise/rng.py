"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, trial, purpose, channel)``,
so a given trial/channel draws the same numbers no matter how many other
trials are simulated or in which order.
"""
import numpy as np

WIENER = 0
NOISE_INIT = 1
AUX = 2


def stream(seed, trial=0, purpose=WIENER, channel=0):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial), int(purpose), int(channel)))
    return np.random.Generator(np.random.Philox(ss))


def normals(seed, trials, purpose, n_channels, size):
    """Standard normals of shape ``(len(trials), size, n_channels)``.

    Column ``[b, :, j]`` comes from the stream keyed by ``(seed, trials[b], purpose, j)``.
    """
    trials = list(trials)
    out = np.empty((len(trials), size, n_channels))
    for b, trial in enumerate(trials):
        for j in range(n_channels):
            out[b, :, j] = stream(seed, trial, purpose, j).standard_normal(size)
    return out
