import numpy as np

from src.settings.constants import RNG_BUFFER_SIZE

_SEED_MASK = (1 << 64) - 1


def seed_sequence(seed: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed & _SEED_MASK, spawn_key=(stream,))


def generator(seed: int, stream: int) -> np.random.Generator:
    """
    numpy Generator for stream ``stream`` of ``seed``.

    :param seed: 64-bit seed, negative values are taken modulo 2**64
    :param stream: nonnegative stream index
    :return: np.random.Generator
    """
    if stream < 0:
        raise ValueError("stream index must be nonnegative")
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, stream)))


class RngStream:
    """
    Reproducible uniform source identified by (seed, stream index).

    Uniforms are drawn from numpy in blocks and handed out one at a time, so the
    sequence only depends on the pair and not on how it is consumed.
    """

    __slots__ = ("seed", "stream", "_generator", "_buffer", "_position", "_buffer_size")

    def __init__(self, seed: int, stream: int = 0, buffer_size: int = RNG_BUFFER_SIZE):
        self.seed = int(seed)
        self.stream = int(stream)
        self._generator = generator(self.seed, self.stream)
        self._buffer_size = buffer_size
        self._buffer: list[float] = []
        self._position = 0

    def random(self) -> float:
        if self._position >= len(self._buffer):
            self._buffer = self._generator.random(self._buffer_size).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream})"
