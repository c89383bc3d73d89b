"""Deterministic random streams for datasets, ensembles, and Monte-Carlo checks.

All randomness in the package flows through :class:`RandomStream`, a thin
wrapper over numpy's PCG64 generator seeded through ``SeedSequence``. Streams
are addressed by an integer seed plus a spawn key, so per-sample substreams
(``stream.child(i)``) are independent and reproducible regardless of the
order or parallelism in which samples are generated.

Gaussian variates are produced by an explicit Box-Muller transform from
PCG64 uniforms rather than the generator's native method, so the exact
sample stream is pinned by this module and not by the numpy version.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


class RandomStream:
    """A seeded PCG64 stream with deterministic child spawning."""

    def __init__(self, seed: int, key: tuple[int, ...] = ()) -> None:
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self._seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def child(self, index: int) -> RandomStream:
        """Return the independent substream addressed by ``index``."""
        return RandomStream(self.seed, self.key + (int(index),))

    def uniform(self, size: int | tuple[int, ...] | None = None) -> NDArray[np.float64]:
        """Uniform variates on [0, 1)."""
        return self._gen.random(size)

    def integers(self, low: int, high: int, size: int | None = None):
        return self._gen.integers(low, high, size=size)

    def gaussian(self, size: int) -> NDArray[np.float64]:
        """Standard normal variates via Box-Muller.

        Always consumes ``2 * ceil(size / 2)`` uniforms so the stream
        position depends only on ``size``.
        """
        pairs = (size + 1) // 2
        u1 = 1.0 - self._gen.random(pairs)  # in (0, 1]; keeps log finite
        u2 = self._gen.random(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:size]

    def complex_gaussian(self, size: int) -> NDArray[np.complex128]:
        """Standard complex normal variates (unit total variance)."""
        raw = self.gaussian(2 * size)
        return (raw[0::2] + 1j * raw[1::2]) / np.sqrt(2.0)

    def phases(self, size: int) -> NDArray[np.float64]:
        """Angles uniform on [0, 2*pi)."""
        return 2.0 * np.pi * self._gen.random(size)

    def haar_qubit_state(self) -> NDArray[np.complex128]:
        """A single-qubit state uniform on the Bloch sphere.

        Four standard Gaussians form two complex amplitudes which are then
        normalized; the induced distribution is the unitarily invariant one.
        """
        amps = self.complex_gaussian(2)
        return amps / np.linalg.norm(amps)

    def haar_state(self, dim: int) -> NDArray[np.complex128]:
        """A Haar-random pure state on a ``dim``-dimensional space."""
        amps = self.complex_gaussian(dim)
        return amps / np.linalg.norm(amps)

    def haar_unitary(self, dim: int) -> NDArray[np.complex128]:
        """A Haar-distributed unitary via QR of a Ginibre matrix.

        The R-factor's diagonal phases are divided out (Mezzadri's
        correction) so the distribution is exactly the Haar measure.
        """
        ginibre = self.complex_gaussian(dim * dim).reshape(dim, dim)
        q, r = np.linalg.qr(ginibre)
        diag = np.diagonal(r).copy()
        diag[diag == 0] = 1.0
        return q * (diag / np.abs(diag))
