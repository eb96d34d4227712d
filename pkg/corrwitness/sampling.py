"""Seeded random draws: per-sample generators, Haar unitaries and amplitude pairs."""

from __future__ import annotations

from typing import Tuple

import numpy as np


def sample_rng(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent stream keyed on (master_seed, indices); identical for any scheduling."""
    seq = np.random.SeedSequence(entropy=int(master_seed) & ((1 << 64) - 1), spawn_key=tuple(int(i) for i in indices))
    return np.random.default_rng(seq)


def haar_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """QR of a complex Ginibre matrix with the R-diagonal phases folded into Q."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_amplitudes(rng: np.random.Generator) -> Tuple[complex, complex]:
    """(b1, b2) uniform on the unit sphere of C^2."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v = v / np.linalg.norm(v)
    return complex(v[0]), complex(v[1])
