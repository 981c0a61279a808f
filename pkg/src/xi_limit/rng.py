"""Splittable seeded streams and uniform sampling on complex spheres.

A stream is identified by ``(master_seed, replica_id, purpose_tag)``. The
triple is hashed with keyed BLAKE2b into 256 bits of entropy that seed a
PCG64 generator, so distinct triples give unrelated sequences.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngStream",
    "derive_stream",
    "sample_unit_sphere",
    "CHAIN",
    "STATS",
    "ARCS",
    "GRID",
]

# Purpose tags used across the package.
CHAIN = "chain"
STATS = "stats"
ARCS = "arcs"
GRID = "grid"

_HASH_KEY = b"xi_limit.rng.v1"


@dataclass
class RngStream:
    master_seed: int
    replica_id: int
    purpose_tag: str
    generator: np.random.Generator = field(repr=False)

    def standard_complex_normal(self, n):
        """``n`` i.i.d. complex normals with E|g|^2 = 1."""
        g = self.generator.standard_normal(2 * n)
        return (g[0::2] + 1j * g[1::2]) / np.sqrt(2.0)


def _entropy(master_seed, replica_id, purpose_tag):
    h = hashlib.blake2b(key=_HASH_KEY, digest_size=32)
    h.update(int(master_seed).to_bytes(16, "little", signed=True))
    h.update(int(replica_id).to_bytes(16, "little", signed=True))
    h.update(purpose_tag.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def derive_stream(master_seed: int, replica_id: int, purpose_tag: str) -> RngStream:
    if replica_id < 0:
        raise ValueError("replica_id must be >= 0")
    seq = np.random.SeedSequence(_entropy(master_seed, replica_id, purpose_tag))
    return RngStream(
        int(master_seed), int(replica_id), str(purpose_tag),
        np.random.Generator(np.random.PCG64(seq)),
    )


def sample_unit_sphere(stream: RngStream, n: int) -> np.ndarray:
    """Uniform point on the unit sphere of C^n (normalized complex Gaussian)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for _ in range(2):
        g = stream.standard_complex_normal(n)
        norm = np.linalg.norm(g)
        if norm > 0.0:
            return g / norm
    raise FloatingPointError("zero-norm Gaussian draw twice in a row")
