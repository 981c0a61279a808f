"""Virtual isometries: Haar unitaries of every dimension on one probability space.

The chain is grown by ``U_n = R_n (U_{n-1} (+) 1)`` where ``R_n`` is the unique
unitary with ``R_n e_n = x_n`` and ``R_n - I`` of rank one. ``R_n`` is kept in
factored form ``I - w w^H / kappa`` with ``w = x_n - e_n`` and
``kappa = 1 - conj(x_n[-1])``, so one growth step costs O(n^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import blas

from .errors import DegenerateTarget, NumericalDriftFailure
from .rng import RngStream, sample_unit_sphere
from .spectrum import Spectrum, eigenangles

__all__ = [
    "Reflection",
    "Snapshot",
    "VirtualIsometryChain",
    "reflection_from_target",
    "apply_reflection",
    "grow_chain",
    "unitarity_residual",
    "DENSE_SNAPSHOT_MAX_DIM",
]

KAPPA_TOL = 1e-12
DRIFT_TOL = 1e-8
# Dense snapshots are kept up to this dimension unless keep_dense is set.
DENSE_SNAPSHOT_MAX_DIM = 64


@dataclass(frozen=True)
class Reflection:
    w: np.ndarray
    kappa: complex

    @property
    def dim(self):
        return self.w.shape[0]

    def dense(self):
        """Materialize ``R = I - w w^H / kappa`` (tests and diagnostics only)."""
        return np.eye(self.dim, dtype=complex) - np.outer(self.w, self.w.conj()) / self.kappa


def reflection_from_target(x) -> Reflection:
    x = np.asarray(x, dtype=complex)
    kappa = 1.0 - np.conj(x[-1])
    if abs(kappa) < KAPPA_TOL:
        raise DegenerateTarget("target vector equals e_n to working precision")
    w = x.copy()
    w[-1] -= 1.0
    return Reflection(w, complex(kappa))


def apply_reflection(r: Reflection, M: np.ndarray, out=None) -> np.ndarray:
    """Return ``R @ M`` as ``M - w (w^H M) / kappa``.

    With ``out=M`` the update is done in place, which also works on views.
    """
    M = np.asarray(M)
    if M.shape[0] != r.dim:
        raise ValueError(f"dimension mismatch: reflection {r.dim}, matrix {M.shape}")
    row = (r.w.conj() @ M) / r.kappa
    if out is None:
        return M - np.multiply.outer(r.w, row)
    out -= np.multiply.outer(r.w, row)
    return out


def unitarity_residual(U) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


@dataclass
class Snapshot:
    n: int
    spectrum: Spectrum
    unitarity_residual: float
    det_phase: float
    dense: np.ndarray | None = None

    def record(self, replica_id, seed):
        return {
            "replica_id": replica_id,
            "seed": seed,
            "n": self.n,
            "unitarity_residual": self.unitarity_residual,
            "det_phase": self.det_phase,
        }


@dataclass
class VirtualIsometryChain:
    """One replica of the coupled sequence ``U_1, U_2, ...``.

    Only the current matrix and the requested snapshots are stored. The chain
    is a pure function of its stream, so ``(seed, replica_id, dims)`` is
    enough to rebuild it.
    """

    replica_id: int = 0
    seed: int | None = None
    keep_dense: bool = False
    n: int = 0
    snapshots: dict = field(default_factory=dict)
    _U: np.ndarray | None = field(default=None, repr=False)

    @property
    def U(self) -> np.ndarray:
        if self.n == 0:
            raise ValueError("chain has not been grown yet")
        return self._U

    def step(self, stream: RngStream):
        """Advance from ``U_{n-1}`` to ``U_n``."""
        m = self.n + 1
        x = sample_unit_sphere(stream, m)
        if m == 1:
            self._U = np.asfortranarray(x.reshape(1, 1))
            self.n = 1
            return
        try:
            r = reflection_from_target(x)
        except DegenerateTarget:
            r = reflection_from_target(sample_unit_sphere(stream, m))
        V = np.zeros((m, m), dtype=complex, order="F")
        V[: m - 1, : m - 1] = self._U
        V[m - 1, m - 1] = 1.0
        # rank-one update V - w (w^H V) / kappa, in place
        self._U = blas.zgeru(-1.0 / r.kappa, r.w, r.w.conj() @ V, a=V, overwrite_a=1)
        self.n = m

    def take_snapshot(self) -> Snapshot:
        U = self.U
        res = unitarity_residual(U)
        if res > DRIFT_TOL:
            raise NumericalDriftFailure(
                f"replica {self.replica_id}: unitarity residual {res:.3e} at n={self.n}"
            )
        spec = eigenangles(U, replica_id=self.replica_id, seed=self.seed)
        phase = float(np.angle(np.exp(1j * np.sum(spec.theta))))
        dense = U.copy() if (self.keep_dense or self.n <= DENSE_SNAPSHOT_MAX_DIM) else None
        snap = Snapshot(self.n, spec, res, phase, dense)
        self.snapshots[self.n] = snap
        return snap


def grow_chain(chain: VirtualIsometryChain, target_dims, stream: RngStream) -> VirtualIsometryChain:
    """Grow ``chain`` through ``target_dims`` (increasing), snapshotting each.

    ``stream`` must be the same stream object on every call for a given chain;
    it is consumed in order, one sphere sample per dimension.
    """
    dims = [int(d) for d in target_dims]
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError(f"target_dims must be strictly increasing, got {dims}")
    if dims and dims[0] < max(chain.n, 1):
        raise ValueError(f"chain is already at n={chain.n}; cannot snapshot at {dims[0]}")
    if chain.seed is None:
        chain.seed = stream.master_seed
    for d in dims:
        while chain.n < d:
            chain.step(stream)
        chain.take_snapshot()
    return chain
