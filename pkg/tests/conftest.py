import hashlib
from importlib import resources

import numpy as np
import pytest

from xi_limit.ensemble import grow_spectra
from xi_limit.spectrum import Spectrum

ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (bool(passed), detail)


def _source_digest():
    h = hashlib.sha256()
    for mod in ("rng.py", "isometry.py", "spectrum.py"):
        h.update(resources.files("xi_limit").joinpath(mod).read_bytes())
    return h.hexdigest()[:12]


def cached_ensemble(config, seed, replicas, dims):
    """``{n: [Spectrum]}``; spectra are cached because growth dominates runtime.

    The cache key includes a digest of the sampling code, so edits invalidate it.
    """
    dims = list(dims)
    key = f"s{seed}_r{replicas}_d{'-'.join(map(str, dims))}_{_source_digest()}"
    path = config.cache.mkdir("xi_limit_ensembles") / f"{key}.npz"
    if path.exists():
        data = np.load(path)
        return {n: [Spectrum(t, r, seed) for r, t in enumerate(data[f"n{n}"])] for n in dims}
    spectra = grow_spectra(seed, range(replicas), dims)
    np.savez(path, **{f"n{n}": np.array([s.theta for s in v]) for n, v in spectra.items()})
    return spectra


@pytest.fixture(scope="session")
def ens512(request):
    """400 coupled replicas snapshotted at 32..512 (seed 1)."""
    return cached_ensemble(request.config, 1, 400, [32, 64, 128, 256, 512])


@pytest.fixture(scope="session")
def ens1024(request):
    return cached_ensemble(request.config, 2, 50, [1024])


@pytest.fixture(scope="session")
def ens16(request):
    """20000 replicas at n = 16 (seed 3), for MGF and tail checks."""
    return cached_ensemble(request.config, 3, 20000, [16])


@pytest.fixture(scope="session")
def ens_small(request):
    """20 replicas at 16, 32, 64, 256 (seed 4), for the exact identities."""
    return cached_ensemble(request.config, 4, 20, [16, 32, 64, 256])


@pytest.fixture
def haar_spectrum():
    from xi_limit.ensemble import grow_replica

    def make(n, replica=0, seed=11):
        return grow_replica(seed, replica, [n])[1][n]

    return make


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        passed, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {crit}: {detail}")
