"""Seeded replica ensembles: manifests, growth, persistence and verification.

Layout of a run directory::

    manifest.json
    index.json
    spectra/replica_00000.csv      replica_id,n,k,theta_k,y_k
    snapshots/replica_00000.json   [{replica_id, seed, n, unitarity_residual, det_phase}, ...]
    dense/replica_00000_n0064.bin  (only with keep_dense) column-major complex128

Every CSV starts with a ``# manifest_hash=<hex>`` line, and every JSON output
carries a ``manifest_hash`` field.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import argument, powersums, sine_stats, xi
from .errors import IncompleteRun, InsufficientReplicas, ManifestError, XiLimitError
from .isometry import VirtualIsometryChain, grow_chain
from .rng import ARCS, CHAIN, GRID, derive_stream
from .spectrum import Spectrum, rescaled_points

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentManifest",
    "EnsembleRun",
    "grow_replica",
    "grow_spectra",
    "run_grow",
    "load_run",
    "run_verify",
    "run_xi_grid",
    "run_stats",
    "worker_count",
    "validate_report",
]

FLOAT_FMT = "{:.17g}"


def _fmt(x):
    return FLOAT_FMT.format(float(x))


def worker_count(requested=None):
    """Worker processes to use: ``requested``, capped by ``XI_LIMIT_THREADS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("XI_LIMIT_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@dataclass
class ExperimentManifest:
    seed: int
    replicas: int
    dims: list
    out: str = "run"
    A: int | None = None
    K: int = 100_000
    grid_box: list = field(default_factory=lambda: [-2.0, 2.0, -2.0, 2.0])
    grid_steps: int = 21
    keep_dense: bool = False
    suites: list = field(default_factory=lambda: ["identities"])

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        self.validate()

    def validate(self):
        if self.replicas < 1:
            raise ManifestError("replicas must be >= 1")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ManifestError("dims must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise ManifestError(f"dims must be strictly increasing, got {self.dims}")
        if len(self.grid_box) != 4 or not np.all(np.isfinite(self.grid_box)):
            raise ManifestError("grid_box must be four finite numbers")
        if self.grid_steps < 1:
            raise ManifestError("grid_steps must be >= 1")

    def to_dict(self):
        return asdict(self)

    @property
    def hash(self) -> str:
        # the output directory is not part of the experiment's identity
        d = self.to_dict()
        d.pop("out")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ManifestError(f"unknown manifest fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def grow_replica(seed, replica_id, dims, keep_dense=False):
    """Grow one chain through ``dims``; returns ``(chain, {n: Spectrum})``."""
    chain = VirtualIsometryChain(replica_id=replica_id, seed=seed, keep_dense=keep_dense)
    grow_chain(chain, dims, derive_stream(seed, replica_id, CHAIN))
    return chain, {n: s.spectrum for n, s in chain.snapshots.items()}


def _grow_task(args):
    seed, rid, dims, keep_dense = args
    chain, _ = grow_replica(seed, rid, dims, keep_dense)
    return rid, chain.snapshots


def _map(fn, tasks, workers):
    workers = worker_count(workers)
    if workers == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def grow_spectra(seed, replica_ids, dims, workers=None):
    """``{n: [Spectrum, ...]}`` for a batch of replicas, in replica order."""
    results = _map(_grow_task, [(seed, r, list(dims), False) for r in replica_ids], workers)
    results.sort(key=lambda t: t[0])
    return {n: [snaps[n].spectrum for _, snaps in results] for n in dims}


@dataclass
class EnsembleRun:
    manifest: ExperimentManifest
    root: Path
    spectra_by_dim: dict
    index: dict

    def spectra(self, n):
        if n not in self.spectra_by_dim:
            raise IncompleteRun(f"dimension n={n} not in run (have {sorted(self.spectra_by_dim)})")
        return self.spectra_by_dim[n]

    @property
    def dims(self):
        return sorted(self.spectra_by_dim)

    @property
    def replica_ids(self):
        return [r["replica_id"] for r in self.index["replicas"]]


def _spectra_csv(rid, snapshots, mhash):
    buf = io.StringIO()
    buf.write(f"# manifest_hash={mhash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replica_id", "n", "k", "theta_k", "y_k"])
    for n in sorted(snapshots):
        th = snapshots[n].spectrum.theta
        y = n * th / (2 * np.pi)
        for k in range(n):
            w.writerow([rid, n, k + 1, _fmt(th[k]), _fmt(y[k])])
    return buf.getvalue()


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def run_grow(manifest: ExperimentManifest, workers=None) -> EnsembleRun:
    """Grow every replica, write spectra/snapshot files and the index.

    Re-running with the same manifest rewrites byte-identical spectra and
    snapshot files.
    """
    t0 = time.time()
    root = Path(manifest.out)
    for sub in ("spectra", "snapshots", "dense"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    mhash = manifest.hash
    _write_json(root / "manifest.json", manifest.to_dict())
    tasks = [(manifest.seed, r, manifest.dims, manifest.keep_dense) for r in range(manifest.replicas)]
    entries = []
    spectra_by_dim = {n: [] for n in manifest.dims}
    for rid, snaps in _map(_grow_task, tasks, workers):
        stem = f"replica_{rid:05d}"
        (root / "spectra" / f"{stem}.csv").write_text(_spectra_csv(rid, snaps, mhash))
        records = [snaps[n].record(rid, manifest.seed) for n in sorted(snaps)]
        _write_json(root / "snapshots" / f"{stem}.json", {"manifest_hash": mhash, "snapshots": records})
        dense = []
        if manifest.keep_dense:
            for n in sorted(snaps):
                p = root / "dense" / f"{stem}_n{n:04d}.bin"
                np.asarray(snaps[n].dense, dtype="<c16").flatten(order="F").tofile(p)
                dense.append(str(p.relative_to(root)))
        entries.append({
            "replica_id": rid,
            "spectra": f"spectra/{stem}.csv",
            "snapshots": f"snapshots/{stem}.json",
            "dense": dense,
        })
        for n in manifest.dims:
            spectra_by_dim[n].append(snaps[n].spectrum)
        log.debug("replica %d done", rid)
    index = {
        "manifest_hash": mhash,
        "replicas": entries,
        "dims": manifest.dims,
        "wall_clock_seconds": time.time() - t0,
    }
    _write_json(root / "index.json", index)
    return EnsembleRun(manifest, root, spectra_by_dim, index)


def _read_hashed_csv(path, expected_hash):
    text = Path(path).read_text()
    first, _, body = text.partition("\n")
    if not first.startswith("# manifest_hash="):
        raise IncompleteRun(f"{path}: missing manifest hash header")
    got = first.split("=", 1)[1].strip()
    if got != expected_hash:
        raise IncompleteRun(f"{path}: manifest hash {got} does not match run {expected_hash}")
    return list(csv.DictReader(io.StringIO(body)))


def load_run(root) -> EnsembleRun:
    root = Path(root)
    try:
        manifest = ExperimentManifest.load(root / "manifest.json")
        index = json.loads((root / "index.json").read_text())
    except FileNotFoundError as exc:
        raise IncompleteRun(f"missing run file: {exc.filename}") from exc
    mhash = manifest.hash
    if index.get("manifest_hash") != mhash:
        raise IncompleteRun("index.json was written for a different manifest")
    spectra_by_dim = {}
    for entry in index["replicas"]:
        rid = entry["replica_id"]
        path = root / entry["spectra"]
        if not path.exists():
            raise IncompleteRun(f"replica {rid}: missing {entry['spectra']}")
        snap_path = root / entry["snapshots"]
        if not snap_path.exists():
            raise IncompleteRun(f"replica {rid}: missing {entry['snapshots']}")
        if json.loads(snap_path.read_text()).get("manifest_hash") != mhash:
            raise IncompleteRun(f"replica {rid}: snapshot file from a different manifest")
        rows = _read_hashed_csv(path, mhash)
        by_n = {}
        for row in rows:
            by_n.setdefault(int(row["n"]), []).append((int(row["k"]), float(row["theta_k"])))
        for n in manifest.dims:
            if n not in by_n or len(by_n[n]) != n:
                raise IncompleteRun(f"replica {rid}: spectra file lacks n={n} rows")
            theta = np.array([t for _, t in sorted(by_n[n])])
            spectra_by_dim.setdefault(n, []).append(Spectrum(theta, rid, manifest.seed))
    return EnsembleRun(manifest, root, spectra_by_dim, index)


# ---------------------------------------------------------------------------
# verification


def _check(name, passed, residual=None, tolerance=None, hard=True, detail=None, error=None):
    return {
        "name": name,
        "status": "error" if error else ("pass" if passed else "fail"),
        "hard": hard,
        "residual": None if residual is None else float(residual),
        "tolerance": None if tolerance is None else float(tolerance),
        "detail": detail or "",
        "error": error,
    }


def _identity_checks(run: EnsembleRun, n_arcs=1000, n_z=100):
    seed = run.manifest.seed
    checks = []
    worst = {k: 0.0 for k in ("counting", "index", "functional", "powersum", "xi0")}
    count_fail = 0
    pw_ok = True
    prod_ok = True
    prod_detail = []
    for n in run.dims:
        fe_tol = 1e-10 * n
        for spec in run.spectra(n):
            rid = spec.replica_id
            arcs = derive_stream(seed, rid, ARCS).generator.uniform(0, 2 * np.pi, size=(n_arcs, 2))
            got = argument.count_zeros_arc(spec, arcs[:, 0], arcs[:, 1])
            count_fail += int(np.sum(got != argument.count_direct(spec, arcs[:, 0], arcs[:, 1])))
            for k in range(-n, 2 * n + 1):
                worst["index"] = max(worst["index"], argument.index_identity_residual(spec, k))
            g = derive_stream(seed, rid, GRID).generator
            # |log|z|| <= 1/n keeps |z|^{+-n} <= e, so both sides stay O(1)
            r = np.exp(g.uniform(-1.0 / n, 1.0 / n, n_z))
            zs = r * np.exp(1j * g.uniform(0, 2 * np.pi, n_z))
            fe = max(xi.functional_equation_residual(spec, z) for z in zs)
            worst["functional"] = max(worst["functional"], fe / n)
            worst["xi0"] = max(worst["xi0"], abs(xi.xi_direct(spec, 0.0).value - 1.0))
            pts = rescaled_points(spec, run.manifest.K)
            for a in (1, 2, 3):
                res = powersums.compare_power_sums(spec, pts, a, run.manifest.K)
                worst["powersum"] = max(worst["powersum"], res.abs_diff / (res.tail_bound + res.roundoff))
                pw_ok &= res.agrees()
            z = 1.0 + 1.0j
            exact = xi.xi_direct(spec, z).value
            prev = np.inf
            for A in (n, 4 * n, 16 * n):
                ev = xi.xi_product(rescaled_points(spec, 16 * n), z, A)
                err = abs(ev.value - exact)
                prod_ok &= err <= ev.tail_bound and err < prev
                prev = err
            prod_detail.append(prev)
    checks.append(_check("counting_formula", count_fail == 0, count_fail, 0,
                         detail="arcs whose formula count differs from direct count"))
    checks.append(_check("index_identity", worst["index"] <= 1e-8, worst["index"], 1e-8))
    checks.append(_check("functional_equation", worst["functional"] <= 1e-10, worst["functional"], 1e-10,
                         detail="max residual / n"))
    checks.append(_check("xi_at_zero", worst["xi0"] == 0.0, worst["xi0"], 0.0))
    checks.append(_check("power_sum_closed_vs_direct", pw_ok, worst["powersum"], 1.0,
                         detail="max |closed - direct| / (tail_bound + roundoff), alpha in 1..3"))
    checks.append(_check("product_vs_direct", prod_ok, max(prod_detail), None,
                         detail="error at A in (n, 4n, 16n) decreasing and under tail estimate, z=1+i"))
    return checks


def _statistics_checks(run: EnsembleRun):
    checks = []
    n_top = run.dims[-1]
    top = run.spectra(n_top)
    try:
        A = [a for a in (2, 4, 8, 16, 32, 64) if a <= n_top / 8]
        if len(A) < 2:
            raise InsufficientReplicas(f"n={n_top} too small for a variance profile")
        vp = sine_stats.variance_profile(top, A)
        rel = abs(vp.slope - sine_stats.INV_PI2) / sine_stats.INV_PI2
        checks.append(_check("variance_slope", rel <= 0.25, rel, 0.25, hard=False,
                             detail=f"slope={vp.slope:.5f}, target 1/pi^2"))
    except XiLimitError as exc:
        checks.append(_check("variance_slope", False, hard=False, error=type(exc).__name__, detail=str(exc)))
    try:
        pc = sine_stats.empirical_pair_correlation(top, n_top / 8)
        checks.append(_check("pair_correlation", pc.p_value > 1e-3, pc.p_value, 1e-3, hard=False,
                             detail=f"chi2={pc.chi2:.2f} on 40 bins"))
    except XiLimitError as exc:
        checks.append(_check("pair_correlation", False, hard=False, error=type(exc).__name__, detail=str(exc)))
    for n in run.dims:
        xs = np.array([argument.x_n(s) for s in run.spectra(n)])
        tail_ok = True
        worst = -np.inf
        for x in np.linspace(0.5, 6.0, 12):
            emp = np.mean(np.abs(xs) >= x)
            bound = argument.chernoff_bound(n, x)
            tail_ok &= emp <= bound
            worst = max(worst, emp - bound)
        checks.append(_check(f"chernoff_tail_n{n}", tail_ok, worst, 0.0, hard=False))
    return checks


def validate_report(report):
    import jsonschema

    schema = json.loads(resources.files("xi_limit").joinpath("report.schema.json").read_text())
    jsonschema.validate(report, schema)


def run_verify(run: EnsembleRun | str | os.PathLike, suite="all") -> dict:
    """Run a verification suite and write ``report_<suite>.json``.

    ``report["exit_status"]`` is nonzero iff a hard (exact identity) check failed.
    """
    if not isinstance(run, EnsembleRun):
        run = load_run(run)
    if suite not in ("identities", "statistics", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    checks = []
    if suite in ("identities", "all"):
        checks += _identity_checks(run)
    if suite in ("statistics", "all"):
        checks += _statistics_checks(run)
    hard_fail = any(c["hard"] and c["status"] != "pass" for c in checks)
    report = {
        "manifest_hash": run.manifest.hash,
        "suite": suite,
        "n_replicas": len(run.replica_ids),
        "dims": run.dims,
        "checks": checks,
        "passed": all(c["status"] == "pass" for c in checks),
        "exit_status": 1 if hard_fail else 0,
    }
    validate_report(report)
    _write_json(Path(run.root) / f"report_{suite}.json", report)
    return report


# ---------------------------------------------------------------------------
# xi grids


def grid_points(box, steps):
    x0, x1, y0, y1 = box
    re = np.linspace(x0, x1, steps)
    im = np.linspace(y0, y1, steps)
    return (re[None, :] + 1j * im[:, None]).ravel()


def run_xi_grid(run: EnsembleRun | str | os.PathLike, box=None, steps=None, dims=None):
    """Write ``xi/replica_XXXXX_nNNNN.csv`` grids and ``xi/convergence.csv``.

    The summary holds ``sup_grid |xi_n - xi_N|`` per replica, with ``N`` the
    largest requested dimension. Returns the list of files written.
    """
    if not isinstance(run, EnsembleRun):
        run = load_run(run)
    box = run.manifest.grid_box if box is None else list(box)
    steps = run.manifest.grid_steps if steps is None else int(steps)
    dims = run.dims if dims is None else [int(d) for d in dims]
    missing = [n for n in dims if n not in run.spectra_by_dim]
    if missing:
        raise IncompleteRun(f"requested dims {missing} not in run (have {run.dims})")
    z = grid_points(box, steps)
    out_dir = Path(run.root) / "xi"
    out_dir.mkdir(exist_ok=True)
    mhash = run.manifest.hash
    files = []
    values = {}
    for n in dims:
        for spec in run.spectra(n):
            v = xi.xi_direct(spec, z).value
            values[(spec.replica_id, n)] = v
            buf = io.StringIO()
            buf.write(f"# manifest_hash={mhash}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["re_z", "im_z", "re_xi", "im_xi", "abs_xi", "method", "n", "A"])
            for zi, vi in zip(z, v):
                w.writerow([_fmt(zi.real), _fmt(zi.imag), _fmt(vi.real), _fmt(vi.imag),
                            _fmt(abs(vi)), "direct", n, ""])
            p = out_dir / f"replica_{spec.replica_id:05d}_n{n:04d}.csv"
            p.write_text(buf.getvalue())
            files.append(p)
    N = dims[-1]
    buf = io.StringIO()
    buf.write(f"# manifest_hash={mhash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replica_id", "n", "N", "box", "sup_gap"])
    box_s = ",".join(_fmt(b) for b in box)
    for rid in run.replica_ids:
        for n in dims[:-1]:
            gap = np.max(np.abs(values[(rid, n)] - values[(rid, N)]))
            w.writerow([rid, n, N, box_s, _fmt(gap)])
    p = out_dir / "convergence.csv"
    p.write_text(buf.getvalue())
    files.append(p)
    return files


# ---------------------------------------------------------------------------
# statistics outputs


def _write_rows_csv(path, rows, columns, mhash):
    buf = io.StringIO()
    buf.write(f"# manifest_hash={mhash}\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (_fmt(v) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})
    Path(path).write_text(buf.getvalue())


def run_stats(run, kind, n=None, lam=1.0, A_list=(2, 4, 8, 16, 32, 64), K=None, eps=0.0):
    """Compute one statistic on a stored run and write it under ``stats/``."""
    if not isinstance(run, EnsembleRun):
        run = load_run(run)
    n = run.dims[-1] if n is None else int(n)
    specs = run.spectra(n)
    mhash = run.manifest.hash
    out = Path(run.root) / "stats"
    out.mkdir(exist_ok=True)
    if kind == "variance":
        vp = sine_stats.variance_profile(specs, [a for a in A_list if a <= n / 8])
        p = out / f"variance_n{n}.csv"
        _write_rows_csv(p, vp.rows(), ["A", "mean", "var", "stderr", "n_replicas"], mhash)
        return p
    if kind == "paircorr":
        pc = sine_stats.empirical_pair_correlation(specs, n / 8)
        p = out / f"paircorr_n{n}.csv"
        _write_rows_csv(p, pc.rows(), ["s_bin_center", "density", "stderr", "rho2_theory"], mhash)
        return p
    if kind == "mgf":
        xs = np.array([argument.x_n(s) for s in specs])
        e = np.exp(lam * xs)
        exact = argument.mgf_exact(n, lam)
        stderr = float(e.std(ddof=1) / np.sqrt(e.size)) if e.size > 1 else float("nan")
        rep = {"manifest_hash": mhash, "n": n, "lambda": lam, "exact": exact,
               "mc_mean": float(e.mean()), "mc_stderr": stderr,
               "z_score": (float(e.mean()) - exact) / stderr if stderr else float("nan")}
        p = out / f"mgf_n{n}_lambda{lam:g}.json"
        _write_json(p, rep)
        rows = []
        for s, x in zip(specs, xs):
            sup = argument.arg_supremum(s)
            rows.append({"replica_id": s.replica_id, "n": n, "X_n": float(x), "arg_sup": sup,
                         "arg_sup_over_log_n": sup / np.log(n)})
        _write_rows_csv(out / f"argstats_n{n}.csv", rows,
                        ["replica_id", "n", "X_n", "arg_sup", "arg_sup_over_log_n"], mhash)
        return p
    if kind == "deviation":
        K = K or n // 2
        rows = [{"replica_id": s.replica_id, "n": n, "K": K,
                 "deviation": sine_stats.deviation_profile(rescaled_points(s, K), K)} for s in specs]
        p = out / f"deviation_n{n}.csv"
        _write_rows_csv(p, rows, ["replica_id", "n", "K", "deviation"], mhash)
        return p
    if kind == "coupling":
        N = run.dims[-1]
        K = K or max(1, int(n**0.25))
        rows = []
        for s, sN in zip(specs, run.spectra(N)):
            prof = sine_stats.coupling_error_profile(s, sN, K, eps)
            for k, err, env, cenv in prof.rows():
                rows.append({"replica_id": s.replica_id, "n": n, "N": N, "k": int(k), "error": float(err),
                             "envelope": float(env), "fitted_envelope": float(cenv)})
        p = out / f"coupling_n{n}_N{N}.csv"
        _write_rows_csv(p, rows, ["replica_id", "n", "N", "k", "error", "envelope", "fitted_envelope"], mhash)
        return p
    if kind == "powersum":
        K = K or run.manifest.K
        res = []
        for s in specs:
            pts = rescaled_points(s, K)
            for a in (1, 2, 3):
                r = powersums.compare_power_sums(s, pts, a, K)
                res.append({"replica_id": s.replica_id, "n": n, **r.as_dict()})
        p = out / f"powersum_n{n}.json"
        _write_json(p, {"manifest_hash": mhash, "results": res})
        return p
    raise ValueError(f"unknown statistic {kind!r}")
