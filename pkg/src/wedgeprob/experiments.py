"""Seeded Monte Carlo campaigns over random rank-r extensions of a state omega.

Sample ``i`` at rank ``r`` draws ``v`` from the invariant law with RNG stream
``i`` of the master seed, forms ``rho_v`` against the canonical purification of
omega and runs the configured tests. Per-sample outcomes are folded into a
:class:`RankRecord`; the fold is associative and commutative, so the report
does not depend on how samples were split across workers.
"""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib.metadata import PackageNotFoundError, version

import numpy as np
from scipy.stats import binomtest

from ._accel import USE_NUMBA
from .errors import ValidationError
from .io import load_json, matrix_from_json
from .sampling import SeededRng, _as_generator, ginibre, sample_haar_tuple, tuple_rank
from .separability import PPT_EXACT_MAX_DIM, Status, decide
from .states import MarginalState, purify, state_from_tuple

KNOWN_TESTS = ("wedge", "ppt", "ball")
RANDOM_FAITHFUL_EPS = 1e-6


def _code_version():
    try:
        return version("artifact")
    except PackageNotFoundError:  # pragma: no cover
        return "unknown"


@dataclass
class ExperimentConfig:
    n: int
    m: int
    r_list: list
    samples: int
    master_seed: int = 0
    omega: str = "maximally-mixed"
    rel_tol: float = 1e-8
    tests: tuple = KNOWN_TESTS
    workers: int = 1

    def __post_init__(self):
        self.r_list = [int(r) for r in self.r_list]
        self.tests = tuple(self.tests)
        self.validate()

    def validate(self):
        if not (self.m >= self.n >= 2):
            raise ValidationError(f"need m >= n >= 2, got n={self.n}, m={self.m}")
        if not self.r_list:
            raise ValidationError("r_list must be non-empty")
        for r in self.r_list:
            if not 1 <= r <= self.m * self.n:
                raise ValidationError(f"r={r} outside 1..mn={self.m * self.n}")
        if self.samples < 0:
            raise ValidationError("samples must be non-negative")
        if not 0 <= self.master_seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        if self.rel_tol < 0:
            raise ValidationError("rel_tol must be non-negative")
        unknown = set(self.tests) - set(KNOWN_TESTS)
        if unknown:
            raise ValidationError(f"unknown tests {sorted(unknown)}; choose from {KNOWN_TESTS}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    def to_dict(self):
        d = asdict(self)
        d["tests"] = list(self.tests)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown config keys {sorted(extra)}")
        return cls(**d)


def omega_from_spec(spec, n, rng=None):
    """Build the marginal state from ``maximally-mixed``, ``random-faithful[:seed]`` or ``file:path``."""
    if spec == "maximally-mixed":
        return MarginalState.maximally_mixed(n)
    if spec.startswith("random-faithful"):
        _, _, seed = spec.partition(":")
        gen = _as_generator(SeededRng(int(seed)) if seed else rng)
        g = ginibre(n, n, gen)
        a = g @ g.conj().T
        a = a / np.trace(a).real
        a = (a + RANDOM_FAITHFUL_EPS * np.eye(n)) / (1.0 + n * RANDOM_FAITHFUL_EPS)
        return MarginalState.from_matrix(a)
    if spec.startswith("file:"):
        omega = MarginalState.from_matrix(matrix_from_json(load_json(spec[5:])))
        if omega.n != n:
            raise ValidationError(f"omega file has dimension {omega.n}, expected {n}")
        if not omega.faithful:
            raise ValidationError("omega from file is not faithful")
        return omega
    raise ValidationError(f"unknown omega spec {spec!r}")


@dataclass
class RankRecord:
    r: int
    samples: int = 0
    tuple_rank_histogram: dict = field(default_factory=dict)
    state_rank_histogram: dict = field(default_factory=dict)
    certified_entangled: int = 0
    certified_separable: int = 0
    undecided: int = 0
    wedge_entangled: int = 0
    wedge_entangled_npt: int = 0
    npt: int = 0
    ball_separable: int = 0
    ppt_exact_separable: int = 0
    w_star_ge2: int = 0
    w_ge2: int = 0
    min_wedge_margin: float = None
    min_margin_w_star: float = None
    ci_low: float = None
    ci_high: float = None

    def merge(self, other):
        if other.r != self.r:
            raise ValueError("cannot merge records for different r")
        out = RankRecord(self.r)
        for f in fields(RankRecord):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if f.name in ("r", "ci_low", "ci_high"):
                continue
            if isinstance(a, dict):
                merged = dict(a)
                for k, cnt in b.items():
                    merged[k] = merged.get(k, 0) + cnt
                setattr(out, f.name, merged)
            elif f.name.startswith("min_"):
                vals = [x for x in (a, b) if x is not None]
                setattr(out, f.name, min(vals) if vals else None)
            else:
                setattr(out, f.name, a + b)
        return out

    @property
    def entangled_fraction(self):
        return self.certified_entangled / self.samples if self.samples else None

    def finalize(self):
        if self.samples:
            ci = binomtest(self.certified_entangled, self.samples).proportion_ci(0.95, method="wilson")
            self.ci_low, self.ci_high = float(ci.low), float(ci.high)
        self.tuple_rank_histogram = {int(k): v for k, v in sorted(self.tuple_rank_histogram.items())}
        self.state_rank_histogram = {int(k): v for k, v in sorted(self.state_rank_histogram.items())}
        return self

    def to_dict(self):
        d = asdict(self)
        d["tuple_rank_histogram"] = {str(k): v for k, v in self.tuple_rank_histogram.items()}
        d["state_rank_histogram"] = {str(k): v for k, v in self.state_rank_histogram.items()}
        d["entangled_fraction"] = self.entangled_fraction
        return d


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list
    provenance: dict

    def record(self, r):
        for rec in self.records:
            if rec.r == r:
                return rec
        raise KeyError(r)

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "provenance": dict(self.provenance),
            "records": [rec.to_dict() for rec in self.records],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        rows = [rec.to_dict() for rec in self.records]
        buf = io.StringIO()
        header = list(rows[0]) if rows else [f.name for f in fields(RankRecord)]
        header += ["config", "seed"]
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            row = {k: json.dumps(v, sort_keys=True) if isinstance(v, dict) else v for k, v in row.items()}
            row["config"] = json.dumps(self.config.to_dict(), sort_keys=True)
            row["seed"] = self.config.master_seed
            writer.writerow(row)
        return buf.getvalue()


def evaluate_sample(cfg, xi, r, i):
    """Run one sample and return it as a single-sample :class:`RankRecord`."""
    rec = RankRecord(r, samples=1)
    v = sample_haar_tuple(cfg.n, cfg.m, r, SeededRng(cfg.master_seed, i))
    rho = state_from_tuple(v, xi)
    rec.tuple_rank_histogram = {tuple_rank(v, cfg.rel_tol): 1}
    rec.state_rank_histogram = {rho.rank(cfg.rel_tol): 1}
    verdict = decide(v, xi, cfg.rel_tol, cfg.tests, rho=rho)
    certs = verdict.certificates
    if verdict.status is Status.ENTANGLED:
        rec.certified_entangled = 1
    elif verdict.status is Status.SEPARABLE:
        rec.certified_separable = 1
    else:
        rec.undecided = 1
    if verdict.wedge is not None:
        inv = verdict.wedge
        rec.w_star_ge2 = int(inv.w_star >= 2)
        rec.w_ge2 = int(inv.w >= 2)
        rec.min_margin_w_star = inv.margin_w_star
        if "wedge" in certs:
            rec.wedge_entangled = 1
            rec.min_wedge_margin = certs["wedge"].margin
            rec.wedge_entangled_npt = int("ppt" in certs)
    rec.npt = int("ppt" in certs)
    rec.ball_separable = int("ball" in certs)
    rec.ppt_exact_separable = int("ppt_exact" in certs)
    return rec


def _run_chunk(args):
    cfg, omega_matrix, r, start, stop = args
    xi = purify(MarginalState.from_matrix(omega_matrix))
    acc = RankRecord(r)
    for i in range(start, stop):
        try:
            acc = acc.merge(evaluate_sample(cfg, xi, r, i))
        except Exception as exc:
            raise type(exc)(f"{exc} (at r={r}, sample={i})") from exc
    return acc


def _chunks(samples, workers):
    if samples == 0:
        return []
    size = max(1, -(-samples // (4 * workers)))
    return [(s, min(samples, s + size)) for s in range(0, samples, size)]


def run_experiment(cfg, omega=None):
    t0 = time.perf_counter()
    if omega is None:
        omega = omega_from_spec(cfg.omega, cfg.n, SeededRng(cfg.master_seed, 2**63))
    if not omega.faithful:
        raise ValidationError("omega must be faithful")
    records = []
    for r in cfg.r_list:
        jobs = [(cfg, np.array(omega.matrix), r, a, b) for a, b in _chunks(cfg.samples, cfg.workers)]
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                parts = list(pool.map(_run_chunk, jobs))
        else:
            parts = [_run_chunk(job) for job in jobs]
        acc = RankRecord(r)
        for part in parts:
            acc = acc.merge(part)
        records.append(acc.finalize())
    provenance = {
        "seed": cfg.master_seed,
        "code_version": _code_version(),
        "numba": USE_NUMBA,
        "wall_time_s": time.perf_counter() - t0,
        "ppt_exact": cfg.m * cfg.n <= PPT_EXACT_MAX_DIM,
    }
    return ExperimentReport(cfg, records, provenance)
