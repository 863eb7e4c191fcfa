"""Uniform samplers over the families and empirical-vs-exact comparisons.

Sampling is sharded: shard ``k`` of a run with master seed ``s`` draws from
``Philox(SeedSequence(s, spawn_key=(k,)))`` and holds at most
``SHARD_SIZE`` samples.  The shard layout depends only on the sample count,
so histograms are bit-identical for any number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.stats import chi2

from .distributions import DiscretePMF
from .errors import IncompatibleStatistic, UnsupportedRange
from .families import FamilyDescriptor, family_pmf, polynomial
from .groups import SignedPermutation, batch_statistic, check_rank

__all__ = [
    "EmpiricalHistogram",
    "ComparisonRecord",
    "GENERATOR",
    "sample_element",
    "sample_group",
    "sample_statistic",
    "simulate",
    "empirical_vs_exact",
    "pooled_chi2",
    "histogram_to_csv",
]

SHARD_SIZE = 1 << 16
GENERATOR = f"numpy.random.Philox (numpy {np.__version__})"
SAMPLEABLE = {"coxeter-inv", "coxeter-desc", "altdesc", "gaussian", "dpp", "cobin"}


def _rng(seed: int, shard: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(shard,))))


def _shuffle_rows(x: np.ndarray, rng: np.random.Generator) -> None:
    # Fisher-Yates on every row at once
    rows, n = x.shape
    idx = np.arange(rows)
    for i in range(n - 1, 0, -1):
        j = rng.integers(0, i + 1, size=rows)
        tmp = x[idx, i].copy()
        x[idx, i] = x[idx, j]
        x[idx, j] = tmp


def sample_group(kind: str, N: int, count: int, rng: np.random.Generator, validate: bool = False) -> np.ndarray:
    """``count`` uniform elements of the type-``kind`` group of rank ``N``, one per row."""
    check_rank(kind, N)
    size = N + 1 if kind == "A" else N
    x = np.tile(np.arange(1, size + 1, dtype=np.int32), (count, 1))
    _shuffle_rows(x, rng)
    if kind == "A":
        return x
    signs = 1 - 2 * rng.integers(0, 2, size=(count, N), dtype=np.int32)
    if kind == "D":
        # flipping one sign maps odd sign vectors onto even ones bijectively
        odd = (signs < 0).sum(axis=1) % 2 == 1
        signs[odd, 0] *= -1
    x *= signs
    if validate and kind == "D" and ((x < 0).sum(axis=1) % 2).any():
        raise AssertionError("type D sample with an odd number of negative entries")
    return x


def sample_element(kind: str, N: int, seed: int) -> SignedPermutation:
    """One uniform element; type ``A`` of rank ``N`` permutes ``N + 1`` letters."""
    row = sample_group(kind, N, 1, _rng(seed))[0]
    return SignedPermutation(tuple(int(v) for v in row), kind)


def _support(family: FamilyDescriptor) -> int:
    return polynomial(family).degree


def sample_statistic(family: FamilyDescriptor, count: int, rng: np.random.Generator, validate: bool = False) -> np.ndarray:
    """``count`` independent draws of the family statistic."""
    k = family.kind
    if k in ("coxeter-inv", "coxeter-desc"):
        x = sample_group(family.type, family.N, count, rng, validate)
        stat = "inversions" if k == "coxeter-inv" else "descents"
        return batch_statistic(x, stat, family.type)
    if k == "altdesc":
        if family.N == 1:
            return np.zeros(count, dtype=np.int64)
        x = sample_group("A", family.N - 1, count, rng)
        return batch_statistic(x, "alternating_descents", "A")
    if k == "gaussian":
        # inversions of a uniform word with ell ones and N zeros
        N, ell = family.N, family.ell
        w = np.tile(np.r_[np.ones(ell, dtype=np.int32), np.zeros(N, dtype=np.int32)], (count, 1))
        _shuffle_rows(w, rng)
        zeros_after = np.cumsum(w[:, ::-1] == 0, axis=1)[:, ::-1]
        return (zeros_after * w).sum(axis=1).astype(np.int64)
    if k == "dpp":
        # sum_j j * U_j with U_j uniform on {0, ..., j-1}
        total = np.zeros(count, dtype=np.int64)
        for j in range(2, family.N + 1):
            total += j * rng.integers(0, j, size=count)
        return total
    if k == "cobin":
        p = float(family.p)
        out = np.empty(0, dtype=np.int64)
        while len(out) < count:
            y = rng.binomial(family.N, p, size=count)
            out = np.concatenate([out, y[y < family.N]])
        return out[:count]
    raise UnsupportedRange(f"no sampler for {family.kind}")


@dataclass(frozen=True)
class EmpiricalHistogram:
    counts: np.ndarray
    sample_count: int
    seed: int
    generator: str = GENERATOR

    def __post_init__(self):
        if int(self.counts.sum()) != self.sample_count:
            raise ValueError("counts must sum to sample_count")

    def frequencies(self) -> np.ndarray:
        return self.counts / self.sample_count


def _shard(family: FamilyDescriptor, seed: int, length: int, validate: bool, job: tuple[int, int]) -> np.ndarray:
    shard, count = job
    vals = sample_statistic(family, count, _rng(seed, shard), validate)
    return np.bincount(vals, minlength=length)


def simulate(family: FamilyDescriptor, samples: int, seed: int = 0, jobs: int = 1, validate: bool = False) -> EmpiricalHistogram:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if family.kind not in SAMPLEABLE:
        raise UnsupportedRange(f"no sampler for {family.kind}")
    length = _support(family) + 1
    shards = [(k, min(SHARD_SIZE, samples - k * SHARD_SIZE)) for k in range(math.ceil(samples / SHARD_SIZE))]
    fn = partial(_shard, family, seed, length, validate)
    if jobs > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(fn, shards))
    else:
        parts = [fn(s) for s in shards]
    counts = np.sum(parts, axis=0).astype(np.int64)
    return EmpiricalHistogram(counts, samples, seed)


def pooled_chi2(counts: np.ndarray, probs: np.ndarray, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Pearson statistic with adjacent cells pooled until each expects at
    least ``min_expected`` draws.  Returns ``(statistic, dof, p_value)``."""
    n = counts.sum()
    pooled_obs, pooled_exp = [], []
    o = e = 0.0
    for c, p in zip(counts, probs):
        o += c
        e += n * p
        if e >= min_expected:
            pooled_obs.append(o)
            pooled_exp.append(e)
            o = e = 0.0
    if e > 0 or o > 0:
        if pooled_exp:
            pooled_obs[-1] += o
            pooled_exp[-1] += e
        else:
            pooled_obs.append(o)
            pooled_exp.append(e)
    obs = np.array(pooled_obs)
    exp = np.array(pooled_exp)
    if (exp == 0).any():
        return math.inf, len(obs) - 1, 0.0
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(obs) - 1
    if dof < 1:
        return stat, dof, 1.0
    return stat, dof, float(chi2.sf(stat, dof))


@dataclass(frozen=True)
class ComparisonRecord:
    tv_distance: float
    chi2_statistic: float
    chi2_dof: int
    chi2_p: float
    histogram: EmpiricalHistogram

    def to_dict(self) -> dict:
        return {
            "tv_distance": self.tv_distance,
            "chi2_statistic": self.chi2_statistic,
            "chi2_dof": self.chi2_dof,
            "chi2_p": self.chi2_p,
            "sample_count": self.histogram.sample_count,
            "seed": self.histogram.seed,
            "generator": self.histogram.generator,
        }


def _exact_probs(family: FamilyDescriptor) -> np.ndarray:
    pmf = family_pmf(family, "auto")
    if isinstance(pmf, DiscretePMF):
        return pmf.to_float()
    return np.asarray(pmf.probs, dtype=float)


def empirical_vs_exact(family: FamilyDescriptor, samples: int, seed: int = 0, jobs: int = 1, validate: bool = False) -> ComparisonRecord:
    hist = simulate(family, samples, seed, jobs, validate)
    probs = _exact_probs(family)
    if len(probs) != len(hist.counts):
        raise IncompatibleStatistic("sampled support does not match the exact law")
    tv = 0.5 * float(np.abs(hist.frequencies() - probs).sum())
    stat, dof, p = pooled_chi2(hist.counts, probs)
    return ComparisonRecord(tv, stat, dof, p, hist)


def histogram_to_csv(hist: EmpiricalHistogram, probs: np.ndarray, stream=None) -> str:
    """Columns ``value,count,exact_probability,normal_density``.

    ``normal_density`` is ``phi((k - mu) / sigma) / sigma``, the normal
    density on the scale of the statistic, comparable with the point masses.
    """
    probs = np.asarray(probs, dtype=float)
    k = np.arange(len(probs))
    mu = float(np.dot(k, probs))
    sigma = math.sqrt(float(np.dot((k - mu) ** 2, probs)))
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "count", "exact_probability", "normal_density"])
    for v in k:
        if sigma > 0:
            dens = math.exp(-0.5 * ((v - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
        else:
            dens = float(v == mu)
        w.writerow([int(v), int(hist.counts[v]), repr(float(probs[v])), repr(dens)])
    return buf.getvalue() if stream is None else ""
