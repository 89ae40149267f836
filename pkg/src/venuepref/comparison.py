"""Rank comparison of preference vectors against scalar country indices.

For an anchor region, all other regions are ranked twice: by euclidean
distance of the scalar index values and by cosine distance of the
preference vectors. Agreement between the two rankings is measured with
Spearman's rho (tie-averaged ranks, two-sided t-approximation p-value),
and judged against a random-permutation baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .models import DataError, IndexTable
from .preference import PreferenceVector


@dataclass
class RankComparison:
    anchor_region: str
    index_name: str
    d1: dict[str, float]  # region -> |index difference| to anchor
    d2: dict[str, float]  # region -> cosine distance to anchor's vector
    rho: float
    p_value: float
    n: int


@dataclass
class RandomBaseline:
    n_permutations: int
    rho_samples: np.ndarray
    ci_low: float
    ci_high: float
    seed: int


def spearman(a, b) -> tuple[float, float]:
    """Spearman rank correlation with average-rank ties and a two-sided
    p-value from the t-approximation with n-2 degrees of freedom."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be 1-d and of equal length")
    n = a.size
    if n < 3:
        raise DataError(f"spearman needs n >= 3, got {n}")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise DataError("spearman undefined for a constant input list")
    ra = stats.rankdata(a, method="average")
    rb = stats.rankdata(b, method="average")
    rho = float(np.corrcoef(ra, rb)[0, 1])
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0 - 1e-12:
        return (1.0 if rho > 0 else -1.0), 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * stats.t.sf(abs(t), df=n - 2))
    return rho, min(p, 1.0)


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DataError("cosine distance undefined for a zero vector")
    return float(1.0 - np.dot(u, v) / (nu * nv))


def _check_regions(vectors: dict[str, PreferenceVector], index: IndexTable,
                   anchor: str) -> list[str]:
    if anchor not in vectors:
        raise DataError(f"anchor {anchor!r} has no preference vector")
    if anchor not in index.entries:
        raise DataError(f"anchor {anchor!r} missing from index "
                        f"{index.index_name!r}")
    missing = sorted(set(vectors) - set(index.entries))
    if missing:
        raise DataError(f"regions missing from index {index.index_name!r}: "
                        f"{missing}")
    if len(vectors) < 4:
        raise DataError(f"need at least 4 regions, got {len(vectors)}")
    return sorted(r for r in vectors if r != anchor)


def _distances(vectors: dict[str, PreferenceVector], values: dict[str, float],
               anchor: str, others: list[str]
               ) -> tuple[dict[str, float], dict[str, float]]:
    anchor_vec = vectors[anchor].values
    d1 = {r: abs(values[anchor] - values[r]) for r in others}
    d2 = {r: cosine_distance(anchor_vec, vectors[r].values) for r in others}
    return d1, d2


def compare_with_index(vectors: dict[str, PreferenceVector], index: IndexTable,
                       anchor: str) -> RankComparison:
    """Spearman agreement between index-distance and vector-distance
    rankings around one anchor region (anchor excluded from the ranks)."""
    others = _check_regions(vectors, index, anchor)
    d1, d2 = _distances(vectors, index.entries, anchor, others)
    rho, p = spearman([d1[r] for r in others], [d2[r] for r in others])
    return RankComparison(anchor_region=anchor, index_name=index.index_name,
                          d1=d1, d2=d2, rho=rho, p_value=p, n=len(others))


def random_baseline(vectors: dict[str, PreferenceVector], index: IndexTable,
                    anchor: str, n_permutations: int = 100,
                    seed: int = 0) -> RandomBaseline:
    """Permutation baseline: shuffle the index's value assignment across
    regions and recompute rho against the fixed vector-distance ranking.
    The 99% CI is mean +- 2.576 standard errors of the rho samples."""
    if n_permutations < 2:
        raise DataError("random baseline needs n_permutations >= 2")
    others = _check_regions(vectors, index, anchor)
    regions = sorted(vectors)
    base_values = np.array([index.entries[r] for r in regions])
    _, d2 = _distances(vectors, index.entries, anchor, others)
    d2_list = [d2[r] for r in others]
    rng = np.random.default_rng(seed)
    samples = np.empty(n_permutations)
    for i in range(n_permutations):
        shuffled = dict(zip(regions, rng.permutation(base_values)))
        d1 = {r: abs(shuffled[anchor] - shuffled[r]) for r in others}
        rho, _ = spearman([d1[r] for r in others], d2_list)
        samples[i] = rho
    mean = samples.mean()
    stderr = samples.std(ddof=1) / np.sqrt(n_permutations)
    return RandomBaseline(n_permutations=n_permutations, rho_samples=samples,
                          ci_low=float(mean - 2.576 * stderr),
                          ci_high=float(mean + 2.576 * stderr), seed=seed)


def write_comparison_csv(rows: list[tuple[RankComparison, RandomBaseline]],
                         sink) -> None:
    import csv

    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["country", "index", "rho", "p_value",
                     "baseline_ci_low", "baseline_ci_high", "n"])
    for comp, base in rows:
        writer.writerow([comp.anchor_region, comp.index_name,
                         f"{comp.rho:.6g}", f"{comp.p_value:.6g}",
                         f"{base.ci_low:.6g}", f"{base.ci_high:.6g}", comp.n])
