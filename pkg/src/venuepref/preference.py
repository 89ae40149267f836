"""Gini coefficient of venue-level differences and regional preference vectors.

Each region is summarized by a vector with one dimension per subcategory in
a fixed global ordering; the value is the Gini coefficient of the absolute
venue-level cross-gender differences within that subcategory (0 when the
subcategory is absent from the region).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .models import CheckInRecord, DataError, Gender, RegionSelector
from .popularity import AnalysisMode, AnalysisUnit, popularity, scope_records, unit_keys


@dataclass
class PreferenceVector:
    region: RegionSelector
    dims: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.dims) != self.values.size:
            raise ValueError("dims and values must have the same length")


def gini(x) -> float:
    """Gini coefficient of non-negative values, via the discrete Lorenz
    formula g = (n+1)/n - 2*sum((n+1-i)*x_i) / (n*sum(x)) with x ascending.

    An all-zero input is perfect equality; it returns 0 with a warning
    (the sum in the denominator would vanish).
    """
    arr = np.sort(np.asarray(x, dtype=float))
    if arr.size == 0:
        raise ValueError("gini of an empty sequence is undefined")
    if np.any(arr < 0):
        raise ValueError("gini requires non-negative values")
    n = arr.size
    total = arr.sum()
    if total == 0:
        warnings.warn("gini of all-zero values: returning 0 (perfect equality)",
                      stacklevel=2)
        return 0.0
    weights = np.arange(n, 0, -1)  # n+1-i for i = 1..n
    return float((n + 1) / n - 2.0 * np.dot(weights, arr) / (n * total))


def region_subcategories(records: list[CheckInRecord],
                         region: RegionSelector) -> list[str]:
    return sorted({rec.subcategory for rec in records if region.matches(rec)})


def collect_global_dims(records: list[CheckInRecord],
                        regions: list[RegionSelector]) -> list[str]:
    """Lexicographic union of subcategories present in any of the regions."""
    dims: set[str] = set()
    for region in regions:
        dims.update(region_subcategories(records, region))
    return sorted(dims)


def build_preference_vector(records: list[CheckInRecord], region: RegionSelector,
                            global_dims: list[str]) -> PreferenceVector:
    """Gini-per-subcategory vector for one region, over the global dims.

    A subcategory whose scope lacks one gender entirely has undefined
    venue-level differences; it is treated as absent (value 0).
    """
    present = set(region_subcategories(records, region))
    values = np.zeros(len(global_dims))
    for i, subcat in enumerate(global_dims):
        if subcat not in present:
            continue
        scoped = scope_records(records, region, subcat)
        has_male = any(r.gender is Gender.MALE for r in scoped)
        has_female = any(r.gender is Gender.FEMALE for r in scoped)
        if not (has_male and has_female):
            continue
        diffs = []
        for venue_id in sorted({r.venue_id for r in scoped}):
            unit = AnalysisUnit(mode=AnalysisMode.VENUE_WITHIN_SUBCATEGORY,
                                key=venue_id, scope=region,
                                scope_subcategory=subcat)
            diffs.append(abs(popularity(records, unit).d))
        # all-zero differences are perfect equality; skip the gini warning
        values[i] = gini(diffs) if any(diffs) else 0.0
    return PreferenceVector(region=region, dims=list(global_dims), values=values)


def write_vectors_csv(vectors: list[PreferenceVector], sink) -> None:
    import csv

    if not vectors:
        raise ValueError("no vectors to write")
    dims = vectors[0].dims
    for vec in vectors:
        if vec.dims != dims:
            raise ValueError("vectors have mismatched dims")
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["region"] + dims)
    for vec in vectors:
        writer.writerow([vec.region.name] + [f"{v:.12g}" for v in vec.values])


def read_vectors_csv(source, granularity) -> dict[str, PreferenceVector]:
    import csv

    from .models import Granularity

    reader = csv.reader(source)
    header = next(reader, None)
    if not header or header[0] != "region":
        raise DataError("vectors csv must start with a 'region' header column")
    dims = header[1:]
    out: dict[str, PreferenceVector] = {}
    for row in reader:
        if not row:
            continue
        name = row[0]
        values = np.array([float(v) for v in row[1:]])
        region = RegionSelector(granularity=Granularity(granularity), name=name)
        out[name] = PreferenceVector(region=region, dims=dims, values=values)
    return out
