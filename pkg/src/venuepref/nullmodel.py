"""Randomization null model, acceptance range, and significance verdicts.

Two randomizations are supported: a generative model that redraws every
check-in in the scope (gender, venue, user all sampled independently with
replacement), and a gender shuffle that permutes only the gender column.
Each replicate recomputes the cross-gender difference; the acceptance range
is the central empirical quantile interval of the resulting distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .models import CheckInRecord, DataError, Gender, RegionSelector
from .popularity import (
    AnalysisMode,
    AnalysisUnit,
    SQRT2,
    scope_records,
    unit_keys,
)

_MAX_REDRAWS = 100


class NullMethod(str, Enum):
    GENERATIVE = "generative"
    GENDER_SHUFFLE = "gender_shuffle"


@dataclass
class NullModelConfig:
    k: int = 100
    confidence: float = 0.99
    method: NullMethod = NullMethod.GENERATIVE
    rng_seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if not (0.0 < self.confidence < 1.0):
            raise ValueError("confidence must be in (0, 1)")
        self.method = NullMethod(self.method)


class Direction(str, Enum):
    MALE = "male"
    FEMALE = "female"
    NONE = "none"


@dataclass
class NullModelResult:
    unit: AnalysisUnit
    observed_d: float
    null_distribution: np.ndarray
    delta_min: float
    delta_max: float
    significant: bool
    direction: Direction

    def as_dict(self) -> dict:
        return {
            "unit_key": self.unit.key,
            "mode": self.unit.mode.value,
            "scope": self.unit.scope.name,
            "scope_subcategory": self.unit.scope_subcategory,
            "observed_d": self.observed_d,
            "delta_min": self.delta_min,
            "delta_max": self.delta_max,
            "significant": self.significant,
            "direction": self.direction.value,
        }


class _ScopeIndex:
    """Integer-coded view of a scope: unit membership per record and per venue."""

    def __init__(self, scoped: list[CheckInRecord], mode: AnalysisMode):
        if not scoped:
            raise DataError("empty scope")
        self.mode = mode
        self.c = len(scoped)
        self.genders = np.array(
            [1 if r.gender is Gender.MALE else 0 for r in scoped], dtype=np.int8)
        self.male_total = int(self.genders.sum())
        self.female_total = self.c - self.male_total
        if self.male_total == 0 or self.female_total == 0:
            raise DataError("scope lacks check-ins for one gender; "
                            "null model undefined")
        self.users = sorted({r.user_id for r in scoped})

        venue_ids = sorted({r.venue_id for r in scoped})
        venue_pos = {v: i for i, v in enumerate(venue_ids)}
        venue_subcat = {}
        for r in scoped:
            venue_subcat[r.venue_id] = r.subcategory
        self.n_venues = len(venue_ids)

        if mode is AnalysisMode.SUBCATEGORY:
            self.keys = sorted({r.subcategory for r in scoped})
            key_pos = {s: i for i, s in enumerate(self.keys)}
            self.venue_unit = np.array(
                [key_pos[venue_subcat[v]] for v in venue_ids], dtype=np.int64)
        else:
            self.keys = venue_ids
            self.venue_unit = np.arange(self.n_venues, dtype=np.int64)
        self.n_units = len(self.keys)
        self.record_unit = np.array(
            [self.venue_unit[venue_pos[r.venue_id]] for r in scoped],
            dtype=np.int64)

    def observed_d(self) -> np.ndarray:
        male = np.bincount(self.record_unit[self.genders == 1],
                           minlength=self.n_units)
        female = np.bincount(self.record_unit[self.genders == 0],
                             minlength=self.n_units)
        return (male / self.male_total - female / self.female_total) / SQRT2


def _replicate_generative(index: _ScopeIndex, rng: np.random.Generator) -> np.ndarray:
    c = index.c
    for _ in range(_MAX_REDRAWS):
        genders = rng.integers(0, 2, size=c)
        venues = rng.integers(0, index.n_venues, size=c)
        rng.integers(0, len(index.users), size=c)  # user draw per protocol; d ignores it
        male_total = int(genders.sum())
        female_total = c - male_total
        if male_total == 0 or female_total == 0:
            continue
        units = index.venue_unit[venues]
        male = np.bincount(units[genders == 1], minlength=index.n_units)
        female = np.bincount(units[genders == 0], minlength=index.n_units)
        return (male / male_total - female / female_total) / SQRT2
    raise DataError(f"replicate produced a single-gender sample "
                    f"{_MAX_REDRAWS} times in a row (scope too small)")


def _replicate_shuffle(index: _ScopeIndex, rng: np.random.Generator) -> np.ndarray:
    genders = rng.permutation(index.genders)
    male = np.bincount(index.record_unit[genders == 1], minlength=index.n_units)
    female = np.bincount(index.record_unit[genders == 0], minlength=index.n_units)
    return (male / index.male_total - female / index.female_total) / SQRT2


def _null_matrix(index: _ScopeIndex, config: NullModelConfig) -> np.ndarray:
    """k x n_units matrix of replicate differences. Replicate i draws from
    its own rng seeded by (rng_seed, i) so results do not depend on
    execution order."""
    rows = np.empty((config.k, index.n_units))
    for i in range(config.k):
        rng = np.random.default_rng([config.rng_seed, i])
        if config.method is NullMethod.GENERATIVE:
            rows[i] = _replicate_generative(index, rng)
        else:
            rows[i] = _replicate_shuffle(index, rng)
    return rows


def _verdict(unit: AnalysisUnit, observed: float, null: np.ndarray,
             confidence: float) -> NullModelResult:
    alpha = 1.0 - confidence
    # Weibull positions (n+1)q with linear interpolation: at q = 0.005 and
    # k = 100 the range spans the sample extremes, matching min/max usage.
    delta_min, delta_max = np.quantile(null, [alpha / 2, 1.0 - alpha / 2],
                                       method="weibull")
    significant = observed < delta_min or observed > delta_max
    if not significant:
        direction = Direction.NONE
    elif observed > delta_max:
        direction = Direction.MALE
    else:
        direction = Direction.FEMALE
    return NullModelResult(
        unit=unit,
        observed_d=float(observed),
        null_distribution=null.copy(),
        delta_min=float(delta_min),
        delta_max=float(delta_max),
        significant=bool(significant),
        direction=direction,
    )


def run_null_model_batch(records: list[CheckInRecord], mode: AnalysisMode,
                         scope: RegionSelector, config: NullModelConfig,
                         scope_subcategory: Optional[str] = None
                         ) -> list[NullModelResult]:
    """Null-model verdicts for every unit of a scope; the k replicates are
    drawn once and scored against all units."""
    scoped = scope_records(records, scope, scope_subcategory)
    if not scoped:
        raise DataError(f"scope {scope.name!r} matches zero records")
    index = _ScopeIndex(scoped, mode)
    observed = index.observed_d()
    null = _null_matrix(index, config)
    results = []
    for j, key in enumerate(index.keys):
        unit = AnalysisUnit(mode=mode, key=key, scope=scope,
                            scope_subcategory=scope_subcategory)
        results.append(_verdict(unit, observed[j], null[:, j],
                                config.confidence))
    return results


def run_null_model(records: list[CheckInRecord], unit: AnalysisUnit,
                   config: NullModelConfig) -> NullModelResult:
    """Null-model verdict for a single analysis unit."""
    scoped = scope_records(records, unit.scope, unit.scope_subcategory)
    if not scoped:
        raise DataError(f"scope {unit.scope.name!r} matches zero records")
    index = _ScopeIndex(scoped, unit.mode)
    try:
        j = index.keys.index(unit.key)
    except ValueError:
        raise DataError(f"unit {unit.key!r} not present in scope "
                        f"{unit.scope.name!r}") from None
    observed = index.observed_d()[j]
    null = _null_matrix(index, config)[:, j]
    return _verdict(unit, observed, null, config.confidence)


def write_null_distribution_csv(results: list[NullModelResult], sink) -> None:
    import csv

    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["unit_key", "replicate", "d"])
    for res in results:
        for i, value in enumerate(res.null_distribution):
            writer.writerow([res.unit.key, i, f"{value:.10g}"])
