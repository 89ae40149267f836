"""Per-gender popularity and the signed cross-gender popularity difference.

The difference for a unit is the signed shortest euclidean distance from its
(male, female) popularity point to the equal-popularity diagonal:
d = (p_male - p_female) / sqrt(2). Negative values mean the unit is more
popular among female users.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .models import CheckInRecord, DataError, Gender, RegionSelector

SQRT2 = math.sqrt(2.0)


class AnalysisMode(str, Enum):
    SUBCATEGORY = "subcategory"
    VENUE = "venue"
    VENUE_WITHIN_SUBCATEGORY = "venue_within_subcategory"


@dataclass(frozen=True)
class AnalysisUnit:
    mode: AnalysisMode
    key: str
    scope: RegionSelector
    scope_subcategory: Optional[str] = None

    def __post_init__(self):
        if self.mode is AnalysisMode.VENUE_WITHIN_SUBCATEGORY:
            if not self.scope_subcategory:
                raise ValueError("venue_within_subcategory mode requires scope_subcategory")
        elif self.scope_subcategory is not None:
            raise ValueError(f"scope_subcategory only valid in "
                             f"venue_within_subcategory mode, not {self.mode.value}")


@dataclass(frozen=True)
class PopularityPoint:
    unit: AnalysisUnit
    p_male: float
    p_female: float
    d: float
    n_checkins: int


@dataclass(frozen=True)
class PopularityRow:
    """A table entry: the raw point plus visualization-only normalized pair."""
    point: PopularityPoint
    p_male_norm: float
    p_female_norm: float


def scope_records(records: list[CheckInRecord], scope: RegionSelector,
                  scope_subcategory: Optional[str] = None) -> list[CheckInRecord]:
    """The denominator population for a unit: the region, optionally
    narrowed to one subcategory."""
    out = [rec for rec in records if scope.matches(rec)]
    if scope_subcategory is not None:
        out = [rec for rec in out if rec.subcategory == scope_subcategory]
    return out


def _in_unit(rec: CheckInRecord, unit: AnalysisUnit) -> bool:
    if unit.mode is AnalysisMode.SUBCATEGORY:
        return rec.subcategory == unit.key
    return rec.venue_id == unit.key


def signed_difference(p_male: float, p_female: float) -> float:
    return (p_male - p_female) / SQRT2


def popularity_from_counts(unit: AnalysisUnit, male_in_unit: int, female_in_unit: int,
                           male_total: int, female_total: int) -> PopularityPoint:
    if male_total == 0 or female_total == 0:
        raise DataError(
            f"scope for unit {unit.key!r} lacks check-ins for one gender "
            f"(male={male_total}, female={female_total}); difference undefined"
        )
    p_male = male_in_unit / male_total
    p_female = female_in_unit / female_total
    return PopularityPoint(
        unit=unit,
        p_male=p_male,
        p_female=p_female,
        d=signed_difference(p_male, p_female),
        n_checkins=male_in_unit + female_in_unit,
    )


def popularity(records: list[CheckInRecord], unit: AnalysisUnit) -> PopularityPoint:
    """Popularity point of one analysis unit within its scope."""
    scoped = scope_records(records, unit.scope, unit.scope_subcategory)
    male_total = sum(1 for r in scoped if r.gender is Gender.MALE)
    female_total = len(scoped) - male_total
    male_in = 0
    female_in = 0
    for rec in scoped:
        if _in_unit(rec, unit):
            if rec.gender is Gender.MALE:
                male_in += 1
            else:
                female_in += 1
    if male_in + female_in == 0:
        raise DataError(f"unit {unit.key!r} has no check-ins in scope "
                        f"{unit.scope.name!r}")
    return popularity_from_counts(unit, male_in, female_in, male_total, female_total)


def unit_keys(records: list[CheckInRecord], mode: AnalysisMode,
              scope: RegionSelector,
              scope_subcategory: Optional[str] = None) -> list[str]:
    scoped = scope_records(records, scope, scope_subcategory)
    if mode is AnalysisMode.SUBCATEGORY:
        return sorted({rec.subcategory for rec in scoped})
    return sorted({rec.venue_id for rec in scoped})


def popularity_table(records: list[CheckInRecord], mode: AnalysisMode,
                     scope: RegionSelector,
                     scope_subcategory: Optional[str] = None) -> list[PopularityRow]:
    """One PopularityRow per qualifying unit, sorted by |d| descending
    (ties by key ascending). Normalization divides both axes by the joint
    maximum popularity over the table; it never feeds any statistic."""
    keys = unit_keys(records, mode, scope, scope_subcategory)
    if not keys:
        raise DataError(f"no analysis units of mode {mode.value!r} in scope "
                        f"{scope.name!r}")
    points = [
        popularity(records, AnalysisUnit(mode=mode, key=key, scope=scope,
                                         scope_subcategory=scope_subcategory))
        for key in keys
    ]
    points.sort(key=lambda p: (-abs(p.d), p.unit.key))
    p_max = max(max(p.p_male, p.p_female) for p in points)
    if p_max == 0:
        p_max = 1.0
    return [
        PopularityRow(point=p, p_male_norm=p.p_male / p_max,
                      p_female_norm=p.p_female / p_max)
        for p in points
    ]


def write_popularity_csv(rows: list[PopularityRow], sink) -> None:
    import csv

    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["unit_key", "mode", "p_male", "p_female",
                     "p_male_norm", "p_female_norm", "d_s", "n_checkins"])
    for row in rows:
        p = row.point
        writer.writerow([p.unit.key, p.unit.mode.value, f"{p.p_male:.10g}",
                         f"{p.p_female:.10g}", f"{row.p_male_norm:.10g}",
                         f"{row.p_female_norm:.10g}", f"{p.d:.10g}", p.n_checkins])
