"""County outage time series, storm-event flags, and the daily risk proxy.

The risk for a county on a day is the sum of its hourly customer-outage
fractions, counted toward a hazard only when the storm calendar flags that
(day, county) with the hazard.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DataRangeError, DuplicateIdError, SchemaError

OUTAGE_HEADER = ["day", "hour", "fips", "fraction_out"]
STORM_HEADER = ["day", "fips", "hazard"]
RISK_HEADER = ["hazard", "day", "fips", "rho"]


class HazardType(enum.Enum):
    WILDFIRE = "wildfire"
    HURRICANE = "hurricane"
    WIND = "wind"

    @property
    def order(self) -> int:
        return _HAZARD_ORDER[self]

    @classmethod
    def parse(cls, label: str) -> "HazardType":
        try:
            return cls(label.strip().lower())
        except ValueError:
            raise SchemaError(f"unknown hazard label {label!r}") from None


_HAZARD_ORDER = {h: i for i, h in enumerate(HazardType)}


def hazard_sort_key(h: HazardType) -> int:
    return h.order


@dataclass(frozen=True)
class OutageRecord:
    day: int
    hour: int
    fips: str
    fraction_out: float


@dataclass(frozen=True)
class HazardCalendar:
    flags: frozenset[tuple[int, str, HazardType]]

    def __len__(self) -> int:
        return len(self.flags)

    def restricted_to(self, hazards: Iterable[HazardType]) -> "HazardCalendar":
        keep = set(hazards)
        return HazardCalendar(frozenset(f for f in self.flags if f[2] in keep))


@dataclass(frozen=True)
class RiskTable:
    """rho by (hazard, day) then fips. Missing entries mean zero risk."""

    entries: dict[tuple[HazardType, int], dict[str, float]]

    def slice(self, hazard: HazardType, day: int) -> Mapping[str, float]:
        return self.entries.get((hazard, day), {})

    def get(self, hazard: HazardType, day: int, fips: str) -> float:
        return self.slice(hazard, day).get(fips, 0.0)

    def rows(self) -> list[tuple[HazardType, int, str, float]]:
        return [
            (h, d, fips, rho)
            for (h, d), by_county in self.entries.items()
            for fips, rho in by_county.items()
        ]


def _reader(text: str, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    rows = csv.reader(io.StringIO(text))
    first = next(rows, None)
    if first is None:
        raise SchemaError(f"empty file; expected header {','.join(header)}")
    if [c.strip() for c in first] != header:
        raise SchemaError(f"bad header {first!r}; expected {','.join(header)}", locator="row 1")
    for n, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} fields, got {len(row)}", locator=f"row {n}")
        yield n, [c.strip() for c in row]


def _int(value: str, name: str, lo: int, hi: int, row: int) -> int:
    try:
        out = int(value)
    except ValueError:
        raise SchemaError(f"{name} {value!r} is not an integer", locator=f"row {row}") from None
    if not lo <= out <= hi:
        raise DataRangeError(f"{name} {out} outside {lo}..{hi}", locator=f"row {row}")
    return out


def parse_outage_records(text: str) -> list[OutageRecord]:
    """Parse ``day,hour,fips,fraction_out`` rows. Fractions are validated, never clamped."""
    records = []
    seen: set[tuple[int, int, str]] = set()
    for n, (day_s, hour_s, fips, frac_s) in _reader(text, OUTAGE_HEADER):
        day = _int(day_s, "day", 1, 365, n)
        hour = _int(hour_s, "hour", 0, 23, n)
        if not fips:
            raise SchemaError("empty fips", locator=f"row {n}")
        try:
            frac = float(frac_s)
        except ValueError:
            raise SchemaError(f"fraction_out {frac_s!r} is not a number", locator=f"row {n}") from None
        if not 0.0 <= frac <= 1.0:
            raise DataRangeError(f"fraction_out {frac_s} outside [0, 1]", locator=f"row {n}", entity=fips)
        key = (day, hour, fips)
        if key in seen:
            raise DuplicateIdError(f"duplicate (day, hour, fips) {key}", locator=f"row {n}", entity=fips)
        seen.add(key)
        records.append(OutageRecord(day, hour, fips, frac))
    return records


def parse_storm_events(text: str) -> HazardCalendar:
    flags = set()
    for n, (day_s, fips, label) in _reader(text, STORM_HEADER):
        day = _int(day_s, "day", 1, 365, n)
        if not fips:
            raise SchemaError("empty fips", locator=f"row {n}")
        try:
            hazard = HazardType.parse(label)
        except SchemaError as exc:
            raise SchemaError(exc.message, locator=f"row {n}") from None
        flags.add((day, fips, hazard))
    return HazardCalendar(frozenset(flags))


def compute_risk_table(outages: Iterable[OutageRecord], calendar: HazardCalendar) -> RiskTable:
    hourly: dict[tuple[int, str], list[tuple[int, float]]] = defaultdict(list)
    for rec in outages:
        hourly[(rec.day, rec.fips)].append((rec.hour, rec.fraction_out))

    entries: dict[tuple[HazardType, int], dict[str, float]] = defaultdict(dict)
    for day, fips, hazard in calendar.flags:
        hours = hourly.get((day, fips))
        if hours:
            entries[(hazard, day)][fips] = math.fsum(f for _, f in sorted(hours))

    ordered = {}
    for key in sorted(entries, key=lambda k: (k[0].order, k[1])):
        by_county = entries[key]
        ordered[key] = {f: by_county[f] for f in sorted(by_county)}
    return RiskTable(ordered)


def risk_table_to_csv(table: RiskTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RISK_HEADER)
    for hazard, day, fips, rho in table.rows():
        writer.writerow([hazard.value, day, fips, repr(rho)])
    return buf.getvalue()
