"""Pandemic case ingestion and geospatial risk field.

Case counts per region are differenced over a trailing window to get active
cases, max-normalized into [0,1] intensities, and draped over the map as
circular zones. Risk at a point is the worst (max) intensity among covering
zones; a point is no-go when that risk meets the threshold.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, timedelta

from .errors import DateOutOfRange, IoError, MonotonicityError, OutOfRange, ParseError

EARTH_RADIUS_KM = 6371.0088

BANDS = ("blue", "green", "yellow", "orange", "red")

DEFAULT_WINDOW_DAYS = 14
DEFAULT_ZONE_RADIUS_KM = 25.0
DEFAULT_NO_GO_THRESHOLD = 0.75


@dataclass(frozen=True)
class CaseRecord:
    region_id: str
    name: str
    lat: float
    lon: float
    date: date
    cumulative_cases: int


@dataclass(frozen=True)
class CaseSeries:
    records: tuple[CaseRecord, ...]

    def date_range(self) -> tuple[date, date] | None:
        if not self.records:
            return None
        dates = [r.date for r in self.records]
        return min(dates), max(dates)


@dataclass(frozen=True)
class RiskZone:
    zone_id: str
    name: str
    lat: float
    lon: float
    radius_km: float
    intensity: float
    active_cases: int


@dataclass(frozen=True)
class RiskField:
    date: date
    zones: tuple[RiskZone, ...]


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


_HEADER = ["region_id", "name", "lat", "lon", "date", "cumulative_cases"]


def ingest_cases(path) -> CaseSeries:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0] != _HEADER:
        raise ParseError(f"{path}: expected header {','.join(_HEADER)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 6:
            raise ParseError(f"{path}:{lineno}: expected 6 fields, got {len(row)}")
        try:
            records.append(
                CaseRecord(
                    region_id=row[0],
                    name=row[1],
                    lat=float(row[2]),
                    lon=float(row[3]),
                    date=date.fromisoformat(row[4]),
                    cumulative_cases=int(row[5]),
                )
            )
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if records[-1].cumulative_cases < 0:
            raise ParseError(f"{path}:{lineno}: negative case count")
    records.sort(key=lambda r: (r.region_id, r.date))
    for prev, cur in zip(records, records[1:]):
        if prev.region_id == cur.region_id and cur.cumulative_cases < prev.cumulative_cases:
            raise MonotonicityError(
                f"region {cur.region_id}: cases fall from "
                f"{prev.cumulative_cases} to {cur.cumulative_cases} on {cur.date}"
            )
    return CaseSeries(records=tuple(records))


def merge_cases(series: CaseSeries, extra: CaseSeries) -> CaseSeries:
    records = sorted(
        set(series.records) | set(extra.records), key=lambda r: (r.region_id, r.date)
    )
    for prev, cur in zip(records, records[1:]):
        if prev.region_id == cur.region_id and cur.cumulative_cases < prev.cumulative_cases:
            raise MonotonicityError(f"region {cur.region_id}: non-monotone after merge")
    return CaseSeries(records=tuple(records))


def _cumulative_at(records: list[CaseRecord], day: date) -> int:
    """Latest cumulative count on or before `day`; 0 before the first record."""
    best = 0
    for r in records:
        if r.date <= day:
            best = r.cumulative_cases
        else:
            break
    return best


def build_risk_field(
    cases: CaseSeries,
    on: date,
    window_days: int = DEFAULT_WINDOW_DAYS,
    radius_km: float = DEFAULT_ZONE_RADIUS_KM,
) -> RiskField:
    if window_days <= 0:
        raise OutOfRange("window_days must be positive")
    span = cases.date_range()
    if span is None or not (span[0] <= on <= span[1]):
        raise DateOutOfRange(f"{on} outside case series range {span}")
    by_region: dict[str, list[CaseRecord]] = {}
    for r in cases.records:
        by_region.setdefault(r.region_id, []).append(r)
    active: dict[str, int] = {}
    for region_id, records in by_region.items():
        now = _cumulative_at(records, on)
        then = _cumulative_at(records, on - timedelta(days=window_days))
        active[region_id] = max(0, now - then)
    peak = max(active.values(), default=0)
    zones = []
    for region_id in sorted(by_region):
        records = by_region[region_id]
        zones.append(
            RiskZone(
                zone_id=region_id,
                name=records[-1].name,
                lat=records[-1].lat,
                lon=records[-1].lon,
                radius_km=radius_km,
                intensity=active[region_id] / peak if peak > 0 else 0.0,
                active_cases=active[region_id],
            )
        )
    return RiskField(date=on, zones=tuple(zones))


def point_risk(field: RiskField, lat: float, lon: float) -> float:
    risk = 0.0
    for z in field.zones:
        if haversine_km(lat, lon, z.lat, z.lon) <= z.radius_km:
            risk = max(risk, z.intensity)
    return risk


def classify_band(intensity: float) -> str:
    if not 0.0 <= intensity <= 1.0:
        raise OutOfRange(f"intensity {intensity} outside [0,1]")
    return BANDS[min(int(intensity * 5), 4)]


def is_no_go(
    field: RiskField, lat: float, lon: float, threshold: float = DEFAULT_NO_GO_THRESHOLD
) -> bool:
    if not 0.0 < threshold <= 1.0:
        raise OutOfRange(f"threshold {threshold} outside (0,1]")
    return point_risk(field, lat, lon) >= threshold


def convert_jhu(in_path, out_path) -> int:
    """Convert a JHU daily-report CSV into the canonical case CSV.

    Maps Admin2/Province_State/Lat/Long_/Confirmed columns; the report date
    is taken from the Last_Update column's date part. Returns rows written.
    """
    try:
        with open(in_path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            fields = reader.fieldnames or []
    except OSError as exc:
        raise IoError(f"cannot read {in_path}: {exc}") from exc
    needed = {"Admin2", "Province_State", "Lat", "Long_", "Confirmed", "Last_Update"}
    if not needed.issubset(fields):
        raise ParseError(f"{in_path}: missing JHU columns {sorted(needed - set(fields))}")
    out_rows = []
    for i, row in enumerate(rows, start=2):
        try:
            day = str(row["Last_Update"]).split()[0].split("T")[0]
            out_rows.append(
                [
                    f"{row['Province_State']}/{row['Admin2']}",
                    row["Admin2"] or row["Province_State"],
                    float(row["Lat"]),
                    float(row["Long_"]),
                    date.fromisoformat(day).isoformat(),
                    int(float(row["Confirmed"])),
                ]
            )
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{in_path}:{i}: {exc}") from exc
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_HEADER)
        writer.writerows(out_rows)
    return len(out_rows)
