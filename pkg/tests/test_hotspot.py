from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtrmt import hotspot
from rtrmt.errors import DateOutOfRange, MonotonicityError, OutOfRange, ParseError


def write_csv(path, rows):
    lines = ["region_id,name,lat,lon,date,cumulative_cases"]
    lines += [",".join(str(x) for x in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def three_region_csv(tmp_path):
    rows = []
    for rid, lat, lon, counts in [
        ("r1", 47.0, -120.0, [0, 10, 30]),
        ("r2", 47.5, -120.5, [5, 25, 85]),
        ("r3", 48.0, -121.0, [2, 2, 2]),
    ]:
        for day, c in zip(["2020-03-01", "2020-03-10", "2020-03-20"], counts):
            rows.append([rid, rid.upper(), lat, lon, day, c])
    return write_csv(tmp_path / "cases.csv", rows)


class TestIngest:
    def test_row_count(self, tmp_path):
        rows = [
            ["a", "A", 1, 2, "2020-03-01", 1],
            ["a", "A", 1, 2, "2020-03-02", 2],
            ["a", "A", 1, 2, "2020-03-03", 3],
            ["b", "B", 3, 4, "2020-03-01", 0],
            ["b", "B", 3, 4, "2020-03-02", 5],
            ["b", "B", 3, 4, "2020-03-03", 9],
        ]
        series = hotspot.ingest_cases(write_csv(tmp_path / "c.csv", rows))
        assert len(series.records) == 6

    def test_monotonicity_enforced(self, tmp_path):
        rows = [["a", "A", 1, 2, "2020-03-01", 10], ["a", "A", 1, 2, "2020-03-02", 8]]
        with pytest.raises(MonotonicityError):
            hotspot.ingest_cases(write_csv(tmp_path / "c.csv", rows))

    def test_header_only(self, tmp_path):
        series = hotspot.ingest_cases(write_csv(tmp_path / "c.csv", []))
        assert series.records == ()

    def test_bad_header(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("region,count\nx,1\n")
        with pytest.raises(ParseError):
            hotspot.ingest_cases(p)


class TestRiskField:
    def test_all_zero(self, tmp_path):
        rows = [["a", "A", 1, 2, "2020-03-01", 0], ["a", "A", 1, 2, "2020-03-20", 0]]
        series = hotspot.ingest_cases(write_csv(tmp_path / "c.csv", rows))
        field = hotspot.build_risk_field(series, date(2020, 3, 20))
        assert all(z.intensity == 0.0 for z in field.zones)

    def test_max_normalization(self, tmp_path):
        rows = [
            ["a", "A", 1, 2, "2020-03-01", 0], ["a", "A", 1, 2, "2020-03-20", 10],
            ["b", "B", 5, 6, "2020-03-01", 0], ["b", "B", 5, 6, "2020-03-20", 40],
        ]
        series = hotspot.ingest_cases(write_csv(tmp_path / "c.csv", rows))
        field = hotspot.build_risk_field(series, date(2020, 3, 20))
        by_id = {z.zone_id: z.intensity for z in field.zones}
        assert by_id == {"a": 0.25, "b": 1.0}

    def test_window_differencing(self, three_region_csv):
        series = hotspot.ingest_cases(three_region_csv)
        field = hotspot.build_risk_field(series, date(2020, 3, 20), window_days=14)
        # hand-computed: active = cum(03-20) - cum(03-06): r1=30-0, r2=85-5, r3=0
        by_id = {z.zone_id: (z.active_cases, z.intensity) for z in field.zones}
        assert by_id["r1"] == (30, pytest.approx(30 / 80))
        assert by_id["r2"] == (80, 1.0)
        assert by_id["r3"] == (0, 0.0)

    def test_date_out_of_range(self, three_region_csv):
        series = hotspot.ingest_cases(three_region_csv)
        with pytest.raises(DateOutOfRange):
            hotspot.build_risk_field(series, date(2021, 1, 1))


class TestPointRisk:
    def make_field(self, zones):
        return hotspot.RiskField(
            date=date(2020, 4, 1),
            zones=tuple(
                hotspot.RiskZone(
                    zone_id=f"z{i}", name=f"z{i}", lat=lat, lon=lon,
                    radius_km=radius, intensity=inten, active_cases=int(inten * 100),
                )
                for i, (lat, lon, radius, inten) in enumerate(zones)
            ),
        )

    def test_outside_all_zones(self):
        field = self.make_field([(47.0, -120.0, 10.0, 0.8)])
        assert hotspot.point_risk(field, 40.0, -100.0) == 0.0

    def test_inside_single_zone(self):
        field = self.make_field([(47.0, -120.0, 25.0, 0.6)])
        assert hotspot.point_risk(field, 47.05, -120.05) == 0.6

    def test_overlap_takes_max(self):
        field = self.make_field([(47.0, -120.0, 30.0, 0.3), (47.1, -120.0, 30.0, 0.9)])
        assert hotspot.point_risk(field, 47.05, -120.0) == 0.9

    def test_no_go_boundary(self):
        field = self.make_field([(47.0, -120.0, 25.0, 0.75)])
        assert hotspot.is_no_go(field, 47.0, -120.0, 0.75)
        field_low = self.make_field([(47.0, -120.0, 25.0, 0.74999)])
        assert not hotspot.is_no_go(field_low, 47.0, -120.0, 0.75)

    def test_zero_field_never_no_go(self):
        field = self.make_field([(47.0, -120.0, 25.0, 0.0)])
        for theta in (0.01, 0.5, 1.0):
            assert not hotspot.is_no_go(field, 47.0, -120.0, theta)


class TestBands:
    @pytest.mark.parametrize(
        "intensity,band",
        [(0.0, "blue"), (0.19, "blue"), (0.21, "green"), (0.5, "yellow"),
         (0.65, "orange"), (0.81, "red"), (1.0, "red")],
    )
    def test_band_mapping(self, intensity, band):
        assert hotspot.classify_band(intensity) == band

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            hotspot.classify_band(1.5)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        bands = list(hotspot.BANDS)
        assert bands.index(hotspot.classify_band(lo)) <= bands.index(hotspot.classify_band(hi))


@given(st.integers(1, 50), st.integers(0, 5000))
@settings(max_examples=30, deadline=None)
def test_scale_invariance(mult, seed):
    import random

    rng = random.Random(seed)
    rows = []
    for rid in ("a", "b", "c"):
        cum = 0
        for day in ("2020-03-01", "2020-03-10", "2020-03-20"):
            cum += rng.randrange(0, 50)
            rows.append((rid, rid, 47.0, -120.0, day, cum))
    base = hotspot.CaseSeries(
        records=tuple(
            hotspot.CaseRecord(r[0], r[1], r[2], r[3], date.fromisoformat(r[4]), r[5])
            for r in rows
        )
    )
    scaled = hotspot.CaseSeries(
        records=tuple(
            hotspot.CaseRecord(r[0], r[1], r[2], r[3], date.fromisoformat(r[4]), r[5] * mult)
            for r in rows
        )
    )
    f1 = hotspot.build_risk_field(base, date(2020, 3, 20))
    f2 = hotspot.build_risk_field(scaled, date(2020, 3, 20))
    for z1, z2 in zip(f1.zones, f2.zones):
        assert z1.intensity == pytest.approx(z2.intensity, abs=1e-12)
        assert hotspot.classify_band(z1.intensity) == hotspot.classify_band(z2.intensity)


def test_convert_jhu(tmp_path):
    src = tmp_path / "jhu.csv"
    src.write_text(
        "FIPS,Admin2,Province_State,Country_Region,Last_Update,Lat,Long_,Confirmed,Deaths\n"
        "53007,Chelan,Washington,US,2020-04-01 22:00:00,47.87,-120.62,50,1\n"
        "53025,Grant,Washington,US,2020-04-01 22:00:00,47.2,-119.45,30,0\n"
    )
    out = tmp_path / "canonical.csv"
    assert hotspot.convert_jhu(src, out) == 2
    series = hotspot.ingest_cases(out)
    assert len(series.records) == 2
    assert series.records[0].region_id == "Washington/Chelan"
    assert series.records[0].cumulative_cases == 50
