import json
from datetime import date, datetime

import pytest

from rtrmt import grid, hotspot, telemetry
from rtrmt.errors import InvalidStageTransition, ParseError, UnknownEdge
from rtrmt.service import data_path


@pytest.fixture(scope="module")
def script():
    return telemetry.load_script(data_path("scenario_covid_outage.json"))


def fresh_state(net45, cases, **kw):
    return telemetry.new_state(
        net45, cases, risk_date=date(2020, 4, 1), start=datetime(2020, 4, 1, 8, 0), **kw
    )


class TestScript:
    def test_fixture_script(self, script):
        assert script.duration_hours == 2.0
        assert [ev.kind for ev in script.events] == [
            "stage_change", "fault_edge", "stage_change", "clear_fault",
        ]
        offsets = [ev.at_minutes for ev in script.events]
        assert offsets == sorted(offsets)

    def test_decreasing_offsets_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({
            "name": "bad", "start": "2020-04-01T08:00:00", "duration_hours": 1.0,
            "events": [
                {"at": 30, "kind": "fault_edge", "payload": {"edge": "e1"}},
                {"at": 15, "kind": "clear_fault", "payload": {"edge": "e1"}},
            ],
        }))
        with pytest.raises(ParseError):
            telemetry.load_script(p)

    def test_unknown_kind_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({
            "name": "bad", "start": "2020-04-01T08:00:00", "duration_hours": 1.0,
            "events": [{"at": 0, "kind": "meteor_strike", "payload": {}}],
        }))
        with pytest.raises(ParseError):
            telemetry.load_script(p)


class TestEvents:
    def test_fault_and_clear(self, net45, cases):
        state = fresh_state(net45, cases)
        telemetry.inject_event(state, "fault_edge", {"edge": "eB03"})
        assert state.net.edge_map["eB03"].state == "faulted"
        telemetry.inject_event(state, "clear_fault", {"edge": "eB03"})
        assert state.net.edge_map["eB03"].state == "closed"

    def test_unknown_edge(self, net45, cases):
        state = fresh_state(net45, cases)
        with pytest.raises(UnknownEdge):
            telemetry.inject_event(state, "fault_edge", {"edge": "bogus"})

    def test_stage_cycle(self, net45, cases):
        state = fresh_state(net45, cases)
        assert state.stage == grid.EventStage.PRE_EVENT
        for nxt in ("during_event", "post_event", "pre_event"):
            telemetry.inject_event(state, "stage_change", {"stage": nxt})
        assert state.stage == grid.EventStage.PRE_EVENT

    def test_stage_skip_rejected(self, net45, cases):
        state = fresh_state(net45, cases)
        with pytest.raises(InvalidStageTransition):
            telemetry.inject_event(state, "stage_change", {"stage": "post_event"})

    def test_load_scale(self, net45, cases):
        state = fresh_state(net45, cases)
        before = sum(n.load_kw for n in state.net.nodes)
        telemetry.inject_event(state, "load_scale", {"factor": 1.5})
        after = sum(n.load_kw for n in state.net.nodes)
        assert after == pytest.approx(1.5 * before)

    def test_hotspot_update_rebuilds_field(self, net45, cases):
        state = fresh_state(net45, cases)
        rows = [{
            "region_id": "zNew", "name": "New", "lat": 47.0, "lon": -120.5,
            "date": "2020-04-01", "cumulative_cases": 10_000,
        }]
        telemetry.inject_event(state, "hotspot_update", {"rows": rows, "date": "2020-04-01"})
        assert any(z.zone_id == "zNew" and z.intensity == 1.0 for z in state.risk.zones)

    def test_events_are_logged(self, net45, cases):
        state = fresh_state(net45, cases)
        telemetry.inject_event(state, "fault_edge", {"edge": "eB03"})
        assert state.log[-1]["kind"] == "fault_edge"


class TestTick:
    def test_clock_advances_15_minutes(self, net45, cases):
        state = fresh_state(net45, cases)
        frame, record = telemetry.tick(state)
        assert state.tick_index == 1
        assert frame.timestamp == datetime(2020, 4, 1, 8, 15)
        assert record.timestamp == frame.timestamp

    def test_voltage_noise_band(self, net45, cases):
        state = fresh_state(net45, cases, seed=7)
        frame, _ = telemetry.tick(state)
        assert all(abs(v - 1.0) <= telemetry.VOLTAGE_NOISE for v in frame.voltage_pu.values())

    def test_noise_does_not_affect_score(self, net45, cases):
        scores = set()
        for seed in (1, 2, 3):
            state = fresh_state(net45, cases, seed=seed)
            _, record = telemetry.tick(state)
            scores.add(record.score)
        assert len(scores) == 1

    def test_event_applied_before_scoring(self, net45, cases, script):
        state = fresh_state(net45, cases)
        # ticks 1 and 2 cover minutes 15 and 30: stage change then fault
        telemetry.tick(state, script)
        assert state.stage == grid.EventStage.DURING_EVENT
        _, record = telemetry.tick(state, script)
        assert state.net.edge_map["eB03"].state == "faulted"
        assert record.components["load_served"] < 1.0


class TestReplay:
    def test_record_count(self, net45, cases, script):
        state = telemetry.replay(script, net45, cases, seed=42)
        assert len(state.scores) == 8

    def test_score_recovers_after_clear(self, net45, cases, script):
        state = telemetry.replay(script, net45, cases, seed=42)
        scores = [r.score for r in state.scores]
        assert min(scores[1:4]) < scores[0]  # fault window dips
        assert scores[-1] == pytest.approx(scores[0], abs=1e-9)  # cleared

    def test_stage_progression(self, net45, cases, script):
        state = telemetry.replay(script, net45, cases, seed=42)
        stages = [r.stage.value for r in state.scores]
        assert stages[0] == "during_event"
        assert stages[-1] == "post_event"

    def test_determinism_byte_identical(self, net45, cases, script):
        a = telemetry.log_lines(telemetry.replay(script, net45, cases, seed=123))
        b = telemetry.log_lines(telemetry.replay(script, net45, cases, seed=123))
        assert a == b
        # noise is cosmetic: score entries are seed-independent
        c = telemetry.log_lines(telemetry.replay(script, net45, cases, seed=124))
        pick = lambda text: [ln for ln in text.splitlines() if '"kind": "score"' in ln]
        assert pick(a) == pick(c)

    def test_log_is_ndjson(self, net45, cases, script):
        text = telemetry.log_lines(telemetry.replay(script, net45, cases, seed=1))
        lines = text.strip().split("\n")
        entries = [json.loads(ln) for ln in lines]
        assert entries[0]["kind"] == "scenario_loaded"
        assert sum(1 for e in entries if e["kind"] == "score") == 8
        assert all(set(e) == {"ts", "kind", "payload"} for e in entries)
