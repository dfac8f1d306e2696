"""Regenerate the chained fixture logs in src/causelog/fixtures/.

Run from the repository root: ``python scripts/make_fixtures.py``.
"""

from pathlib import Path

from causelog.log import LogFile, append_record, serialize_log

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "causelog" / "fixtures"

# (t, comp, event, params, parent)
SCENARIOS = {
    # court -> captain -> both riflemen -> prisoner
    "firing_squad.log": [
        (0, "court", "order", {}, None),
        (1, "captain", "signal", {}, "court"),
        (2, "rifleman_a", "shoot", {}, "captain"),
        (2, "rifleman_b", "shoot", {}, "captain"),
        (3, "prisoner", "dies", {}, None),
    ],
    # pilot takes off, climbs to 25 m, then steers left four times into the no-fly zone
    "uav_pilot.log": [
        (1, "pilot", "start", {}, None),
        (2, "flight_controller", "takeoff", {}, "pilot"),
        (3, "imu", "altitude", {"alt": "25m"}, None),
        (4, "pilot", "go_left", {}, None),
        (4, "flight_controller", "move", {"dir": "left"}, "pilot"),
        (5, "pilot", "go_left", {}, None),
        (5, "flight_controller", "move", {"dir": "left"}, "pilot"),
        (6, "pilot", "go_left", {}, None),
        (6, "flight_controller", "move", {"dir": "left"}, "pilot"),
        (7, "pilot", "go_left", {}, None),
        (7, "flight_controller", "move", {"dir": "left"}, "pilot"),
        (8, "gps", "position", {"zone": "restricted"}, None),
    ],
    # same takeoff, but the UAV drifts left with no command from the pilot
    "uav_rogue.log": [
        (1, "pilot", "start", {}, None),
        (2, "flight_controller", "takeoff", {}, "pilot"),
        (3, "imu", "altitude", {"alt": "25m"}, None),
        (4, "flight_controller", "move", {"dir": "left"}, None),
        (5, "flight_controller", "move", {"dir": "left"}, None),
        (6, "flight_controller", "move", {"dir": "left"}, None),
        (7, "flight_controller", "move", {"dir": "left"}, None),
        (8, "gps", "position", {"zone": "restricted"}, None),
    ],
    # two clean 30 s lanes with 5 s turns, then a bump 15 s into the third lane
    "roomba.log": [
        (0, "operator", "start", {}, None),
        (500, "robot", "start", {}, "operator"),
        (1000, "robot", "lane_start", {"lane": "1"}, None),
        (31000, "robot", "bump", {}, None),
        (36000, "robot", "lane_start", {"lane": "2"}, None),
        (66000, "robot", "bump", {}, None),
        (71000, "robot", "lane_start", {"lane": "3"}, None),
        (86000, "robot", "bump", {}, None),
    ],
}
# the first two lanes only: every bump on time
SCENARIOS["roomba_ok.log"] = SCENARIOS["roomba.log"][:6]


def build(rows) -> LogFile:
    f = LogFile()
    for t, comp, event, params, parent in rows:
        f = append_record(f, t, comp, event, params, parent)
    return f


def main() -> None:
    for name, rows in SCENARIOS.items():
        (FIXTURES / name).write_text(serialize_log(build(rows)), encoding="utf-8")
        print(f"wrote {name} ({len(rows)} records)")


if __name__ == "__main__":
    main()
