"""Regenerate tests/golden from the shipped fixtures via the CLI.

Run after an intentional output change, then review the diff before committing.
"""

import contextlib
import io
from importlib import resources
from pathlib import Path

from causelog.cli import main

FIX = Path(str(resources.files("causelog") / "fixtures"))
OUT = Path(__file__).resolve().parent.parent / "tests" / "golden"

SCENARIOS = {
    "firing_squad": ("firing_squad.log", ["firing_squad.rules"], 4),
    "uav_pilot": ("uav_pilot.log", ["uav.rules", "world.rules"], 11),
    "uav_rogue": ("uav_rogue.log", ["uav.rules", "world.rules"], 7),
    "roomba": ("roomba.log", ["roomba.rules", "world.rules"], 7),
    "roomba_ok": ("roomba_ok.log", ["roomba.rules", "world.rules"], 5),
}


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        main(argv)
    return buf.getvalue()


def main_():
    OUT.mkdir(exist_ok=True)
    for name, (log, rules, target) in SCENARIOS.items():
        base = [str(FIX / log)] + [a for r in rules for a in ("--rules", str(FIX / r))]
        (OUT / f"{name}.dot").write_text(run(["diagram", *base, "--dot"]), encoding="utf-8")
        (OUT / f"{name}.anomalies.json").write_text(run(["anomalies", *base]), encoding="utf-8")
        explain = ["explain", *base, "--target", str(target)]
        (OUT / f"{name}.explain.json").write_text(run([*explain, "--format", "json"]), encoding="utf-8")
        (OUT / f"{name}.explain.txt").write_text(run([*explain, "--format", "text"]), encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    main_()
