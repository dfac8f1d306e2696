import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causelog._kernels import available_backends  # noqa: E402
from causelog.log import parse_log  # noqa: E402
from causelog.rules import merge_rules, parse_rules  # noqa: E402

FIXTURES = Path(str(resources.files("causelog") / "fixtures"))
GOLDEN = Path(__file__).parent / "golden"

SCENARIOS = {
    "firing_squad": ("firing_squad.log", ["firing_squad.rules"]),
    "uav_pilot": ("uav_pilot.log", ["uav.rules", "world.rules"]),
    "uav_rogue": ("uav_rogue.log", ["uav.rules", "world.rules"]),
    "roomba": ("roomba.log", ["roomba.rules", "world.rules"]),
    "roomba_ok": ("roomba_ok.log", ["roomba.rules", "world.rules"]),
}


def load_scenario(name):
    log_name, rule_names = SCENARIOS[name]
    file = parse_log((FIXTURES / log_name).read_text(encoding="utf-8"))
    rules = merge_rules(parse_rules((FIXTURES / r).read_text(encoding="utf-8")) for r in rule_names)
    return file, rules


def scenario_args(name):
    log_name, rule_names = SCENARIOS[name]
    args = [str(FIXTURES / log_name)]
    for r in rule_names:
        args += ["--rules", str(FIXTURES / r)]
    return args


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
