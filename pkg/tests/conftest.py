import sys

import pytest

from tomei import kernels
from tomei.roots import WeylGroup, parse_diagram
from tomei.signs import standard_marking, trivial_marking

BACKENDS = [kernels.python_backend] + ([kernels.compiled_backend] if kernels.compiled_backend else [])


@pytest.fixture(params=BACKENDS, ids=lambda b: b.BACKEND)
def backend(request):
    return request.param


_groups = {}


def group(label):
    if label not in _groups:
        _groups[label] = WeylGroup(parse_diagram(label))
    return _groups[label]


def marked(label, which="trivial"):
    d = parse_diagram(label)
    return standard_marking(d) if which == "standard" else trivial_marking(d)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
