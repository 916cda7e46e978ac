from pathlib import Path

import pytest

from shiqcq.oracle import kernels

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

ACCEPTANCE_TITLES = {
    1: "NNF semantic equivalence",
    2: "initial forest equivalence",
    3: "rule model preservation",
    4: "differential entailment",
    5: "witness soundness",
    6: "blocking depth formula",
    7: "linear A-Box scaling",
    8: "worked examples via CLI",
    9: "query mapping vs exhaustive enumeration",
}
_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str) -> None:
        _results[criterion] = (passed, detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k, title in ACCEPTANCE_TITLES.items():
        if k not in _results:
            terminalreporter.write_line(f"criterion {k} {title}: NOT RUN")
            continue
        passed, detail = _results[k]
        terminalreporter.write_line(f"criterion {k} {title}: {'PASS' if passed else 'FAIL'} ({detail})")


@pytest.fixture
def corpus():
    return CORPUS


BACKENDS = [kernels.python_run] + ([kernels.compiled_run] if kernels.compiled_run else [])


@pytest.fixture(params=BACKENDS, ids=lambda f: f.__module__.rsplit(".", 1)[-1])
def backend(request):
    return request.param
