import time

import pytest

from mirror_margin import config as C
from mirror_margin.flow import run

# criterion number -> list of (ok, detail); filled by the acceptance tests
CRITERIA = {}


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        CRITERIA.setdefault(number, []).append((bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        rows = CRITERIA[number]
        ok = all(r[0] for r in rows)
        details = "; ".join(d for _, d in rows)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {details}")


class Fig1Run:
    def __init__(self, name):
        self.cfg = C.load_run_config(name)
        self.ds = C.build_dataset(self.cfg)
        self.potential = C.build_potential(self.cfg, self.ds.d)
        from mirror_margin.losses import get_loss
        t0 = time.perf_counter()
        self.tr = run(self.potential, get_loss(self.cfg["loss"]), self.ds, C.flow_config(self.cfg))
        self.seconds = time.perf_counter() - t0


@pytest.fixture(scope="session")
def fig1_runs():
    return {name: Fig1Run(name) for name in ("fig1_gd", "fig1_md1", "fig1_md2")}
