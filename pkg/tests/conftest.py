import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if (report.when == "call" and report.failed
            and "test_acceptance" in str(getattr(item, "fspath", ""))):
        match = re.search(r"criterion_(\d+)", item.name)
        if match:
            print(f"\n[criterion {match.group(1)}] FAIL - see traceback", file=sys.stderr)
