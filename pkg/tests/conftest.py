import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blockflow import kernels  # noqa: E402


@pytest.fixture(params=["jit", "py"])
def backend(request):
    """Both kernel implementations, for parity tests."""
    if request.param == "jit":
        return {
            "biconnected": kernels.biconnected_jit,
            "peel_tree": kernels.peel_tree_jit,
            "residual": kernels.residual_jit,
            "jac_flow_entries": kernels.jac_flow_entries_jit,
        }
    return {
        "biconnected": kernels.biconnected_py,
        "peel_tree": kernels.peel_tree_py,
        "residual": kernels.residual_py,
        "jac_flow_entries": kernels.jac_flow_entries_py,
    }


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
