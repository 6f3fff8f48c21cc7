import importlib

import numpy as np
import pytest

from multicorr import _pykernels

_ACCEPTANCE = []


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    try:
        ck = importlib.import_module("multicorr._ckernels")
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip(reason="extension not built")))
    else:
        out.append(pytest.param(ck, id="cython"))
    return out


@pytest.fixture(params=_backends())
def kernels(request):
    return request.param


@pytest.fixture
def force_backend(monkeypatch, kernels):
    """Route every high-level call through one specific kernel module."""
    from multicorr import _backend

    for name in ("jacobi_eigh", "singular_values", "concurrence_batch", "correlation_core"):
        monkeypatch.setattr(_backend, name, getattr(kernels, name))
    return kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_criterion():
    def record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}" + (f" ({detail})" if detail else ""))
