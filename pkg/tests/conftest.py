import numpy as np
import pytest

from vertexlab.fock import TruncationSpec
from vertexlab.loopspace import TWO_PI, LatticeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def lattice():
    return LatticeSpec(L=TWO_PI, Lambda=6)


@pytest.fixture
def small_trunc():
    return TruncationSpec(4, -1, 1)


@pytest.fixture
def reports_dir(tmp_path, monkeypatch):
    out = tmp_path / "reports"
    monkeypatch.setenv("VERTEXLAB_OUTPUT_DIR", str(out))
    return out
