import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mls.interpreter import Interpreter

REPO = Path(__file__).resolve().parents[1]
CORPUS = REPO / "corpus"


@pytest.fixture
def interp():
    return Interpreter()


@pytest.fixture
def capture():
    """Interpreter whose printed output is collected in a buffer."""
    out = io.StringIO()
    err = io.StringIO()
    i = Interpreter(stdout=out, stderr=err)
    i.out = out
    i.err = err
    return i


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS
