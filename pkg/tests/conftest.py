import pytest

from oscgauss import verify
from oscgauss.precision import PrecisionContext


@pytest.fixture(scope="session")
def phase():
    """One traced contour for the whole session (shared with verify)."""
    return verify.shared_phase()


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext(30)
