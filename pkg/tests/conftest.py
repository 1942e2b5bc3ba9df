from __future__ import annotations

import pytest

from fockthermo import BathParams, rates


@pytest.fixture(scope="session")
def fig_bath() -> BathParams:
    """Reference regime: omega=1, T=0.5, gamma=0.1, g=0.05, markovian."""
    return BathParams()


@pytest.fixture(scope="session")
def fig_rates(fig_bath):
    return rates(fig_bath)
