"""Shared fixtures: frozen oracle data and small session-scoped catalogs."""

import json
import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"

# Ordinates of the first nontrivial zeta zeros (from the frozen oracle).
GAMMA_1 = 14.134725141734693
GAMMA_2 = 21.022039638771555

# First complex zero of zeta' (Newton-refined against the oracle).
RHO1_PRIME = 2.4631618694543213 + 23.298320492762858j


@pytest.fixture(scope="session")
def zeta_oracle():
    return json.loads((DATA / "zeta_oracle.json").read_text())


@pytest.fixture(scope="session")
def gamma_oracle():
    return json.loads((DATA / "gamma_oracle.json").read_text())


@pytest.fixture(scope="session")
def critical_zero_ordinates():
    return json.loads((DATA / "critical_zeros.json").read_text())["ordinates"]
