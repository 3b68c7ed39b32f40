import math

import pytest

from zetamom import main_terms as mt
from zetamom import prime_tools as pt
from zetamom import proxy_polys as pp
from zetamom import zeta_engine as ze


@pytest.fixture(scope="session")
def table_small():
    return pt.sieve(10_000)


@pytest.fixture(scope="session")
def table_mid():
    return pt.sieve(100_000)


@pytest.fixture(scope="session")
def desk_schedule(table_mid):
    """Three hand-picked prime blocks; the formula boundaries collapse at
    desk-scale T, so module tests use a fixed custom schedule."""
    return pt.schedule_from_boundaries([math.e**2, 50.0, 500.0, 5000.0],
                                       T=1e5, beta=0.5, table=table_mid)


@pytest.fixture(scope="session")
def desk_family(desk_schedule):
    return pp.proxy_family(0.5, desk_schedule)


@pytest.fixture(scope="session")
def weight():
    return mt.SmoothWeight()


@pytest.fixture(scope="session")
def ev():
    return ze.DEFAULT_EVAL
