import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from citeindex.synthgen import GenConfig, generate  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


def small_config(seed, **kw):
    base = dict(seed=seed, n_papers=150, year_span=(1985, 2000), n_authors=30, n_venues=4,
                authors_per_paper=(1, 3), cites_per_paper=(0, 6), attachment_exponent=1.0,
                trendsetter_fraction=0.1)
    base.update(kw)
    return GenConfig(**base)


@pytest.fixture(scope="session")
def synthetic_graphs():
    return [generate(small_config(seed)) for seed in range(12)]
