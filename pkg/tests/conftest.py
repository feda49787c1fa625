from pathlib import Path

import pytest

from attrlink.kg_store import Catalog

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def whites_catalog():
    return Catalog.from_records([
        (":white", "white", "Color"),
        (":off-white", "off-white", "Color"),
        (":white gold", "white gold", "Material"),
    ])
