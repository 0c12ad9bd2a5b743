from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from qprcert.counterexamples import sic_baseline

if TYPE_CHECKING:
    from qprcert.ontic import AffineEffectRep, AffineStateRep


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def sic_pair() -> tuple[AffineStateRep, AffineEffectRep]:
    return sic_baseline()
