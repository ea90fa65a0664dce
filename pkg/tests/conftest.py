import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from textattrib import FeatureMatrix, default_lexicon


@pytest.fixture(scope="session")
def lexicon_en():
    return default_lexicon("en")


@pytest.fixture(scope="session")
def lexicon_es():
    return default_lexicon("es")


def make_matrix(X, prefix="f"):
    X = np.asarray(X, dtype=np.float64)
    return FeatureMatrix(
        feature_names=tuple(f"{prefix}{i}" for i in range(X.shape[1])),
        doc_ids=tuple(f"doc{i}" for i in range(X.shape[0])),
        rows=X,
    )
