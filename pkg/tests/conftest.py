import numpy as np
import pytest

from lovasz_abstain import make_jaccard, make_modular, make_sqrt_card, make_zero_one


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def builtin_collections(k):
    """The running-example collections at dimension k."""
    return {
        "zero_one": make_zero_one(k),
        "modular": make_modular(np.arange(1, k + 1, dtype=float)),
        "sqrt_card": make_sqrt_card(k),
        "jaccard": make_jaccard(k),
    }


def symmetric_builtins(k):
    return {
        "zero_one": make_zero_one(k),
        "modular": make_modular(np.arange(1, k + 1, dtype=float)),
        "sqrt_card": make_sqrt_card(k),
    }
