import numpy as np
import pytest

from nerchart import Analysis, LabelSet, Mention, WeightTable

LABELS = LabelSet(["PER", "GPE", "ORG"])
PER, GPE, ORG = range(3)

# The four running-example sentences: length and gold mentions.
SENTENCES = {
    1: (8, Analysis([Mention(PER, 0, 1), Mention(PER, 5, 8)])),
    2: (8, Analysis([Mention(PER, 0, 1), Mention(PER, 2, 3), Mention(PER, 5, 6), Mention(PER, 2, 8)])),
    3: (8, Analysis([Mention(PER, 0, 1), Mention(GPE, 5, 7), Mention(ORG, 4, 8)])),
    4: (6, Analysis([Mention(PER, 0, 1), Mention(GPE, 5, 6), Mention(GPE, 4, 6), Mention(PER, 2, 6)])),
}


def indicator(sentence: int) -> WeightTable:
    n, gold = SENTENCES[sentence]
    return WeightTable.indicator(n, LABELS, gold)


def random_weights(n: int, num_labels: int, seed: int, low=-1.0, high=1.0) -> WeightTable:
    rng = np.random.default_rng(seed)
    return WeightTable.random(n, LabelSet.generic(num_labels), rng, low, high)


@pytest.fixture
def labels():
    return LABELS


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, text = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
