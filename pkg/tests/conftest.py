import pytest

from bnpolarity.corpus import LabeledCorpus, PolarityLabel, Review, SyntheticSpec, generate_synthetic_corpus


@pytest.fixture(scope="session")
def planted_corpus():
    """Seeded 400-review corpus with 5% lexicon noise."""
    return generate_synthetic_corpus(SyntheticSpec(num_reviews=400, noise_rate=0.05, seed=11))


@pytest.fixture
def toy_corpus():
    return LabeledCorpus(
        (Review("ভাল ভাল বই", PolarityLabel.POSITIVE), Review("বাজে বই", PolarityLabel.NEGATIVE)), "toy"
    )


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in getattr(rep, "nodeid", "") and rep.when == "call":
                lines.append((rep.nodeid.split("::")[-1], outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
