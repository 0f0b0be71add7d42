import pytest

from univoque.verify import SUITES, CheckResult, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    results = list(run_suite(name))
    assert results and all(isinstance(r, CheckResult) for r in results)
    failed = [r.identifier for r in results if not r.passed]
    assert not failed, failed


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("no-such-suite")
