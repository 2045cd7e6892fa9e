import pytest

from gapfield.validate import CHECKS, run_checks


@pytest.fixture(scope="module")
def full_report():
    return run_checks(quick=False)


def test_every_check_reports(full_report):
    assert len(full_report) == len(CHECKS)
    assert len({c.name for c in full_report}) == len(CHECKS)


def test_full_run_passes(full_report):
    failed = [(c.name, c.measured) for c in full_report if not c.passed]
    assert not failed


def test_perturbation_only_breaks_decomposition():
    report = run_checks(quick=True, perturb_q=1e-4)
    assert [c.name for c in report if not c.passed] == ["constants.m_decomposition"]
