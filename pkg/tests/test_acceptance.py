"""Suites at full corpus size. Each takes tens of seconds."""

from __future__ import annotations

import pytest

from inicalc.harness.events import EventBus
from inicalc.harness.models import GenConfig
from inicalc.harness.suites import (
    run_equations_suite, run_soundness_suite, run_splitting_suite,
    run_translation_suite,
)
from inicalc.semantics.models import ModelId

pytestmark = pytest.mark.slow


def test_one_level_soundness_corpus():
    report = run_soundness_suite(GenConfig(count=500), bus=EventBus())
    assert report.ini_checked == 500
    assert report.negative_control_flagged
    assert report.failures == []


@pytest.mark.parametrize("model", list(ModelId))
def test_independent_layer_soundness_corpus(model):
    report = run_soundness_suite(GenConfig(count=200, model=model), bus=EventBus())
    assert report.i_checked == 200
    assert report.negative_control_flagged
    assert report.failures == []
    if model is ModelId.NAME:
        assert report.names_disjoint


def test_every_law_on_fifty_instances():
    report = run_equations_suite(GenConfig(count=50), bus=EventBus())
    assert all(result.checked == 50 for result in report.results)
    assert report.failure_count == 0


def test_translations_on_both_fragments():
    report = run_translation_suite(GenConfig(count=200), bus=EventBus())
    assert report.typing_checked == 400
    assert report.semantics_checked == 400
    assert report.pairs_checked >= 100
    assert report.failures == []


def test_split_enumeration_agrees():
    report = run_splitting_suite(GenConfig(count=300), bus=EventBus())
    assert report.checked == 600
    assert report.disagreements == []
