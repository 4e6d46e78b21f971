"""Oracle and closed forms for the tower-plus-boxes partner problem."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pin2floer.gysin import (
    GysinCertificate,
    GysinError,
    Infeasible,
    IncreaseStep,
    closed_form_corrected,
    closed_form_stated,
    default_pad,
    feasibility_check,
    increase_classify,
    oracle_solve,
    stated_corrected_diffs,
)
from pin2floer.modules import (
    Box,
    StandardModule,
    F_box,
    T_plus,
    direct_sum,
)


def _starts_and_boxes(cand):
    starts = tuple(int(x) for x in cand.standard.tower_starts())
    boxes = tuple(sorted((int(b.deg), b.dim) for b in cand.boxes))
    return starts, boxes


# -- oracle on the pinned inputs -------------------------------------------------


def test_bare_tower_partners():
    sol = oracle_solve(T_plus(0))
    assert sol.unique
    assert sol.candidates[0].standard == StandardModule(0, 0, 0)
    assert sol.candidates[0].boxes == ()

    sol = oracle_solve(T_plus(-2))
    assert sol.unique
    assert sol.candidates[0].standard == StandardModule(-1, -1, -1)
    assert sol.candidates[0].boxes == ()


@pytest.mark.parametrize("k", range(6))
def test_even_box_family_unique(k):
    m = T_plus(0) + F_box(2 * k, -1) if k else T_plus(0)
    sol = oracle_solve(m)
    assert sol.unique
    cand = sol.candidates[0]
    assert cand.standard == StandardModule(0, 0, 0)
    expected = ((-1, k),) if k else ()
    assert tuple(sorted((int(b.deg), b.dim) for b in cand.boxes)) == expected


def test_oracle_certificates_attached():
    sol = oracle_solve(T_plus(0) + F_box(2, -1))
    assert all(isinstance(c.certificate, GysinCertificate) for c in sol.candidates)


def test_two_survivor_input():
    """A tower plus mixed boxes where the window data genuinely underdetermines."""
    m = direct_sum(T_plus(-4), F_box(3, -4), F_box(1, -3))
    sol = oracle_solve(m)
    assert not sol.unique
    got = {_starts_and_boxes(c) for c in sol.candidates}
    want = {
        (
            tuple(int(x) for x in StandardModule(0, -2, -2).tower_starts()),
            ((-4, 2),),
        ),
        (
            tuple(int(x) for x in StandardModule(-2, -2, -2).tower_starts()),
            ((-4, 2), (-3, 1)),
        ),
    }
    assert got == want


def test_odd_box_on_shifted_tower_two_survivors():
    # long-standing artifact: one odd box one below the base also admits a
    # shifted-tower reading, so the oracle alone reports two candidates
    sol = oracle_solve(T_plus(-2) + F_box(1, -2))
    assert len(sol.candidates) == 2
    assert not sol.unique


def test_feasibility_rejects_wrong_multiplicity():
    verdict = feasibility_check(
        T_plus(0) + F_box(1, -1),
        StandardModule(1, -1, -1).to_structured((Box(-1, 1),)),
    )
    assert isinstance(verdict, Infeasible)
    assert int(verdict.degree) == -1


def test_feasibility_accepts_correct_partner():
    verdict = feasibility_check(
        T_plus(0) + F_box(1, -1),
        StandardModule(1, -1, -1).to_structured(),
    )
    assert isinstance(verdict, GysinCertificate)


def test_source_validation():
    with pytest.raises(GysinError):
        oracle_solve(StandardModule(0, 0, 0).to_structured())  # not a step-2 input


# -- closed forms -----------------------------------------------------------------


@pytest.mark.parametrize("family", [-1, 0, 1, 2])
@pytest.mark.parametrize("n", range(6))
def test_closed_form_certified(family, n):
    ans = closed_form_corrected(family, n)
    assert isinstance(ans.certificate, GysinCertificate)
    assert ans.box_dim == n // 2


def test_closed_form_family_minus_one():
    # family 2K-1 with K=0: base tower T^+_0, boxes at -1
    for n, (std, label) in {
        0: (StandardModule(0, 0, 0), "even"),
        1: (StandardModule(1, -1, -1), "odd"),
        2: (StandardModule(0, 0, 0), "even"),
        3: (StandardModule(1, -1, -1), "odd"),
    }.items():
        ans = closed_form_corrected(-1, n)
        assert ans.standard == std
        assert ans.parity_label == label
        assert ans.box_deg == -1


def test_closed_form_family_zero():
    # family 2K with K=0: boxes on the base class itself
    ans = closed_form_corrected(0, 3)
    assert ans.standard == StandardModule(1, 1, -1)
    assert ans.box_deg == 0
    assert ans.box_dim == 1


def test_closed_form_box_degree_constraint():
    assert closed_form_corrected(-1, 2, box_deg=-5).box_deg == -5
    with pytest.raises(GysinError):
        closed_form_corrected(-1, 2, box_deg=-2)


def test_closed_form_negative_n():
    with pytest.raises(GysinError):
        closed_form_corrected(-1, -1)


def test_closed_form_module_matches_oracle():
    for n in range(4):
        ans = closed_form_corrected(-1, n)
        sol = oracle_solve(T_plus(0) + F_box(n, -1) if n else T_plus(0))
        got = {_starts_and_boxes(c) for c in sol.candidates}
        starts = tuple(int(x) for x in ans.standard.tower_starts())
        boxes = ((-1, ans.box_dim),) if ans.box_dim else ()
        assert (starts, boxes) in got


def test_stated_deviations_are_the_two_documented_kinds():
    seen = set()
    for family in (-1, 0):
        for n in range(6):
            for w in stated_corrected_diffs(family, n):
                seen.add(w.cls)
    assert seen == {"case-labels", "finite-multiplicity"}


def test_stated_table_agrees_on_first_family_even_n():
    assert stated_corrected_diffs(-1, 0) == ()
    assert stated_corrected_diffs(-1, 2) == ()
    assert closed_form_stated(-1, 1).box_dim == 1  # the famous off-by-one


@given(st.integers(-3, 3), st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_corrected_box_count_is_floor_half(family, n):
    assert closed_form_corrected(family, n).box_dim == n // 2


@given(st.integers(-3, 3), st.integers(0, 6))
@settings(max_examples=40, deadline=None)
def test_odd_n_never_latches_even_pattern(family, n):
    ans = closed_form_corrected(family, n)
    if n % 2 == 0:
        assert ans.standard.alpha == ans.standard.beta == ans.standard.gamma
    else:
        assert ans.standard.alpha != ans.standard.gamma


# -- window-step classifier --------------------------------------------------------


def test_increase_classify_repr():
    step = increase_classify((0, 1, 1))
    assert isinstance(step, IncreaseStep)
    assert "IncreaseStep(kind=" in repr(step)


def test_default_pad_env(monkeypatch):
    monkeypatch.delenv("P2F_WINDOW_PAD", raising=False)
    assert default_pad() == 12
    monkeypatch.setenv("P2F_WINDOW_PAD", "16")
    assert default_pad() == 16
    monkeypatch.setenv("P2F_WINDOW_PAD", "4")
    with pytest.raises(GysinError):
        default_pad()
