"""SolveMachine: solves, resumption, serialization, admissibility checks."""

import time

import pytest

from kkmw.engine import (
    AdmissibilityViolation,
    AnswerShapeInvalid,
    CoverOracle,
    NeedAnswers,
    ResolutionExceeded,
    SolveMachine,
    default_schedule,
    solve_colorful_kkm,
    verify_cover,
)


def argmax_oracle(k, n=None, tie_eps=1e-12):
    """Cover i = points where x_i is (near) maximal; intersection = barycenter."""

    def query(_j, x):
        best = max(x)
        return {i for i, v in enumerate(x) if v >= best - tie_eps}

    return CoverOracle(k=k, n=n or k, query_fn=query)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_argmax_covers_find_barycenter(k):
    t0 = time.time()
    rainbow = solve_colorful_kkm(argmax_oracle(k), tolerance=1e-3)
    assert time.time() - t0 < 5.0
    for xi in rainbow.witness:
        assert abs(xi - 1.0 / k) <= 1e-3
    # colorful conclusion: owners matched to distinct labels
    assert sorted(rainbow.permutation.values()) == list(range(k))


def test_default_schedule_shape():
    sched = default_schedule(3, 1e-2)
    assert sched[0] == 1
    assert all(b > a for a, b in zip(sched, sched[1:]))
    assert (3 - 1) / sched[-1] <= 1e-2


def test_resume_via_need_answers():
    oracle = argmax_oracle(3)
    machine = SolveMachine(3, 3, "primal", 1e-2)
    direct = SolveMachine(3, 3, "primal", 1e-2).solve(oracle)
    while True:
        out = machine.advance(None)
        if not isinstance(out, NeedAnswers):
            break
        for q in out.queries:
            machine.supply_answer(q.query_id, oracle.query(q.cover, q.point()))
    assert out.to_dict() == direct.to_dict()


def test_serialization_round_trip_is_byte_identical():
    oracle = argmax_oracle(3)
    machine = SolveMachine(3, 3, "primal", 1e-2)
    # answer a first batch, suspend, serialize
    out = machine.advance(None)
    assert isinstance(out, NeedAnswers)
    for q in out.queries:
        machine.supply_answer(q.query_id, oracle.query(q.cover, q.point()))
    blob = machine.to_json()
    resumed = SolveMachine.from_json(blob)
    assert resumed.to_json() == blob
    # both finish identically
    a = machine.solve(oracle)
    b = resumed.solve(oracle)
    assert a.to_dict() == b.to_dict()


def test_replayed_answer_script_reproduces_output():
    oracle = argmax_oracle(4)
    first = SolveMachine(4, 4, "primal", 5e-3)
    script = []
    while True:
        out = first.advance(None)
        if not isinstance(out, NeedAnswers):
            break
        for q in out.queries:
            ans = sorted(oracle.query(q.cover, q.point()))
            script.append((q.query_id, ans))
            first.supply_answer(q.query_id, ans)
    second = SolveMachine(4, 4, "primal", 5e-3)
    for qid, ans in script:
        second.supply_answer(qid, ans)
    replayed = second.advance(None)
    assert replayed.to_dict() == out.to_dict()


def test_dual_mode_two_rooms():
    # both players prefer room 0 unless it costs more than 0.7
    def query(_j, x):
        free = {i for i, v in enumerate(x) if v <= 0.0}
        if free:
            return free
        return {0} if x[0] <= 0.7 else {1}

    oracle = CoverOracle(k=2, n=2, query_fn=query, mode="dual")
    rainbow = SolveMachine(2, 2, "dual", 1e-2).solve(oracle)
    assert abs(rainbow.witness[0] - 0.7) <= 0.05


def test_admissibility_violation_raised():
    def query(_j, _x):
        return {0}

    oracle = CoverOracle(k=2, n=1, query_fn=query)
    with pytest.raises(AdmissibilityViolation):
        SolveMachine(2, 1, "primal", 1e-1).solve(oracle)


def test_resolution_exceeded_when_schedule_too_coarse():
    with pytest.raises(ResolutionExceeded):
        SolveMachine(3, 3, "primal", 1e-6, schedule=[1, 8]).solve(argmax_oracle(3))


def test_supply_answer_validation():
    machine = SolveMachine(3, 3, "primal", 1e-1)
    pending = machine.next_pending()
    qid = pending[0].query_id
    with pytest.raises(AnswerShapeInvalid):
        machine.supply_answer(qid, [])
    with pytest.raises(AnswerShapeInvalid):
        machine.supply_answer(qid, [7])
    machine.supply_answer(qid, [0, 1])
    with pytest.raises(AnswerShapeInvalid):
        machine.supply_answer(qid, [2])  # conflicting re-answer
    machine.supply_answer(qid, [0, 1])  # identical re-answer is fine


def test_initial_seed_serialized():
    machine = SolveMachine(3, 3, "primal", 1e-1, initial_seed=(0.2, 0.3, 0.5))
    clone = SolveMachine.from_dict(machine.to_dict())
    assert clone.initial_seed == (0.2, 0.3, 0.5)


def test_verify_cover_reports():
    good = verify_cover(argmax_oracle(3), samples=200)
    assert good.ok

    def bad_query(_j, x):
        return {0} if x[0] > 0 else {1}

    bad = verify_cover(CoverOracle(k=3, n=3, query_fn=bad_query), samples=200)
    assert not bad.ok
