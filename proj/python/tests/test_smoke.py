import json

import pytest

import cakecut


def test_lab_baselines():
    assert cakecut.run_truthful("2ACC", "2acc")["points"] == [60, 120]
    assert cakecut.run_truthful("2SCC", "2scc")["points"][0] == 90
    res = cakecut.run_truthful("3DS", cakecut.load_profile("3ds"))
    assert res["proportional"]
    assert sorted(i for _, _, i in res["allocation"]) == sorted(set(i for _, _, i in res["allocation"]))


def test_best_response_and_bounds():
    br = cakecut.best_response("2ACC", "2acc")
    assert br["payoff"] == 120 and br["cuts"] == [430]
    ok, text = cakecut.verify_lemma(3)
    assert ok and "3SC" in text
    with pytest.raises(ValueError):
        cakecut.verify_lemma(7)


def test_valuation_and_learning():
    v = cakecut.Valuation(600, [(0, 600, 1)])
    assert v.total == 600 and v.value(0, 300) == 300
    assert cakecut.half_point(v) == 300
    cut, num, den = cakecut.plan(v, 2)
    assert num / den == pytest.approx(637.5)
    with pytest.raises(ValueError):
        cakecut.Valuation(10, [(5, 11, 1)])


def test_payment_and_batch():
    assert cakecut.payment([120, 80]) == pytest.approx(25.0)
    csv = cakecut.simulate_batch(alpha=1.0, repetitions=3, procedures=["2ACC"])
    assert csv.splitlines()[0] == "procedure,round,metric,tolerance,value"
    assert "2ACC,all,mean_points,,60" in csv


def test_session_service_round():
    svc = cakecut.SessionService()
    status, body = svc.create(json.dumps({"id": "py"}))
    assert status == 201
    status, body = svc.act("py", json.dumps({"cut": 120}))
    assert status == 200
    out = json.loads(body)
    assert out["outcome"] == "round_result"
    assert out["results"][0]["points"] == 60
    status, _ = svc.act("py", json.dumps({"cut": 9999}))
    assert status == 400
    status, _ = svc.payment("py")
    assert status == 409
