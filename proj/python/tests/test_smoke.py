import math

import pytest

import mcforge


def test_generate_and_verify():
    inst, q, e = mcforge.generate(40, 3, 6, seed="py")
    assert (inst.n, inst.k, inst.t, inst.m) == (40, 22, 3, 6)
    assert len(q) == inst.k and sum(e) == 3
    assert mcforge.verify(inst, q, e)
    flipped = list(e)
    flipped[0] ^= 1
    assert not mcforge.verify(inst, q, flipped)


def test_json_round_trip():
    inst, _, _ = mcforge.generate(40, 3, 6, seed="json")
    again = mcforge.Instance.from_json(inst.to_json())
    assert again.g_prime == inst.g_prime
    assert again.q_prime == inst.q_prime
    with pytest.raises(mcforge.IoError):
        mcforge.Instance.from_json("{}")


def test_mapping_and_solvers():
    inst, q, e = mcforge.generate(40, 3, 6, seed="solve")
    pl = mcforge.map_to_ising(inst)
    assert pl.num_vars == inst.k
    assert pl.objective(q) == 2 * inst.t
    assert pl.unsat_count(q) == inst.t
    assert mcforge.PLocal.from_text(pl.to_text()).to_text() == pl.to_text()

    st = mcforge.solve_stern(inst, seed="s")
    assert st["success"] and st["q"] == q and st["error"] == e

    pt = mcforge.solve_pt(pl, seed="p")
    assert pt["success"] and pt["q"] == q


def test_reductions_keep_ground_state():
    inst, q, _ = mcforge.generate(18, 2, 5, seed="reduce")
    pl = mcforge.map_to_ising(inst)
    r2 = mcforge.reduce_to_2local(pl)
    assert r2.locality() <= 2
    planted = sum(b << i for i, b in enumerate(q))
    _, configs = mcforge.ground_states(pl)
    assert configs == [planted]
    _, configs2 = mcforge.ground_states(r2, pl.num_vars)
    assert configs2 == [planted]


def test_statistics():
    assert mcforge.tts_from_success_prob(1.0, 0.01) == pytest.approx(458.2, rel=1e-4)
    with pytest.raises(mcforge.UsageError):
        mcforge.tts_from_success_prob(1.0, 0.0)
    assert mcforge.quantile([4, 1, 3, 2], 0.5) == pytest.approx(2.5)
    value, stderr, infinite = mcforge.tts_from_runtime_ranks([1.0, 2.0, math.inf], 0.99)
    assert infinite and math.isinf(value)
    fit = mcforge.fit_scaling([1, 2, 3, 4], [3, 5, 7, 9])
    assert fit["slope"] == pytest.approx(2.0)
    assert mcforge.stern_theoretical_tts(3488, 2720, 64, 1, "expected") == pytest.approx(159.7, abs=0.5)
    p = mcforge.stern_success_probability(40, 20, 4, 1)
    assert 0 < p < 1


def test_clustering():
    assert mcforge.forbidden_onset_eps() == pytest.approx(0.110, abs=1e-3)
    assert mcforge.rank_distribution(0) == pytest.approx(0.288788, rel=1e-5)
    assert mcforge.pair_probability_lshwm(16, 2) == pytest.approx((120 / 65536) ** 2)
    assert mcforge.expected_census("hwm", 4, 2, 2) == 24
    assert mcforge.phi("lshwm", 0.5, 0.5) == pytest.approx(2 * math.log(2))
    with pytest.raises(ValueError):
        mcforge.phi("nope", 0.1, 0.1)
