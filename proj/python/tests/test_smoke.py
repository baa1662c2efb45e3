import math

import pytest

import chemodem as cd


def test_hill_fit_matches_target():
    p = cd.fit_hill(11.0)
    assert not p.degraded
    assert p.h == pytest.approx(2.33134, rel=1e-3)
    assert p.H == pytest.approx(9.85182, rel=1e-3)
    assert p.n == pytest.approx(2.02529, rel=1e-3)
    assert cd.hill_eval(p, 11.0) == pytest.approx(1.29526, rel=1e-3)
    # the clamped target at q = a
    assert cd.hill_target(11.0, 11.0) == pytest.approx(math.log(11.0) - 1.0)


def test_phi_values():
    assert cd.phi(58.0, 58.0) == pytest.approx(math.log(58.0) - 1.0)
    assert cd.phi(58.0, 11.0) == pytest.approx(math.log(11.0) - 11.0 / 58.0)
    # maximal at z = a
    assert cd.phi(58.0, 58.0) > cd.phi(58.0, 11.0)


def test_signals():
    s = cd.StepSignal([0.0, 2.0], [3.0, 1.0])
    assert s.value_at(1.9) == 3.0
    assert s.value_at(2.0) == 1.0
    assert s.integral(0.0, 4.0) == pytest.approx(3.0 * 2 + 1.0 * 2)
    u = cd.SampledSeries.uniform(0.0, 0.5, [0.0, 1.0, 2.0])
    assert u.value_at(0.25) == pytest.approx(0.5)
    assert len(u) == 3


def test_channel_determinism_and_filter():
    cfg = cd.colocated_defaults()
    cfg.master_seed = 5
    a = cd.simulate_channel(cfg, 1, 0)
    b = cd.simulate_channel(cfg, 1, 0)
    assert a.xstar.times == b.xstar.times
    assert a.xstar.values == b.xstar.values
    assert cd.simulate_channel(cfg, 1, 1).xstar.times != a.xstar.times

    bank = cd.build_hypothesis_bank(cfg)
    assert bank.amplitudes == [11.0, 58.0]
    scores = [
        cd.exact_filter(a.xstar, bank.references[h], cfg.receptors,
                        cfg.log_prior(h), cfg.horizon).at_time(50.0)
        for h in range(2)
    ]
    assert scores[1] > scores[0]


def test_ber_experiment_structure():
    text = """
[experiment]
scenario = colocated
runs = 3
horizon = 12
master_seed = 11

[decision]
times = 6 12
"""
    cfg = cd.experiment_from_text(text)
    res = cd.run_ber_experiment(cfg, ["history-filter", "one-sample"])
    assert [s.method for s in res.methods] == ["history-filter", "one-sample"]
    for series in res.methods:
        assert [p.time for p in series.points] == [6.0, 12.0]
        for p in series.points:
            assert p.runs_per_symbol == 3
            assert 0.0 <= p.ber <= 1.0
    again = cd.run_ber_experiment(cfg, ["history-filter", "one-sample"])
    assert [p.ber for p in again.methods[0].points] == [p.ber for p in res.methods[0].points]


def test_config_errors_map_to_value_error():
    with pytest.raises(cd.ConfigError):
        cd.experiment_from_text("[experiment]\nruns = 0\n")
    assert issubclass(cd.ConfigError, ValueError)
    with pytest.raises(cd.ConfigError):
        cd.experiment_from_text("[experiment]\nscenario = warp\n")


def test_annihilation_circuit():
    scenarios = cd.appendix_c_scenarios()
    assert len(scenarios) == 2
    for sc in scenarios:
        det = cd.deterministic_annihilation(sc.impulses, len(sc.expected))
        assert det.final_counts == sc.expected
        prods = cd.impulse_productions(sc.impulses, len(sc.expected))
        rng = cd.Rng(1, 2)
        series = cd.annihilate(prods, 1e4, 12.0, rng)
        assert series.at(12.0) == sc.expected
    assert cd.decide([5, 5, 3]) == 0
    assert cd.decide([1, 7, 7]) == 1


def test_one_sample_baseline():
    r = cd.one_sample_baseline([1, 2, 3], [10, 11, 12], 20)
    assert r.ber == 0.0
    assert r.threshold == 4


def test_dcs2_model():
    params = cd.Dcs2Params()
    params.refresh_hill()
    msn2 = cd.pulse_train(1410.1, 1, 20.0, 1.0)
    traj = cd.simulate_dcs2(params, msn2, 160.0)
    assert traj.myfp_at(0.0) == 0.0
    assert traj.max_myfp() > 0.0
    # mYFP matures after the pulse ends, so the late value dominates the early one
    assert traj.myfp_at(120.0) > traj.myfp_at(10.0)


def test_diffusion_steady_state_linearity():
    cfg = cd.diffusion_defaults()
    hi = cd.steady_state_mean(cfg.grid, 600.0).receiver
    lo = cd.steady_state_mean(cfg.grid, 150.0).receiver
    assert hi == pytest.approx(22.1749, rel=1e-3)
    assert hi == pytest.approx(4.0 * lo, rel=1e-9)
    mf = cd.mean_trajectory(cfg.grid, cd.EmissionSchedule(600.0, 5.0), 8.0, 0.5)
    assert mf.value_at(8.0) < mf.value_at(5.0)  # decays after the pulse
