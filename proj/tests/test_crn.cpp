#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chemodem/crn.hpp"
#include "chemodem/errors.hpp"

using namespace chemodem;

TEST_SUITE_BEGIN("crn");

namespace {

// Mean active-receptor count of the linear relaxation x' = g+ S (M - x) - g- x
// with S held constant: closed-form exponential approach to the fixed point.
double receptor_mean(double x0, double signal, const ReceptorParams& p, double t) {
    double total = p.binding_rate * signal + p.unbinding_rate;
    double x_inf = p.count * p.binding_rate * signal / total;
    return x_inf + (x0 - x_inf) * std::exp(-total * t);
}

ReactionNetwork decay_network() {
    ReactionNetwork net;
    int a = net.add_species("A");
    Reaction r;
    r.reactants = {{a, 1}};
    r.rate = 1.0;
    net.add_reaction(std::move(r));
    return net;
}

}  // namespace

TEST_CASE("propensity follows falling-factorial mass action") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    std::vector<long long> state{58, 100, 0};  // S, X, X_active
    CHECK(propensity(m.network.reaction(0), state) == doctest::Approx(0.02 * 58 * 100));
    CHECK(propensity(m.network.reaction(1), state) == 0.0);  // X_active absent
    state = {58, 60, 40};
    CHECK(propensity(m.network.reaction(1), state) == doctest::Approx(0.5 * 40));

    // second-order in one species uses x(x-1)
    ReactionNetwork net;
    int y = net.add_species("Y");
    Reaction pair;
    pair.reactants = {{y, 2}};
    pair.rate = 3.0;
    net.add_reaction(std::move(pair));
    std::vector<long long> ystate{5};
    CHECK(propensity(net.reaction(0), ystate) == doctest::Approx(3.0 * 5 * 4));
    ystate = {1};
    CHECK(propensity(net.reaction(0), ystate) == 0.0);
}

TEST_CASE("network construction validates input") {
    ReactionNetwork net;
    int a = net.add_species("A");
    CHECK_THROWS_AS(net.add_species("A"), ConfigError);
    Reaction bad;
    bad.reactants = {{a + 5, 1}};
    bad.rate = 1.0;
    CHECK_THROWS_AS(net.add_reaction(bad), ConfigError);
    bad.reactants = {{a, 0}};
    CHECK_THROWS_AS(net.add_reaction(bad), ConfigError);
    bad.reactants = {{a, 1}, {a, 1}};
    CHECK_THROWS_AS(net.add_reaction(bad), ConfigError);
    bad.reactants = {{a, 1}};
    bad.rate = -2.0;
    CHECK_THROWS_AS(net.add_reaction(bad), ConfigError);
    bad.rate = 0.0;
    CHECK_THROWS_AS(net.add_reaction(bad), ConfigError);
}

TEST_CASE("empty reaction list holds state to the horizon") {
    ReactionNetwork net;
    net.add_species("A");
    Rng rng(1, 0);
    Trajectory tr = ssa_simulate(net, {7}, 5.0, rng);
    CHECK(tr.event_count() == 0);
    CHECK(tr.state_at(5.0) == std::vector<long long>{7});
    tr.validate();
}

TEST_CASE("pure decay matches the exponential mean") {
    ReactionNetwork net = decay_network();
    const int runs = 500;
    const long long a0 = 1000;
    double sum = 0.0;
    for (int i = 0; i < runs; ++i) {
        Rng rng(2024, static_cast<std::uint64_t>(i));
        Trajectory tr = ssa_simulate(net, {a0}, 1.0, rng);
        sum += static_cast<double>(tr.state_at(1.0)[0]);
    }
    double mean = sum / runs;
    double p = std::exp(-1.0);
    double expected = static_cast<double>(a0) * p;
    double se = std::sqrt(static_cast<double>(a0) * p * (1.0 - p) / runs);
    CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("two-state receptor long-run active fraction matches the stationary formula") {
    ReceptorParams params{0.02, 0.5, 100};
    ReceptorModel m = make_receptor_model(params);
    const double a = 58.0;
    Rng rng(77, 0);
    const double horizon = 2000.0;
    // time-average of the active fraction over one long run, skipping the transient
    double weighted = 0.0;
    Trajectory tr = ssa_simulate(m.network, {58, 100, 0}, horizon, rng);
    StepSignal path = tr.species_path(m.active_species);
    const double burn = 50.0;
    weighted = path.integral(burn, horizon) / (horizon - burn);
    double expected = params.count * params.binding_rate * a /
                      (params.binding_rate * a + params.unbinding_rate);
    CHECK(weighted / params.count ==
          doctest::Approx(expected / params.count).epsilon(0.02));
}

TEST_CASE("receptor conservation holds at every event") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    Rng rng(5, 1);
    Trajectory tr = ssa_simulate(m.network, {58, 100, 0}, 20.0, rng);
    tr.validate();
    CHECK(tr.event_count() > 100);
    std::vector<long long> x = tr.initial_state;
    for (std::size_t i = 0; i < tr.event_count(); ++i) {
        for (auto [s, d] : tr.event_deltas(i)) x[static_cast<std::size_t>(s)] += d;
        CHECK(x[1] + x[2] == 100);
        CHECK(x[0] == 58);  // catalytic: signal is never consumed
    }
}

TEST_CASE("same rng spec gives identical trajectories, different streams differ") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    Rng r1(99, 3);
    Rng r2(99, 3);
    Rng r3(99, 4);
    Trajectory a = ssa_simulate(m.network, {58, 100, 0}, 10.0, r1);
    Trajectory b = ssa_simulate(m.network, {58, 100, 0}, 10.0, r2);
    Trajectory c = ssa_simulate(m.network, {58, 100, 0}, 10.0, r3);
    CHECK(a.times == b.times);
    CHECK(a.deltas == b.deltas);
    CHECK(a.times != c.times);
}

TEST_CASE("stationary distribution of a 3-state receptor chain passes a chi-square test") {
    // M = 2 receptors, S clamped at 58: stationary law is Binomial(2, p) with
    // p = g+ a / (g+ a + g-). 10^4 end-of-run samples, chi-square with 2 dof;
    // the 1% critical value is 9.210.
    ReceptorParams params{0.02, 0.5, 2};
    ReceptorModel m = make_receptor_model(params);
    const double a = 58.0;
    double p = params.binding_rate * a / (params.binding_rate * a + params.unbinding_rate);
    const int runs = 10000;
    int observed[3] = {0, 0, 0};
    for (int i = 0; i < runs; ++i) {
        Rng rng(31415, static_cast<std::uint64_t>(i));
        Trajectory tr = ssa_simulate(m.network, {58, 2, 0}, 30.0, rng);
        observed[tr.count_at(m.active_species, 30.0)]++;
    }
    double expected[3] = {runs * (1 - p) * (1 - p), runs * 2 * p * (1 - p), runs * p * p};
    double chi2 = 0.0;
    for (int k = 0; k < 3; ++k)
        chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    CHECK(chi2 < 9.210);
}

TEST_CASE("single-level clamp is identical to a plain simulation") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    Rng r1(123, 5);
    Rng r2(123, 5);
    Trajectory plain = ssa_simulate(m.network, {58, 100, 0}, 15.0, r1);
    std::vector<ClampedSpecies> clamps{{m.signal_species, StepSignal::constant(58.0)}};
    Trajectory clamped = time_varying_ssa(m.network, {0, 100, 0}, clamps, 15.0, r2);
    CHECK(plain.times == clamped.times);
    CHECK(plain.deltas == clamped.deltas);
    CHECK(clamped.initial_state == std::vector<long long>{58, 100, 0});
}

TEST_CASE("rectangular pulse ensemble means match the stationary formula on both sides") {
    ReceptorParams params{0.02, 0.5, 100};
    ReceptorModel m = make_receptor_model(params);
    std::vector<ClampedSpecies> clamps{
        {m.signal_species, StepSignal({0.0, 50.0}, {58.0, 1.0})}};
    const int runs = 200;
    double mean_on = 0.0, mean_off = 0.0;
    for (int i = 0; i < runs; ++i) {
        Rng rng(271828, static_cast<std::uint64_t>(i));
        Trajectory tr = time_varying_ssa(m.network, {0, 100, 0}, clamps, 65.0, rng);
        mean_on += static_cast<double>(tr.count_at(m.active_species, 50.0));
        mean_off += static_cast<double>(tr.count_at(m.active_species, 65.0));
    }
    mean_on /= runs;
    mean_off /= runs;
    double x_on = receptor_mean(0.0, 58.0, params, 50.0);
    double x_off = receptor_mean(x_on, 1.0, params, 15.0);
    // binomial-scale noise: sd <= 5 per run, 200 runs -> se <= 0.36
    CHECK(std::abs(mean_on - x_on) < 1.1);
    CHECK(std::abs(mean_off - x_off) < 1.1);
}

TEST_CASE("zero-amplitude clamp never activates") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    std::vector<ClampedSpecies> clamps{{m.signal_species, StepSignal::constant(0.0)}};
    Rng rng(8, 0);
    Trajectory tr = time_varying_ssa(m.network, {99, 100, 0}, clamps, 50.0, rng);
    CHECK(tr.event_count() == 0);
    CHECK(tr.count_at(m.active_species, 50.0) == 0);
}

TEST_CASE("clamp schedules are validated") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 100});
    Rng rng(8, 0);
    std::vector<ClampedSpecies> gap{{m.signal_species, StepSignal({2.0, 5.0}, {1.0, 2.0})}};
    CHECK_THROWS_AS(time_varying_ssa(m.network, {0, 100, 0}, gap, 10.0, rng), ConfigError);
    std::vector<ClampedSpecies> frac{{m.signal_species, StepSignal::constant(1.5)}};
    CHECK_THROWS_AS(time_varying_ssa(m.network, {0, 100, 0}, frac, 10.0, rng), ConfigError);
    std::vector<ClampedSpecies> negative{{m.signal_species, StepSignal::constant(-2.0)}};
    CHECK_THROWS_AS(time_varying_ssa(m.network, {0, 100, 0}, negative, 10.0, rng), ConfigError);
    std::vector<ClampedSpecies> dup{{m.signal_species, StepSignal::constant(1.0)},
                                    {m.signal_species, StepSignal::constant(2.0)}};
    CHECK_THROWS_AS(time_varying_ssa(m.network, {0, 100, 0}, dup, 10.0, rng), ConfigError);
    std::vector<ClampedSpecies> unknown{{17, StepSignal::constant(1.0)}};
    CHECK_THROWS_AS(time_varying_ssa(m.network, {0, 100, 0}, unknown, 10.0, rng), ConfigError);
}

TEST_CASE("state_at is right-continuous and species paths track jumps") {
    Trajectory tr;
    tr.initial_state = {10, 0};
    tr.horizon = 4.0;
    tr.times = {1.0, 3.0};
    tr.deltas = {{0, -1}, {1, 1}, {0, -2}, {1, 2}};
    tr.offsets = {0, 2, 4};
    tr.validate();
    CHECK(tr.state_at(0.999999) == std::vector<long long>{10, 0});
    CHECK(tr.state_at(1.0) == std::vector<long long>{9, 1});
    CHECK(tr.state_at(3.5) == std::vector<long long>{7, 3});
    StepSignal p = tr.species_path(1);
    CHECK(p.value_at(0.0) == 0.0);
    CHECK(p.value_at(1.0) == 1.0);
    CHECK(p.value_at(2.9) == 1.0);
    CHECK(p.value_at(3.0) == 3.0);
}

TEST_CASE("trajectory validation catches corrupt data") {
    Trajectory tr;
    tr.initial_state = {1};
    tr.horizon = 2.0;
    tr.times = {1.0, 0.5};
    tr.deltas = {{0, 1}, {0, 1}};
    tr.offsets = {0, 1, 2};
    CHECK_THROWS_AS(tr.validate(), SimulationError);
    tr.times = {0.5, 1.0};
    tr.deltas = {{0, -1}, {0, -1}};
    CHECK_THROWS_AS(tr.validate(), SimulationError);  // count would go negative
}

TEST_CASE("event list export replays to identical states") {
    ReceptorModel m = make_receptor_model({0.02, 0.5, 50});
    std::vector<ClampedSpecies> clamps{
        {m.signal_species, StepSignal({0.0, 3.0}, {30.0, 2.0})}};
    Rng rng(55, 2);
    Trajectory tr = time_varying_ssa(m.network, {0, 50, 0}, clamps, 6.0, rng);
    REQUIRE(tr.event_count() > 10);

    std::stringstream io;
    tr.write_events(io, m.network.species());
    std::vector<std::string> names;
    Trajectory back = Trajectory::read_events(io, &names);

    CHECK(names == m.network.species());
    CHECK(back.horizon == tr.horizon);
    CHECK(back.initial_state == tr.initial_state);
    CHECK(back.times == tr.times);
    CHECK(back.deltas == tr.deltas);
    for (double t : {0.0, 1.0, 2.999, 3.0, 5.5, 6.0})
        CHECK(back.state_at(t) == tr.state_at(t));
}

TEST_CASE("grid csv export quotes species names containing commas") {
    ReactionNetwork net;
    int s = net.add_species("S[1,2,1]");
    Reaction r;
    r.reactants = {{s, 1}};
    r.rate = 0.2;
    net.add_reaction(std::move(r));
    Rng rng(3, 3);
    Trajectory tr = ssa_simulate(net, {5}, 1.0, rng);
    std::ostringstream os;
    tr.write_grid_csv(os, net.species(), 0.5);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "time,\"S[1,2,1]\"");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);  // t = 0, 0.5, 1.0
}

TEST_CASE("propensity overflow is reported as a simulation error") {
    ReactionNetwork net;
    int a = net.add_species("A");
    int b = net.add_species("B");
    Reaction r;
    r.reactants = {{a, 1}, {b, 1}};
    r.rate = 1e300;
    net.add_reaction(std::move(r));
    Rng rng(1, 1);
    CHECK_THROWS_AS(ssa_simulate(net, {1000000, 1000000}, 1.0, rng), SimulationError);
}

TEST_SUITE_END();
