#include <doctest.h>

#include <cmath>

#include "chemodem/errors.hpp"
#include "chemodem/rdme.hpp"

using namespace chemodem;

TEST_SUITE_BEGIN("rdme");

namespace {

VoxelGrid reference_grid() {
    VoxelGrid g;
    g.nx = 6;
    g.ny = 6;
    g.nz = 3;
    g.voxel_width = 1.0 / 3.0;
    g.diffusion = 1.0;
    g.tx = {1, 2, 1};  // (2,3,2) in 1-based indexing
    g.rx = {4, 2, 1};  // (5,3,2) in 1-based indexing
    return g;
}

int count_reactions(const ReactionNetwork& net, const std::string& label) {
    int n = 0;
    for (const auto& r : net.reactions())
        if (r.label == label) ++n;
    return n;
}

}  // namespace

TEST_CASE("reference grid rates: jump 9/s per face, escape 0.18/s per exterior face") {
    VoxelGrid g = reference_grid();
    CHECK(g.jump_rate() == doctest::Approx(9.0));
    CHECK(g.escape_rate_per_face() == doctest::Approx(0.18));

    RdmeModel m = build_rdme(g, EmissionSchedule{150.0, 20.0, 0.0}, {0.135, 1.0, 40});
    // every diffusion reaction carries rate D/W^2
    for (const auto& r : m.network.reactions())
        if (r.label == "diffusion") CHECK(r.rate == doctest::Approx(9.0));
    // directed face-adjacent pairs: x: 5*6*3, y: 6*5*3, z: 6*6*2, both ways
    CHECK(count_reactions(m.network, "diffusion") == 2 * (90 + 90 + 72));
    // corner voxel escape rate = 3 faces * 0.18
    const Reaction* corner_escape = nullptr;
    int s000 = m.signal_species[static_cast<std::size_t>(g.index(0, 0, 0))];
    for (const auto& r : m.network.reactions())
        if (r.label == "escape" && r.reactants.size() == 1 && r.reactants[0].first == s000)
            corner_escape = &r;
    REQUIRE(corner_escape != nullptr);
    CHECK(corner_escape->rate == doctest::Approx(3 * 0.18));
    // activation uses g+ = 0.005 / W^3 = 0.135 on (S_rx, X)
    bool found_activation = false;
    for (const auto& r : m.network.reactions())
        if (r.label == "activation") {
            found_activation = true;
            CHECK(r.rate == doctest::Approx(0.135));
            REQUIRE(r.reactants.size() == 2);
            CHECK(r.reactants[0].first == m.receiver_species);
        }
    CHECK(found_activation);
}

TEST_CASE("interior voxel has 6 jumps out, corner voxel 3 jumps plus 3 escape faces") {
    VoxelGrid g = reference_grid();
    RdmeModel m = build_rdme(g, EmissionSchedule{150.0, 20.0, 0.0}, {0.135, 1.0, 40});
    auto jumps_out = [&](int voxel) {
        int species = m.signal_species[static_cast<std::size_t>(voxel)];
        int n = 0;
        for (const auto& r : m.network.reactions())
            if (r.label == "diffusion" && r.reactants[0].first == species) ++n;
        return n;
    };
    CHECK(jumps_out(g.index(2, 2, 1)) == 6);  // interior
    CHECK(jumps_out(g.index(0, 0, 0)) == 3);  // corner
    CHECK(g.exterior_faces(0, 0, 0) == 3);
    CHECK(g.exterior_faces(2, 2, 1) == 0);
}

TEST_CASE("single voxel without emission reduces to the co-located receptor model") {
    VoxelGrid g;
    g.nx = g.ny = g.nz = 1;
    g.voxel_width = 1.0;
    g.diffusion = 1.0;
    g.tx = {0, 0, 0};
    g.rx = {0, 0, 0};
    RdmeModel m = build_rdme(g, std::nullopt, {0.02, 0.5, 100});
    CHECK(m.network.species_count() == 3);  // S, X, X_active
    CHECK(count_reactions(m.network, "diffusion") == 0);
    CHECK(count_reactions(m.network, "activation") == 1);
    CHECK(count_reactions(m.network, "deactivation") == 1);
    CHECK(count_reactions(m.network, "escape") == 1);
    CHECK(m.gate_species == -1);
    CHECK(m.clamps.empty());
}

TEST_CASE("emission requires interior voxels and distinct endpoints") {
    VoxelGrid g = reference_grid();
    g.rx = g.tx;
    CHECK_THROWS_AS(build_rdme(g, EmissionSchedule{150.0, 20.0, 0.0}, {0.135, 1.0, 40}),
                    ConfigError);
    VoxelGrid flat = reference_grid();
    flat.nz = 2;  // 6x6x2 has no interior voxel
    flat.tx = {1, 2, 1};
    flat.rx = {4, 2, 1};
    CHECK_THROWS_AS(build_rdme(flat, EmissionSchedule{150.0, 20.0, 0.0}, {0.135, 1.0, 40}),
                    ConfigError);
    VoxelGrid bad = reference_grid();
    bad.tx = {7, 0, 0};
    CHECK_THROWS_AS(build_rdme(bad, EmissionSchedule{150.0, 20.0, 0.0}, {0.135, 1.0, 40}),
                    ConfigError);
    EmissionSchedule empty{};
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    EmissionSchedule below_basal{100.0, 20.0, 150.0};
    CHECK_THROWS_AS(below_basal.validate(), ConfigError);
}

TEST_CASE("steady state: zero rate gives zero, and the solution is linear in the rate") {
    VoxelGrid g = reference_grid();
    SteadyState zero = steady_state_mean(g, 0.0);
    CHECK(zero.receiver == 0.0);
    SteadyState one = steady_state_mean(g, 150.0);
    SteadyState two = steady_state_mean(g, 300.0);
    CHECK(one.receiver > 0.0);
    CHECK(two.receiver == doctest::Approx(2.0 * one.receiver).epsilon(1e-9));
    for (std::size_t v = 0; v < one.per_voxel.size(); ++v)
        CHECK(two.per_voxel[v] == doctest::Approx(2.0 * one.per_voxel[v]).epsilon(1e-9));
}

TEST_CASE("steady state matches the long-run time average of an SSA run") {
    VoxelGrid g = reference_grid();
    SteadyState ss = steady_state_mean(g, 150.0);

    RdmeModel m = build_rdme(g, EmissionSchedule{150.0, 400.0, 0.0}, {0.135, 1.0, 40});
    Rng rng(20260815, 0);
    Trajectory tr = time_varying_ssa(m.network, m.initial_state, m.clamps, 240.0, rng);
    StepSignal recv = tr.species_path(m.receiver_species);
    double avg = recv.integral(40.0, 240.0) / 200.0;  // skip the rise transient
    CHECK(avg == doctest::Approx(ss.receiver).epsilon(0.05));
}

TEST_CASE("mean trajectory: zero-free behaviour and convergence to steady state") {
    VoxelGrid g = reference_grid();
    SampledSeries rise = mean_trajectory(g, {600.0, 120.0, 0.0}, 120.0, 0.5);
    SteadyState ss = steady_state_mean(g, 600.0);
    for (double v : rise.values()) CHECK(v >= 0.0);
    CHECK(rise.value_at(120.0) == doctest::Approx(ss.receiver).epsilon(0.01));
    // monotone rise while the source is on
    for (std::size_t i = 1; i < rise.size(); ++i)
        CHECK(rise.values()[i] >= rise.values()[i - 1] - 1e-9);
}

TEST_CASE("mean trajectory agrees with a fine-step integration") {
    VoxelGrid g = reference_grid();
    SampledSeries coarse = mean_trajectory(g, {150.0, 20.0, 0.0}, 40.0, 0.5);
    // halving the sample step must not change shared samples beyond integrator error
    SampledSeries fine = mean_trajectory(g, {150.0, 20.0, 0.0}, 40.0, 0.25);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        double t = coarse.times()[i];
        CHECK(coarse.values()[i] == doctest::Approx(fine.value_at(t)).epsilon(1e-6));
    }
}

TEST_CASE("mass balance: with emission off, total signal count never increases") {
    VoxelGrid g = reference_grid();
    RdmeModel m = build_rdme(g, std::nullopt, {0.135, 1.0, 40});
    std::vector<long long> init = m.initial_state;
    // scatter some molecules around the lattice
    init[static_cast<std::size_t>(m.signal_species[static_cast<std::size_t>(g.index(2, 2, 1))])] = 200;
    init[static_cast<std::size_t>(m.signal_species[static_cast<std::size_t>(g.index(0, 0, 0))])] = 100;
    Rng rng(42, 9);
    Trajectory tr = ssa_simulate(m.network, init, 5.0, rng);
    long long total = 300;
    for (std::size_t i = 0; i < tr.event_count(); ++i) {
        long long delta_total = 0;
        for (auto [s, d] : tr.event_deltas(i)) {
            bool is_signal = s < static_cast<int>(m.signal_species.size());
            if (is_signal) delta_total += d;
        }
        CHECK(delta_total <= 0);
        total += delta_total;
        CHECK(total >= 0);
    }
}

TEST_CASE("mirrored transmitter/receiver placement gives identical receiver statistics") {
    VoxelGrid g = reference_grid();
    VoxelGrid mirror = g;
    mirror.tx = {g.nx - 1 - g.tx[0], g.tx[1], g.tx[2]};
    mirror.rx = {g.nx - 1 - g.rx[0], g.rx[1], g.rx[2]};
    SteadyState a = steady_state_mean(g, 150.0);
    SteadyState b = steady_state_mean(mirror, 150.0);
    CHECK(a.receiver == doctest::Approx(b.receiver).epsilon(1e-10));
    SampledSeries sa = mean_trajectory(g, {150.0, 20.0, 0.0}, 30.0, 1.0);
    SampledSeries sb = mean_trajectory(mirror, {150.0, 20.0, 0.0}, 30.0, 1.0);
    for (std::size_t i = 0; i < sa.size(); ++i)
        CHECK(sa.values()[i] == doctest::Approx(sb.values()[i]).epsilon(1e-10));
}

TEST_CASE("ensemble mean of SSA receiver paths matches the mean-field trajectory") {
    // small grid so 500 runs stay fast
    VoxelGrid g;
    g.nx = 4;
    g.ny = 4;
    g.nz = 3;
    g.voxel_width = 1.0 / 3.0;
    g.diffusion = 1.0;
    g.tx = {1, 1, 1};
    g.rx = {2, 2, 1};
    EmissionSchedule em{40.0, 4.0, 0.0};
    RdmeModel m = build_rdme(g, em, {0.135, 1.0, 10});
    const int runs = 500;
    const std::vector<double> sample_times{0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    std::vector<double> sum(sample_times.size(), 0.0);
    std::vector<double> sumsq(sample_times.size(), 0.0);
    for (int i = 0; i < runs; ++i) {
        Rng rng(777, static_cast<std::uint64_t>(i));
        Trajectory tr = time_varying_ssa(m.network, m.initial_state, m.clamps, 8.0, rng);
        StepSignal recv = tr.species_path(m.receiver_species);
        for (std::size_t j = 0; j < sample_times.size(); ++j) {
            double v = recv.value_at(sample_times[j]);
            sum[j] += v;
            sumsq[j] += v * v;
        }
    }
    SampledSeries mf = mean_trajectory(g, em, 8.0, 0.25);
    for (std::size_t j = 0; j < sample_times.size(); ++j) {
        double mean = sum[j] / runs;
        double var = (sumsq[j] - runs * mean * mean) / (runs - 1);
        double se = std::sqrt(std::max(var, 1e-12) / runs);
        double expected = mf.value_at(sample_times[j]);
        CHECK(std::abs(mean - expected) < 3.0 * se + 1e-6);
    }
}

TEST_SUITE_END();
