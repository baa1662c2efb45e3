#pragma once

#include <array>
#include <optional>
#include <vector>

#include "chemodem/crn.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

// Cuboid voxel lattice. Coordinates are 0-based (x, y, z); diffusion between
// face-adjacent voxels is a first-order jump at rate diffusion / width^2, and
// every exterior face leaks molecules out at that rate divided by
// escape_divisor (absorbing surroundings).
struct VoxelGrid {
    int nx = 0, ny = 0, nz = 0;
    double voxel_width = 0.0;   // micrometres
    double diffusion = 0.0;     // um^2 / s
    std::array<int, 3> tx{0, 0, 0};
    std::array<int, 3> rx{0, 0, 0};
    double escape_divisor = 50.0;

    int voxel_count() const { return nx * ny * nz; }
    int interior_count() const {
        auto clamp0 = [](int v) { return v > 0 ? v : 0; };
        return clamp0(nx - 2) * clamp0(ny - 2) * clamp0(nz - 2);
    }
    int index(int x, int y, int z) const { return (z * ny + y) * nx + x; }
    int index(const std::array<int, 3>& c) const { return index(c[0], c[1], c[2]); }
    double jump_rate() const { return diffusion / (voxel_width * voxel_width); }
    double escape_rate_per_face() const { return jump_rate() / escape_divisor; }
    int exterior_faces(int x, int y, int z) const;
    void validate() const;
};

struct EmissionSchedule {
    double on_rate = 0.0;      // molecules per second while transmitting
    double on_duration = 0.0;  // seconds of ON time from t = 0
    double basal_rate = 0.0;   // leakage when OFF (and ON)

    void validate() const;  // on_rate > basal_rate >= 0, on_duration > 0
};

// Full stochastic model: diffusing signal + emission gate + receiver receptors.
struct RdmeModel {
    ReactionNetwork network;
    std::vector<int> signal_species;  // voxel index -> species
    int gate_species = -1;            // emission indicator, clamped to {1, 0}
    int receiver_species = -1;        // signal species at the rx voxel
    int inactive_species = -1;
    int active_species = -1;
    std::vector<long long> initial_state;
    std::vector<ClampedSpecies> clamps;
    double binding_rate = 0.0;
};

// Pass nullopt for a silent transmitter (reduces to the co-located receptor
// model in a leaky voxel). With emission present the grid must have interior
// voxels and distinct transmitter/receiver.
RdmeModel build_rdme(const VoxelGrid& grid, const std::optional<EmissionSchedule>& emission,
                     const ReceptorParams& receptors);

// Mean-field (linear ODE) solutions for the signal subsystem, which is exact in
// expectation because receptor binding does not consume signal molecules.
struct SteadyState {
    std::vector<double> per_voxel;
    double receiver = 0.0;
};

SteadyState steady_state_mean(const VoxelGrid& grid, double emission_rate);

// Expected receiver count over time under the given schedule, sampled every
// sample_dt seconds (fixed-step RK4 inside).
SampledSeries mean_trajectory(const VoxelGrid& grid, const EmissionSchedule& emission,
                              double horizon, double sample_dt);

}  // namespace chemodem
