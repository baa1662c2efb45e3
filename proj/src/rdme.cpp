#include "chemodem/rdme.hpp"

#include <cmath>
#include <string>

#include "chemodem/errors.hpp"

namespace chemodem {

int VoxelGrid::exterior_faces(int x, int y, int z) const {
    int f = 0;
    if (x == 0) ++f;
    if (x == nx - 1) ++f;
    if (y == 0) ++f;
    if (y == ny - 1) ++f;
    if (z == 0) ++f;
    if (z == nz - 1) ++f;
    return f;
}

void VoxelGrid::validate() const {
    if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("grid dimensions must be at least 1");
    if (!(voxel_width > 0.0)) throw ConfigError("voxel width must be positive");
    if (!(diffusion > 0.0)) throw ConfigError("diffusion coefficient must be positive");
    if (!(escape_divisor > 0.0)) throw ConfigError("escape divisor must be positive");
    auto in_range = [this](const std::array<int, 3>& c) {
        return c[0] >= 0 && c[0] < nx && c[1] >= 0 && c[1] < ny && c[2] >= 0 && c[2] < nz;
    };
    if (!in_range(tx)) throw ConfigError("transmitter voxel outside the grid");
    if (!in_range(rx)) throw ConfigError("receiver voxel outside the grid");
}

void EmissionSchedule::validate() const {
    if (!(basal_rate >= 0.0)) throw ConfigError("basal emission rate must be non-negative");
    if (!(on_rate > basal_rate)) throw ConfigError("emission rate must exceed the basal rate");
    if (!(on_duration > 0.0)) throw ConfigError("emission duration must be positive");
}

RdmeModel build_rdme(const VoxelGrid& grid, const std::optional<EmissionSchedule>& emission,
                     const ReceptorParams& receptors) {
    grid.validate();
    if (emission) {
        emission->validate();
        if (grid.interior_count() == 0)
            throw ConfigError("grid with zero interior voxels cannot host a transmitter");
        if (grid.tx == grid.rx)
            throw ConfigError("transmitter and receiver voxel must differ");
    }
    if (!(receptors.binding_rate > 0.0) || !(receptors.unbinding_rate > 0.0))
        throw ConfigError("receptor rates must be positive");
    if (receptors.count < 1) throw ConfigError("receptor count must be at least 1");

    RdmeModel m;
    m.binding_rate = receptors.binding_rate;
    m.signal_species.resize(static_cast<std::size_t>(grid.voxel_count()));
    for (int z = 0; z < grid.nz; ++z)
        for (int y = 0; y < grid.ny; ++y)
            for (int x = 0; x < grid.nx; ++x)
                m.signal_species[static_cast<std::size_t>(grid.index(x, y, z))] =
                    m.network.add_species("S[" + std::to_string(x) + "," + std::to_string(y) +
                                          "," + std::to_string(z) + "]");
    if (emission) m.gate_species = m.network.add_species("E");
    m.inactive_species = m.network.add_species("X");
    m.active_species = m.network.add_species("X_active");
    m.receiver_species = m.signal_species[static_cast<std::size_t>(grid.index(grid.rx))];

    const double jump = grid.jump_rate();
    auto add_jump = [&](int from, int to) {
        Reaction r;
        r.reactants = {{m.signal_species[static_cast<std::size_t>(from)], 1}};
        r.products = {{m.signal_species[static_cast<std::size_t>(to)], 1}};
        r.rate = jump;
        r.label = "diffusion";
        m.network.add_reaction(std::move(r));
    };
    for (int z = 0; z < grid.nz; ++z)
        for (int y = 0; y < grid.ny; ++y)
            for (int x = 0; x < grid.nx; ++x) {
                int v = grid.index(x, y, z);
                if (x + 1 < grid.nx) {
                    add_jump(v, grid.index(x + 1, y, z));
                    add_jump(grid.index(x + 1, y, z), v);
                }
                if (y + 1 < grid.ny) {
                    add_jump(v, grid.index(x, y + 1, z));
                    add_jump(grid.index(x, y + 1, z), v);
                }
                if (z + 1 < grid.nz) {
                    add_jump(v, grid.index(x, y, z + 1));
                    add_jump(grid.index(x, y, z + 1), v);
                }
                int faces = grid.exterior_faces(x, y, z);
                if (faces > 0) {
                    Reaction esc;
                    esc.reactants = {{m.signal_species[static_cast<std::size_t>(v)], 1}};
                    esc.rate = grid.escape_rate_per_face() * faces;
                    esc.label = "escape";
                    m.network.add_reaction(std::move(esc));
                }
            }

    if (emission) {
        int tx_species = m.signal_species[static_cast<std::size_t>(grid.index(grid.tx))];
        Reaction emit;
        emit.reactants = {{m.gate_species, 1}};
        emit.products = {{m.gate_species, 1}, {tx_species, 1}};
        emit.rate = emission->on_rate - emission->basal_rate;
        emit.label = "emission";
        m.network.add_reaction(std::move(emit));
        if (emission->basal_rate > 0.0) {
            Reaction basal;
            basal.products = {{tx_species, 1}};
            basal.rate = emission->basal_rate;
            basal.label = "basal-emission";
            m.network.add_reaction(std::move(basal));
        }
    }

    Reaction activation;
    activation.reactants = {{m.receiver_species, 1}, {m.inactive_species, 1}};
    activation.products = {{m.receiver_species, 1}, {m.active_species, 1}};
    activation.rate = receptors.binding_rate;
    activation.label = "activation";
    m.network.add_reaction(std::move(activation));
    Reaction deactivation;
    deactivation.reactants = {{m.active_species, 1}};
    deactivation.products = {{m.inactive_species, 1}};
    deactivation.rate = receptors.unbinding_rate;
    deactivation.label = "deactivation";
    m.network.add_reaction(std::move(deactivation));

    m.initial_state.assign(static_cast<std::size_t>(m.network.species_count()), 0);
    m.initial_state[static_cast<std::size_t>(m.inactive_species)] = receptors.count;
    if (emission) {
        m.initial_state[static_cast<std::size_t>(m.gate_species)] = 1;
        m.clamps.push_back(
            {m.gate_species, StepSignal({0.0, emission->on_duration}, {1.0, 0.0})});
    }
    return m;
}

namespace {

// Dense drift matrix of the signal mean: dn/dt = A n + r(t) e_tx.
std::vector<double> drift_matrix(const VoxelGrid& grid) {
    int n = grid.voxel_count();
    std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    auto at = [&](int row, int col) -> double& {
        return a[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(col)];
    };
    const double jump = grid.jump_rate();
    for (int z = 0; z < grid.nz; ++z)
        for (int y = 0; y < grid.ny; ++y)
            for (int x = 0; x < grid.nx; ++x) {
                int v = grid.index(x, y, z);
                auto couple = [&](int w) {
                    at(w, v) += jump;
                    at(v, v) -= jump;
                    at(v, w) += jump;
                    at(w, w) -= jump;
                };
                if (x + 1 < grid.nx) couple(grid.index(x + 1, y, z));
                if (y + 1 < grid.ny) couple(grid.index(x, y + 1, z));
                if (z + 1 < grid.nz) couple(grid.index(x, y, z + 1));
                at(v, v) -= grid.escape_rate_per_face() * grid.exterior_faces(x, y, z);
            }
    return a;
}

// Solves M x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<double> m, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    auto at = [&](int r, int c) -> double& {
        return m[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(c)];
    };
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
        if (std::abs(at(pivot, col)) < 1e-300)
            throw SimulationError("steady-state system is singular");
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(at(pivot, c), at(col, c));
            std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = at(r, col) / at(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) acc -= at(r, c) * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = acc / at(r, r);
    }
    return x;
}

}  // namespace

SteadyState steady_state_mean(const VoxelGrid& grid, double emission_rate) {
    grid.validate();
    if (!(emission_rate >= 0.0)) throw ConfigError("emission rate must be non-negative");
    SteadyState out;
    int n = grid.voxel_count();
    if (emission_rate == 0.0) {
        out.per_voxel.assign(static_cast<std::size_t>(n), 0.0);
        out.receiver = 0.0;
        return out;
    }
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    rhs[static_cast<std::size_t>(grid.index(grid.tx))] = -emission_rate;
    out.per_voxel = solve_dense(drift_matrix(grid), std::move(rhs));
    for (double v : out.per_voxel)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw SimulationError("steady-state solution is not non-negative/finite");
    out.receiver = out.per_voxel[static_cast<std::size_t>(grid.index(grid.rx))];
    return out;
}

SampledSeries mean_trajectory(const VoxelGrid& grid, const EmissionSchedule& emission,
                              double horizon, double sample_dt) {
    grid.validate();
    emission.validate();
    if (!(horizon > 0.0) || !(sample_dt > 0.0))
        throw ConfigError("horizon and sample_dt must be positive");

    const int n = grid.voxel_count();
    const std::vector<double> a = drift_matrix(grid);
    const int tx = grid.index(grid.tx);
    const int rx = grid.index(grid.rx);

    auto deriv = [&](const std::vector<double>& x, double rate, std::vector<double>& dx) {
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            const double* row = a.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n);
            for (int c = 0; c < n; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
            dx[static_cast<std::size_t>(r)] = acc;
        }
        dx[static_cast<std::size_t>(tx)] += rate;
    };

    // Fixed-step RK4, step bounded well inside the stability region of the
    // fastest lattice mode and snapped to the emission switch time.
    const double stiff_limit = 0.25 / (6.0 * grid.jump_rate() + 1e-30);
    const double base_step = std::min({sample_dt, stiff_limit, 2.5e-3});

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> k1(x), k2(x), k3(x), k4(x), tmp(x);
    auto rate_at = [&](double t) {
        return t < emission.on_duration ? emission.on_rate : emission.basal_rate;
    };

    std::vector<double> samples{0.0};
    auto n_samples = static_cast<std::size_t>(horizon / sample_dt + 1e-9);
    double t = 0.0;
    for (std::size_t i = 1; i <= n_samples; ++i) {
        double target = sample_dt * static_cast<double>(i);
        while (t < target - 1e-12) {
            double step = std::min(base_step, target - t);
            if (t < emission.on_duration && t + step > emission.on_duration)
                step = emission.on_duration - t;
            double r0 = rate_at(t);
            double rh = rate_at(t + 0.5 * step);
            double r1 = rate_at(t + step * (1.0 - 1e-12));
            deriv(x, r0, k1);
            for (int j = 0; j < n; ++j)
                tmp[static_cast<std::size_t>(j)] =
                    x[static_cast<std::size_t>(j)] + 0.5 * step * k1[static_cast<std::size_t>(j)];
            deriv(tmp, rh, k2);
            for (int j = 0; j < n; ++j)
                tmp[static_cast<std::size_t>(j)] =
                    x[static_cast<std::size_t>(j)] + 0.5 * step * k2[static_cast<std::size_t>(j)];
            deriv(tmp, rh, k3);
            for (int j = 0; j < n; ++j)
                tmp[static_cast<std::size_t>(j)] =
                    x[static_cast<std::size_t>(j)] + step * k3[static_cast<std::size_t>(j)];
            deriv(tmp, r1, k4);
            for (int j = 0; j < n; ++j)
                x[static_cast<std::size_t>(j)] +=
                    step / 6.0 *
                    (k1[static_cast<std::size_t>(j)] + 2.0 * k2[static_cast<std::size_t>(j)] +
                     2.0 * k3[static_cast<std::size_t>(j)] + k4[static_cast<std::size_t>(j)]);
            t += step;
        }
        t = target;
        samples.push_back(x[static_cast<std::size_t>(rx)]);
    }
    return SampledSeries::uniform(0.0, sample_dt, std::move(samples));
}

}  // namespace chemodem
