#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chemodem {

// Identifies one reproducible random stream: every stochastic routine takes a
// seeded Rng (or an RngSpec) so that a (master_seed, stream) pair pins the
// entire sequence of draws regardless of how many other streams exist.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
  public:
    explicit Rng(RngSpec spec) : gen_(derive(spec)) {}
    Rng(std::uint64_t master_seed, std::uint64_t stream) : Rng(RngSpec{master_seed, stream}) {}

    // Uniform on [0, 1), 53-bit resolution. Not std::uniform_real_distribution:
    // the standard leaves distribution algorithms implementation-defined and we
    // promise bit-identical streams for equal seeds.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; never returns 0 so log() is safe.
    double uniform_pos() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    std::uint64_t raw() { return gen_(); }

  private:
    static std::uint64_t derive(RngSpec spec) {
        std::uint64_t s = spec.master_seed ^ (0x9e3779b97f4a7c15ull * (spec.stream + 1));
        detail::splitmix64(s);
        return detail::splitmix64(s);
    }

    std::mt19937_64 gen_;
};

}  // namespace chemodem
