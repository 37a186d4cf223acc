#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace rrpolicy {

// Deterministic stream with a fully specified real-valued sampling path.
// std::normal_distribution is implementation-defined, so normals are drawn
// via Box-Muller over explicit 53-bit uniforms; output is stable across
// standard libraries for a given seed.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    // uniform double in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    Eigen::VectorXd normal_vector(int n);
    // row-major fill order
    Eigen::MatrixXd normal_matrix(int rows, int cols);

  private:
    std::mt19937_64 gen_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent substream for (master seed, salts...); used to make
// replications order- and thread-schedule-independent.
RandomStream derive_stream(std::uint64_t master, std::uint64_t salt_a, std::uint64_t salt_b = 0);

}  // namespace rrpolicy
