#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace aisplan {

inline constexpr double kProbTolerance = 1e-9;
inline constexpr double kClampTolerance = 1e-12;

/// Probability distribution over {0, ..., n-1}.
/// Entries in [-1e-12, 0) are clamped to 0; the sum must be 1 within 1e-9.
class ProbVector {
public:
    ProbVector() = default;
    explicit ProbVector(std::vector<double> probs);

    static ProbVector uniform(std::size_t n);
    static ProbVector point_mass(std::size_t n, std::size_t i);

    std::size_t size() const { return p_.size(); }
    bool empty() const { return p_.empty(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& values() const { return p_; }
    std::span<const double> span() const { return p_; }
    auto begin() const { return p_.begin(); }
    auto end() const { return p_.end(); }

    bool operator==(const ProbVector&) const = default;

private:
    std::vector<double> p_;
};

/// Checks that v is a distribution; throws ModelError naming `what` otherwise.
void check_distribution(std::span<const double> v, const char* what);

/// Sparse distribution: (index, probability) pairs sorted by index, no zero entries.
using SparseDist = std::vector<std::pair<std::size_t, double>>;

SparseDist to_sparse(std::span<const double> dense);
std::vector<double> to_dense(const SparseDist& d, std::size_t n);
/// acc += w * d, keeping acc sorted.
void accumulate(SparseDist& acc, const SparseDist& d, double w);
void accumulate(SparseDist& acc, std::size_t index, double w);

/// Portable uniform double in [0, 1) from a 64-bit engine.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Samples an index from weights that sum to (about) one.
std::size_t sample_index(std::mt19937_64& rng, std::span<const double> probs);

} // namespace aisplan
