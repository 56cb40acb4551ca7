#include "aisplan/prob.hpp"

#include "aisplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aisplan {

ProbVector::ProbVector(std::vector<double> probs) : p_(std::move(probs)) {
    for (auto& x : p_) {
        if (!std::isfinite(x)) throw ModelError("probability entry is not finite");
        if (x < 0) {
            if (x < -kClampTolerance)
                throw ModelError("negative probability entry " + std::to_string(x));
            x = 0;
        }
    }
    check_distribution(p_, "probability vector");
}

ProbVector ProbVector::uniform(std::size_t n) {
    if (n == 0) throw ModelError("uniform distribution over an empty set");
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point_mass(std::size_t n, std::size_t i) {
    if (i >= n) throw ModelError("point mass index out of range");
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    return ProbVector(std::move(v));
}

void check_distribution(std::span<const double> v, const char* what) {
    if (v.empty()) throw ModelError(std::string(what) + ": empty distribution");
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] < -kClampTolerance)
            throw ModelError(std::string(what) + ": invalid entry at index " +
                             std::to_string(i));
        s += v[i];
    }
    if (std::abs(s - 1.0) > kProbTolerance)
        throw ModelError(std::string(what) + ": row not stochastic (sum " + std::to_string(s) +
                         ")");
}

SparseDist to_sparse(std::span<const double> dense) {
    SparseDist out;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0.0) out.emplace_back(i, dense[i]);
    return out;
}

std::vector<double> to_dense(const SparseDist& d, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (auto [i, p] : d) {
        if (i >= n) throw ModelError("sparse index out of range");
        out[i] += p;
    }
    return out;
}

void accumulate(SparseDist& acc, std::size_t index, double w) {
    if (w == 0.0) return;
    auto it = std::lower_bound(acc.begin(), acc.end(), index,
                               [](const auto& e, std::size_t i) { return e.first < i; });
    if (it != acc.end() && it->first == index)
        it->second += w;
    else
        acc.insert(it, {index, w});
}

void accumulate(SparseDist& acc, const SparseDist& d, double w) {
    if (w == 0.0) return;
    for (auto [i, p] : d) accumulate(acc, i, w * p);
}

std::size_t sample_index(std::mt19937_64& rng, std::span<const double> probs) {
    double u = uniform01(rng);
    double c = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0) continue;
        c += probs[i];
        last = i;
        if (u < c) return i;
    }
    return last;
}

} // namespace aisplan
