#pragma once

#include "aisplan/prob.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aisplan {

/// Finite metric space given by a dense distance table.
class MetricSpace {
public:
    MetricSpace() = default;
    /// Row-major n x n table; validated (symmetric, zero diagonal, nonnegative,
    /// triangle inequality within 1e-9).
    MetricSpace(std::size_t n, std::vector<double> dist);

    static MetricSpace discrete(std::size_t n);
    /// Distances |x_i - x_j| for points on a line.
    static MetricSpace line(const std::vector<double>& xs);
    /// l1 or l2 distances between rows of `coords`.
    static MetricSpace from_points(const std::vector<std::vector<double>>& coords, int norm);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    double diameter() const;
    const std::vector<double>& table() const { return d_; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Points of X ⊆ R^m.
struct EmbeddedPoints {
    std::vector<std::vector<double>> coords;
    std::size_t size() const { return coords.size(); }
};

enum class IpmKind { TotalVariation, Kantorovich, BoundedLipschitz, Mmd };

std::string to_string(IpmKind k);
/// Accepts tv, kantorovich, bl, mmd (and the full names). Throws ModelError.
IpmKind parse_ipm_kind(const std::string& s);

struct FunctionClassSpec {
    IpmKind kind = IpmKind::TotalVariation;
    std::optional<MetricSpace> metric; // Kantorovich, BoundedLipschitz
    std::optional<EmbeddedPoints> points; // Mmd
    double exponent = 1.0;              // Mmd

    static FunctionClassSpec total_variation() { return {}; }
    static FunctionClassSpec kantorovich(MetricSpace m) {
        return {IpmKind::Kantorovich, std::move(m), std::nullopt, 1.0};
    }
    static FunctionClassSpec bounded_lipschitz(MetricSpace m) {
        return {IpmKind::BoundedLipschitz, std::move(m), std::nullopt, 1.0};
    }
    static FunctionClassSpec mmd(EmbeddedPoints p, double exponent) {
        return {IpmKind::Mmd, std::nullopt, std::move(p), exponent};
    }
};

/// Un-halved total variation: sum_i |p_i - q_i|, in [0, 2].
double tv_distance(std::span<const double> p, std::span<const double> q);
double kantorovich_distance(const MetricSpace& metric, std::span<const double> p,
                            std::span<const double> q);
/// sup { sum f (p - q) : ||f||_inf + Lip(f) <= 1 }, solved as an LP.
double bounded_lipschitz_distance(const MetricSpace& metric, std::span<const double> p,
                                  std::span<const double> q);
double mmd_distance(const EmbeddedPoints& points, std::span<const double> p,
                    std::span<const double> q, double exponent);
double ipm_distance(const FunctionClassSpec& fclass, std::span<const double> p,
                    std::span<const double> q);

double span(std::span<const double> f);
double lipschitz_constant(const MetricSpace& metric, std::span<const double> f);
/// Smallest rho with f / rho in the class. Throws Unsupported for Mmd.
double minkowski_functional(const FunctionClassSpec& fclass, std::span<const double> f);

/// sup over f in the class of rho(f ∘ map), where map sends points of the
/// domain space to points of the codomain space. TV → 1; Kantorovich → Lip(map);
/// BoundedLipschitz → max(1, Lip(map)) (an upper bound).
double contraction_factor(IpmKind kind, const MetricSpace& domain, const MetricSpace& codomain,
                          std::span<const std::size_t> map);

/// sum p log(p/q); +inf when q vanishes where p does not.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double pinsker_bound(double kl);
/// (1/T) sum_t log predicted(x_t). Throws NumericalError on zero predicted mass.
double cross_entropy_surrogate(std::span<const std::size_t> samples, std::span<const double> predicted);
/// (M - 2X)'M; gradient w.r.t. M is 2(M - X).
double mmd2_surrogate(std::span<const double> sample, std::span<const double> predicted_mean);
std::vector<double> mmd2_surrogate_gradient(std::span<const double> sample,
                                            std::span<const double> predicted_mean);

} // namespace aisplan
