#include "aisplan/metrics.hpp"

#include "aisplan/error.hpp"
#include "aisplan/lp.hpp"
#include "aisplan/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aisplan {

MetricSpace::MetricSpace(std::size_t n, std::vector<double> dist) : n_(n), d_(std::move(dist)) {
    if (d_.size() != n * n) throw ModelError("metric table has wrong size");
    for (std::size_t i = 0; i < n; ++i) {
        if (d_[i * n + i] != 0.0) throw ModelError("metric diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            double d = d_[i * n + j];
            if (!std::isfinite(d) || d < 0) throw ModelError("metric entries must be finite and nonnegative");
            if (std::abs(d - d_[j * n + i]) > 1e-12) throw ModelError("metric must be symmetric");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (d_[i * n + j] > d_[i * n + k] + d_[k * n + j] + 1e-9)
                    throw ModelError("metric violates the triangle inequality");
}

MetricSpace MetricSpace::discrete(std::size_t n) {
    std::vector<double> d(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    MetricSpace m;
    m.n_ = n;
    m.d_ = std::move(d);
    return m;
}

MetricSpace MetricSpace::line(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(xs[i] - xs[j]);
    MetricSpace m;
    m.n_ = n;
    m.d_ = std::move(d);
    return m;
}

MetricSpace MetricSpace::from_points(const std::vector<std::vector<double>>& coords, int norm) {
    const std::size_t n = coords.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coords[i].size() != coords[j].size()) throw ModelError("points have mixed dimension");
            double s = 0;
            for (std::size_t k = 0; k < coords[i].size(); ++k) {
                double diff = coords[i][k] - coords[j][k];
                s += norm == 1 ? std::abs(diff) : diff * diff;
            }
            d[i * n + j] = d[j * n + i] = norm == 1 ? s : std::sqrt(s);
        }
    MetricSpace m;
    m.n_ = n;
    m.d_ = std::move(d);
    return m;
}

double MetricSpace::diameter() const {
    double d = 0;
    for (double x : d_) d = std::max(d, x);
    return d;
}

std::string to_string(IpmKind k) {
    switch (k) {
    case IpmKind::TotalVariation: return "tv";
    case IpmKind::Kantorovich: return "kantorovich";
    case IpmKind::BoundedLipschitz: return "bl";
    case IpmKind::Mmd: return "mmd";
    }
    return "?";
}

IpmKind parse_ipm_kind(const std::string& s) {
    if (s == "tv" || s == "total_variation") return IpmKind::TotalVariation;
    if (s == "kantorovich" || s == "wasserstein") return IpmKind::Kantorovich;
    if (s == "bl" || s == "bounded_lipschitz") return IpmKind::BoundedLipschitz;
    if (s == "mmd") return IpmKind::Mmd;
    throw ModelError("unknown function class \"" + s + "\" (allowed: tv, kantorovich, bl, mmd)");
}

namespace {

void check_pair(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ModelError("distributions have different lengths");
}

void check_metric(const MetricSpace& m, std::size_t n) {
    if (m.size() != n) throw ModelError("metric size does not match the distribution support");
}

} // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
    check_pair(p, q);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

double kantorovich_distance(const MetricSpace& metric, std::span<const double> p,
                            std::span<const double> q) {
    check_pair(p, q);
    check_metric(metric, p.size());
    // Mass common to both stays in place at zero cost.
    std::vector<double> a(p.size()), b(q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double c = std::min(p[i], q[i]);
        a[i] = std::max(0.0, p[i] - c);
        b[i] = std::max(0.0, q[i] - c);
    }
    double sa = 0, sb = 0;
    for (double x : a) sa += x;
    for (double x : b) sb += x;
    if (sa <= 0 || sb <= 0) return 0.0;
    for (auto& x : b) x *= sa / sb;
    return solve_transport(a, b, metric.table()).cost;
}

double bounded_lipschitz_distance(const MetricSpace& metric, std::span<const double> p,
                                  std::span<const double> q) {
    check_pair(p, q);
    check_metric(metric, p.size());
    std::vector<std::size_t> sup;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != q[i]) sup.push_back(i);
    const std::size_t k = sup.size();
    if (k == 0) return 0.0;
    // Variables g_i = f_i + c in [0, 2c] and c; all right-hand sides nonnegative.
    const std::size_t nv = k + 1, ci = k;
    std::vector<double> obj(nv, 0.0), A, b;
    double wsum = 0;
    for (std::size_t i = 0; i < k; ++i) {
        obj[i] = p[sup[i]] - q[sup[i]];
        wsum += obj[i];
    }
    obj[ci] = -wsum;
    auto row = [&](std::vector<std::pair<std::size_t, double>> entries, double rhs) {
        std::size_t off = A.size();
        A.resize(off + nv, 0.0);
        for (auto [j, v] : entries) A[off + j] += v;
        b.push_back(rhs);
    };
    for (std::size_t i = 0; i < k; ++i) row({{i, 1.0}, {ci, -2.0}}, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            double d = metric(sup[i], sup[j]);
            row({{i, 1.0}, {j, -1.0}, {ci, d}}, d);
        }
    row({{ci, 1.0}}, 1.0);
    return std::max(0.0, solve_lp_max(obj, A, b).value);
}

double mmd_distance(const EmbeddedPoints& points, std::span<const double> p,
                    std::span<const double> q, double exponent) {
    check_pair(p, q);
    if (points.size() != p.size()) throw ModelError("embedded points do not match the support");
    if (!(exponent > 0 && exponent <= 2)) throw ModelError("MMD exponent must lie in (0, 2]");
    const std::size_t n = p.size();
    std::vector<double> D(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < points.coords[i].size(); ++k) {
                double d = points.coords[i][k] - points.coords[j][k];
                s += d * d;
            }
            D[i * n + j] = D[j * n + i] = std::pow(std::sqrt(s), exponent);
        }
    double xw = 0, xx = 0, ww = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double d = D[i * n + j];
            xw += p[i] * q[j] * d;
            xx += p[i] * p[j] * d;
            ww += q[i] * q[j] * d;
        }
    double rad = xw - 0.5 * xx - 0.5 * ww;
    if (rad < 0) {
        if (rad < -1e-10) throw NumericalError("MMD radicand is negative");
        rad = 0;
    }
    return std::sqrt(rad);
}

double ipm_distance(const FunctionClassSpec& fc, std::span<const double> p, std::span<const double> q) {
    switch (fc.kind) {
    case IpmKind::TotalVariation: return tv_distance(p, q);
    case IpmKind::Kantorovich:
        if (!fc.metric) throw ModelError("Kantorovich class needs a ground metric");
        return kantorovich_distance(*fc.metric, p, q);
    case IpmKind::BoundedLipschitz:
        if (!fc.metric) throw ModelError("bounded-Lipschitz class needs a ground metric");
        return bounded_lipschitz_distance(*fc.metric, p, q);
    case IpmKind::Mmd:
        if (!fc.points) throw ModelError("MMD class needs embedded points");
        return mmd_distance(*fc.points, p, q, fc.exponent);
    }
    return 0;
}

double span(std::span<const double> f) {
    if (f.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    return *hi - *lo;
}

double lipschitz_constant(const MetricSpace& metric, std::span<const double> f) {
    check_metric(metric, f.size());
    double L = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            double df = std::abs(f[i] - f[j]);
            if (df == 0) continue;
            double d = metric(i, j);
            if (d == 0) return std::numeric_limits<double>::infinity();
            L = std::max(L, df / d);
        }
    return L;
}

double minkowski_functional(const FunctionClassSpec& fc, std::span<const double> f) {
    switch (fc.kind) {
    case IpmKind::TotalVariation: return 0.5 * span(f);
    case IpmKind::Kantorovich:
        if (!fc.metric) throw ModelError("Kantorovich class needs a ground metric");
        return lipschitz_constant(*fc.metric, f);
    case IpmKind::BoundedLipschitz: {
        if (!fc.metric) throw ModelError("bounded-Lipschitz class needs a ground metric");
        double sup = 0;
        for (double x : f) sup = std::max(sup, std::abs(x));
        return sup + lipschitz_constant(*fc.metric, f);
    }
    case IpmKind::Mmd:
        throw Unsupported("Minkowski functional of the MMD class is not supported");
    }
    return 0;
}

double contraction_factor(IpmKind kind, const MetricSpace& domain, const MetricSpace& codomain,
                          std::span<const std::size_t> map) {
    if (map.size() != domain.size()) throw ModelError("map does not cover the domain space");
    for (auto z : map)
        if (z >= codomain.size()) throw ModelError("map target outside the codomain space");
    if (kind == IpmKind::TotalVariation) return 1.0;
    if (kind == IpmKind::Mmd) throw Unsupported("contraction factor of the MMD class is not supported");
    double L = 0;
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = i + 1; j < map.size(); ++j) {
            double dz = codomain(map[i], map[j]);
            if (dz == 0) continue;
            double dy = domain(i, j);
            if (dy == 0) return std::numeric_limits<double>::infinity();
            L = std::max(L, dz / dy);
        }
    return kind == IpmKind::BoundedLipschitz ? std::max(1.0, L) : L;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    check_pair(p, q);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        if (q[i] <= 0) return std::numeric_limits<double>::infinity();
        s += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(0.0, s);
}

double pinsker_bound(double kl) { return std::sqrt(2.0 * kl); }

double cross_entropy_surrogate(std::span<const std::size_t> samples, std::span<const double> predicted) {
    if (samples.empty()) throw ModelError("cross-entropy surrogate needs at least one sample");
    double s = 0;
    for (auto x : samples) {
        if (x >= predicted.size()) throw ModelError("sample outside the predicted support");
        if (predicted[x] <= 0) throw NumericalError("zero predicted mass on an observed sample");
        s += std::log(predicted[x]);
    }
    return s / static_cast<double>(samples.size());
}

double mmd2_surrogate(std::span<const double> x, std::span<const double> m) {
    check_pair(x, m);
    double s = 0;
    for (std::size_t i = 0; i < m.size(); ++i) s += (m[i] - 2 * x[i]) * m[i];
    return s;
}

std::vector<double> mmd2_surrogate_gradient(std::span<const double> x, std::span<const double> m) {
    check_pair(x, m);
    std::vector<double> g(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) g[i] = 2 * (m[i] - x[i]);
    return g;
}

} // namespace aisplan
