#include "oracles.hpp"

#include "aisplan/error.hpp"
#include "aisplan/lp.hpp"
#include "aisplan/metrics.hpp"
#include "aisplan/transport.hpp"

#include <doctest.h>

#include <cmath>
#include <array>
#include <random>

using namespace aisplan;

namespace {

std::vector<double> rand_dist(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> p(n);
    double s = 0;
    for (auto& v : p) s += v = U(rng);
    for (auto& v : p) v /= s;
    return p;
}

} // namespace

TEST_SUITE("metrics") {
    TEST_CASE("total variation is un-halved") {
        std::vector<double> p{1, 0}, q{0, 1};
        CHECK(tv_distance(p, q) == doctest::Approx(2.0));
        std::vector<double> a{0.5, 0.5}, b{0.25, 0.75};
        CHECK(tv_distance(a, b) == doctest::Approx(0.5));
    }

    TEST_CASE("mismatched supports are rejected") {
        std::vector<double> p{1, 0}, q{0.2, 0.3, 0.5};
        CHECK_THROWS_AS(tv_distance(p, q), ModelError);
    }

    TEST_CASE("metric space validation") {
        CHECK_THROWS_AS(MetricSpace(2, {0, 1, 2, 0}), ModelError); // asymmetric
        CHECK_THROWS_AS(MetricSpace(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}), ModelError); // triangle
        auto d = MetricSpace::discrete(3);
        CHECK(d(0, 2) == 1);
        CHECK(d.diameter() == 1);
        auto l = MetricSpace::line({0, 2, 5});
        CHECK(l(0, 2) == 5);
    }

    TEST_CASE("Kantorovich on a line matches the CDF formula") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> U(-3, 3);
        for (int k = 0; k < 100; ++k) {
            std::vector<double> xs(5);
            for (auto& x : xs) x = U(rng);
            auto p = rand_dist(rng, 5), q = rand_dist(rng, 5);
            CHECK(kantorovich_distance(MetricSpace::line(xs), p, q) ==
                  doctest::Approx(oracle::w1_line(xs, p, q)).epsilon(1e-9));
        }
    }

    TEST_CASE("Kantorovich with the discrete metric is half the TV") {
        std::mt19937_64 rng(2);
        for (int k = 0; k < 50; ++k) {
            auto p = rand_dist(rng, 4), q = rand_dist(rng, 4);
            CHECK(kantorovich_distance(MetricSpace::discrete(4), p, q) ==
                  doctest::Approx(0.5 * tv_distance(p, q)).epsilon(1e-9));
        }
    }

    TEST_CASE("bounded Lipschitz sits below TV/2 and Kantorovich") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(0, 1);
        for (int k = 0; k < 50; ++k) {
            std::vector<std::vector<double>> pts(4, std::vector<double>(2));
            for (auto& p : pts)
                for (auto& x : p) x = U(rng);
            auto ms = MetricSpace::from_points(pts, 2);
            auto p = rand_dist(rng, 4), q = rand_dist(rng, 4);
            double bl = bounded_lipschitz_distance(ms, p, q);
            CHECK(bl <= kantorovich_distance(ms, p, q) + 1e-9);
            CHECK(bl <= 0.5 * tv_distance(p, q) + 1e-9);
            CHECK(bl >= 0);
        }
    }

    TEST_CASE("bounded Lipschitz on two points has a closed form") {
        // f = (c, -c) with 2|c|/d Lipschitz: sup is |p0 - q0| * 2c with c + 2c/d <= 1.
        for (double d : {0.5, 1.0, 3.0}) {
            auto ms = MetricSpace::line({0, d});
            std::vector<double> p{0.7, 0.3}, q{0.2, 0.8};
            const double c = 1.0 / (1.0 + 2.0 / d);
            CHECK(bounded_lipschitz_distance(ms, p, q) == doctest::Approx(0.5 * 2 * c).epsilon(1e-9));
        }
    }

    TEST_CASE("MMD at exponent 2 is the distance of the means") {
        EmbeddedPoints pts{{{0, 0}, {1, 0}, {0, 2}}};
        std::vector<double> p{0.5, 0.5, 0}, q{0, 0, 1};
        // means (0.5, 0) and (0, 2)
        CHECK(mmd_distance(pts, p, q, 2.0) == doctest::Approx(std::sqrt(0.25 + 4)));
        CHECK_THROWS_AS(mmd_distance(pts, p, q, 2.5), ModelError);
    }

    TEST_CASE("MMD vanishes on equal inputs and is symmetric") {
        std::mt19937_64 rng(4);
        EmbeddedPoints pts{{{0}, {1}, {3}}};
        for (int k = 0; k < 20; ++k) {
            auto p = rand_dist(rng, 3), q = rand_dist(rng, 3);
            CHECK(mmd_distance(pts, p, p, 1.0) == doctest::Approx(0.0).epsilon(1e-7));
            CHECK(mmd_distance(pts, p, q, 1.0) == doctest::Approx(mmd_distance(pts, q, p, 1.0)));
        }
    }

    TEST_CASE("ipm_distance dispatch") {
        std::vector<double> p{1, 0}, q{0, 1};
        CHECK(ipm_distance(FunctionClassSpec::total_variation(), p, q) == 2.0);
        CHECK(ipm_distance(FunctionClassSpec::kantorovich(MetricSpace::line({0, 3})), p, q) == doctest::Approx(3));
        FunctionClassSpec bad;
        bad.kind = IpmKind::Kantorovich;
        CHECK_THROWS_AS(ipm_distance(bad, p, q), ModelError);
    }

    TEST_CASE("Minkowski functionals") {
        std::vector<double> f{1, 4, 2};
        auto line = MetricSpace::line({0, 1, 3});
        CHECK(minkowski_functional(FunctionClassSpec::total_variation(), f) == doctest::Approx(1.5));
        CHECK(minkowski_functional(FunctionClassSpec::kantorovich(line), f) == doctest::Approx(3.0));
        CHECK(minkowski_functional(FunctionClassSpec::bounded_lipschitz(line), f) == doctest::Approx(4 + 3));
        CHECK_THROWS_AS(minkowski_functional(FunctionClassSpec::mmd(EmbeddedPoints{{{0}, {1}, {2}}}, 1), f),
                        Unsupported);
    }

    TEST_CASE("duality: sum f (p - q) <= rho(f) d(p, q)") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> N(0, 1);
        auto line = MetricSpace::line({0, 0.5, 2, 2.5});
        for (auto fc : {FunctionClassSpec::total_variation(), FunctionClassSpec::kantorovich(line),
                        FunctionClassSpec::bounded_lipschitz(line)})
            for (int k = 0; k < 50; ++k) {
                std::vector<double> f(4);
                for (auto& v : f) v = N(rng);
                auto p = rand_dist(rng, 4), q = rand_dist(rng, 4);
                double lhs = 0;
                for (int i = 0; i < 4; ++i) lhs += f[i] * (p[i] - q[i]);
                CHECK(std::abs(lhs) <= minkowski_functional(fc, f) * ipm_distance(fc, p, q) + 1e-9);
            }
    }

    TEST_CASE("KL and surrogates") {
        std::vector<double> p{0.5, 0.5}, q{0.25, 0.75}, z{1, 0};
        CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(0.5 / 0.75)));
        CHECK(std::isinf(kl_divergence(p, z)));
        CHECK(pinsker_bound(0.5) == doctest::Approx(1.0));
        std::vector<std::size_t> xs{0, 1, 1};
        CHECK(cross_entropy_surrogate(xs, q) == doctest::Approx((std::log(0.25) + 2 * std::log(0.75)) / 3));
        std::vector<double> x{0, 1};
        CHECK(mmd2_surrogate(x, q) == doctest::Approx(0.25 * 0.25 + (0.75 - 2) * 0.75));
        auto g = mmd2_surrogate_gradient(x, q);
        CHECK(g[0] == doctest::Approx(0.5));
        CHECK(g[1] == doctest::Approx(2 * (0.75 - 1)));
    }

    TEST_CASE("contraction factors") {
        auto dom = MetricSpace::line({0, 1, 2});
        auto cod = MetricSpace::line({0, 4});
        std::vector<std::size_t> map{0, 0, 1};
        CHECK(contraction_factor(IpmKind::TotalVariation, dom, cod, map) == 1.0);
        CHECK(contraction_factor(IpmKind::Kantorovich, dom, cod, map) == doctest::Approx(4.0));
        CHECK(contraction_factor(IpmKind::BoundedLipschitz, dom, cod, map) == doctest::Approx(4.0));
    }

    TEST_CASE("parse_ipm_kind") {
        CHECK(parse_ipm_kind("tv") == IpmKind::TotalVariation);
        CHECK(parse_ipm_kind("bl") == IpmKind::BoundedLipschitz);
        CHECK(to_string(IpmKind::Mmd) == "mmd");
        CHECK_THROWS_AS(parse_ipm_kind("hellinger"), ModelError);
    }
}

TEST_SUITE("lp") {
    TEST_CASE("small textbook LP") {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        auto r = solve_lp_max({3, 5}, {1, 0, 0, 2, 3, 2}, {4, 12, 18});
        CHECK(r.value == doctest::Approx(36));
        CHECK(r.x[0] == doctest::Approx(2));
        CHECK(r.x[1] == doctest::Approx(6));
    }

    TEST_CASE("degenerate LP terminates") {
        // Many redundant constraints through the origin.
        auto r = solve_lp_max({1, 1}, {1, -1, -1, 1, 1, 1, 1, 0, 0, 1}, {0, 0, 2, 1, 1});
        CHECK(r.value == doctest::Approx(2));
    }

    TEST_CASE("unbounded LP throws") { CHECK_THROWS_AS(solve_lp_max({1, 1}, {1, -1}, {1}), NumericalError); }

    TEST_CASE("random LPs against vertex enumeration in 2D") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> U(0.1, 2);
        for (int k = 0; k < 30; ++k) {
            std::vector<double> c{U(rng), U(rng)}, A, b;
            for (int i = 0; i < 4; ++i) {
                A.push_back(U(rng));
                A.push_back(U(rng));
                b.push_back(U(rng));
            }
            // Enumerate candidate vertices from pairs of tight constraints (incl. x = 0, y = 0).
            std::vector<std::array<double, 3>> rows;
            for (int i = 0; i < 4; ++i) rows.push_back({A[2 * i], A[2 * i + 1], b[i]});
            rows.push_back({-1, 0, 0});
            rows.push_back({0, -1, 0});
            double best = 0;
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i + 1; j < rows.size(); ++j) {
                    double det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
                    if (std::abs(det) < 1e-12) continue;
                    double x = (rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2]) / det;
                    double y = (rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0]) / det;
                    bool ok = x >= -1e-9 && y >= -1e-9;
                    for (int r = 0; r < 4 && ok; ++r) ok = A[2 * r] * x + A[2 * r + 1] * y <= b[r] + 1e-9;
                    if (ok) best = std::max(best, c[0] * x + c[1] * y);
                }
            CHECK(solve_lp_max(c, A, b).value == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_SUITE("transport") {
    TEST_CASE("integer instances against min-cost flow") {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> cell(0, 4), cost(0, 9);
        for (int k = 0; k < 40; ++k) {
            std::vector<int> a(5, 0), b(5, 0);
            for (int u = 0; u < 20; ++u) {
                ++a[cell(rng)];
                ++b[cell(rng)];
            }
            std::vector<double> C(25);
            for (auto& c : C) c = cost(rng);
            std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
            auto plan = solve_transport(sa, sb, C);
            CHECK(plan.cost == doctest::Approx(oracle::min_cost_flow(a, b, C)).epsilon(1e-12));
            // flows reproduce the marginals
            std::vector<double> ra(5, 0), rb(5, 0);
            double cst = 0;
            for (auto& f : plan.flows) {
                ra[f.from] += f.mass;
                rb[f.to] += f.mass;
                cst += f.mass * C[f.from * 5 + f.to];
            }
            for (int i = 0; i < 5; ++i) {
                CHECK(ra[i] == doctest::Approx(sa[i]));
                CHECK(rb[i] == doctest::Approx(sb[i]));
            }
            CHECK(cst == doctest::Approx(plan.cost));
        }
    }

    TEST_CASE("unbalanced input throws") {
        CHECK_THROWS_AS(solve_transport({1, 0}, {0.5, 0.4}, {0, 1, 1, 0}), ModelError);
    }
}
