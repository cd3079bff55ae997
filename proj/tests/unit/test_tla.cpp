#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "extail/tla.hpp"

using namespace extail;

namespace {

// long-double reference for the transform composition
long double softplus_ref(long double x) { return std::log1p(std::exp(x)); }
long double softplus_inv_ref(long double y) { return std::log(std::expm1(y)); }

}  // namespace

TEST_CASE("softplus basics", "[tla]") {
    CHECK(softplus(0.0) == Approx(std::log(2.0)).margin(1e-15));
    CHECK(softplus(50.0) == Approx(50.0).margin(1e-12));
    for (double x : {-10.0, -1.0, 0.5, 20.0})
        CHECK(softplus_inv(softplus(x)) == Approx(x).margin(1e-10));
}

TEST_CASE("softplus_inv basics and domain", "[tla]") {
    CHECK(softplus_inv(std::log(2.0)) == Approx(0.0).margin(1e-12));
    CHECK(softplus_inv(100.0) == Approx(100.0).margin(1e-12));
    // small-y branch keeps relative accuracy
    const double y = 1e-6;
    const double expected = static_cast<double>(softplus_inv_ref(1e-6L));
    CHECK(softplus_inv(y) == Approx(expected).epsilon(1e-12));
    CHECK(softplus_inv(y) == Approx(std::log(y)).epsilon(1e-6));
    CHECK_THROWS_AS(softplus_inv(0.0), InputError);
    CHECK_THROWS_AS(softplus_inv(-1.0), InputError);
}

TEST_CASE("softplus round-trip across stable branches", "[tla]") {
    for (double x = -30.0; x <= 700.0; x += 0.5)
        REQUIRE(softplus_inv(softplus(x)) == Approx(x).margin(1e-10));
}

TEST_CASE("tl_add values and commutativity", "[tla]") {
    const double ln2 = std::log(2.0);
    CHECK(tl_add(ln2, ln2) == Approx(ln2).margin(1e-12));

    const double expected_53 =
        static_cast<double>(softplus_ref(softplus_inv_ref(5.0L) + softplus_inv_ref(3.0L)));
    CHECK(tl_add(5.0, 3.0) == Approx(expected_53).margin(1e-12));

    Rng rng(17);
    for (int k = 0; k < 100; ++k) {
        const double x = std::exp(-3.0 + 8.0 * rng.u01());
        const double y = std::exp(-3.0 + 8.0 * rng.u01());
        REQUIRE(tl_add(x, y) == Approx(tl_add(y, x)).margin(1e-12));
    }
}

TEST_CASE("tl algebra properties", "[tla]") {
    Rng rng(29);
    for (int k = 0; k < 100; ++k) {
        const double x = std::exp(-3.0 + 8.0 * rng.u01());
        const double y = std::exp(-3.0 + 8.0 * rng.u01());
        const double z = std::exp(-3.0 + 8.0 * rng.u01());
        const double a = -2.0 + 4.0 * rng.u01();
        REQUIRE(tl_add(tl_add(x, y), z) == Approx(tl_add(x, tl_add(y, z))).margin(1e-10));
        REQUIRE(tl_scale(a, tl_add(x, y)) ==
                Approx(tl_add(tl_scale(a, x), tl_scale(a, y))).margin(1e-9));
    }
}

TEST_CASE("tl_scale special cases", "[tla]") {
    const double ln2 = std::log(2.0);
    CHECK(tl_scale(1.0, 7.3) == Approx(7.3).margin(1e-12));
    CHECK(tl_scale(0.0, 7.3) == Approx(ln2).margin(1e-15));
    CHECK(tl_scale(2.0, ln2) == Approx(ln2).margin(1e-14));
}

TEST_CASE("tl_matvec identity, diagonal, composition", "[tla]") {
    Rng rng(5);
    Eigen::VectorXd z(3);
    z << 1.5, 2.0, 4.0;
    const Eigen::VectorXd same = tl_matvec(Eigen::MatrixXd::Identity(3, 3), z);
    for (int i = 0; i < 3; ++i) CHECK(same[i] == Approx(z[i]).margin(1e-12));

    Eigen::VectorXd a(3);
    a << 0.5, 1.0, 2.0;
    const Eigen::VectorXd scaled = tl_matvec(a.asDiagonal().toDenseMatrix(), z);
    for (int i = 0; i < 3; ++i) CHECK(scaled[i] == Approx(tl_scale(a[i], z[i])).margin(1e-12));

    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd m1(4, 4), m2(4, 4);
        Eigen::VectorXd v(4);
        for (int i = 0; i < 4; ++i) {
            v[i] = 1.0 + 3.0 * rng.u01();
            for (int j = 0; j < 4; ++j) {
                m1(i, j) = rng.u01();
                m2(i, j) = rng.u01();
            }
        }
        const Eigen::VectorXd direct = tl_matvec(m1 * m2, v);
        const Eigen::VectorXd chained = tl_matvec(m1, tl_matvec(m2, v));
        for (int i = 0; i < 4; ++i) REQUIRE(direct[i] == Approx(chained[i]).margin(1e-9));
    }

    CHECK_THROWS_AS(tl_matvec(Eigen::MatrixXd::Identity(3, 2), z), InputError);
}

TEST_CASE("pareto2 sampling", "[tla]") {
    CHECK(pareto2_quantile(0.0) == Approx(1.0));
    CHECK(pareto2_quantile(0.75) == Approx(2.0));

    Rng rng(101);
    const Eigen::VectorXd draws = sample_pareto2(1'000'000, rng);
    REQUIRE((draws.array() >= 1.0).all());
    const double frac_above_4 =
        static_cast<double>((draws.array() > 4.0).count()) / static_cast<double>(draws.size());
    CHECK(frac_above_4 == Approx(1.0 / 16.0).margin(0.003));

    Rng a(7), b(7);
    const Eigen::VectorXd run1 = sample_pareto2(1000, a);
    const Eigen::VectorXd run2 = sample_pareto2(1000, b);
    REQUIRE(run1 == run2);  // bit-for-bit

    Rng c(7);
    CHECK(sample_pareto2(0, c).size() == 0);
}

TEST_CASE("rank_to_pareto2 worked example and invariances", "[tla]") {
    const std::vector<double> column{3.0, 1.0, 2.0};
    const auto out = rank_to_pareto2(column);
    CHECK(out[0] == Approx(2.0).margin(1e-12));
    CHECK(out[1] == Approx(1.0 / std::sqrt(0.75)).margin(1e-12));
    CHECK(out[2] == Approx(std::sqrt(2.0)).margin(1e-12));

    // strictly monotone recoding leaves the output unchanged
    const std::vector<double> recoded{300.0, -5.0, 0.1};
    const auto out2 = rank_to_pareto2(recoded);
    for (int i = 0; i < 3; ++i) REQUIRE(out[i] == out2[i]);

    const std::vector<double> tied{5.0, 5.0};
    const auto out3 = rank_to_pareto2(tied);
    CHECK(out3[0] == Approx(std::sqrt(2.0)).margin(1e-12));
    CHECK(out3[1] == Approx(std::sqrt(2.0)).margin(1e-12));

    CHECK_THROWS_AS(rank_to_pareto2(std::vector<double>{1.0}), InputError);
    CHECK_THROWS_AS(rank_to_pareto2(std::vector<double>{1.0, std::nan("")}), InputError);
}

TEST_CASE("rank_to_pareto2 one-sample check on tie-free input", "[tla]") {
    Rng rng(3);
    const int n = 500;
    std::vector<double> col(n);
    for (auto& v : col) v = rng.u01();
    auto out = rank_to_pareto2(col);
    std::sort(out.begin(), out.end());
    for (int i = 1; i <= n; ++i) {
        const double expected = 1.0 / std::sqrt(1.0 - static_cast<double>(i) / (n + 1));
        REQUIRE(out[static_cast<std::size_t>(i - 1)] == expected);
    }
}

TEST_CASE("hill estimator", "[tla]") {
    // deterministic Pareto(1,2) quantile grid
    const int n = 10'000;
    std::vector<double> grid(n);
    for (int i = 1; i <= n; ++i)
        grid[static_cast<std::size_t>(i - 1)] =
            std::pow(static_cast<double>(i) / (n + 1), -0.5);
    CHECK(hill_estimator(grid, 500) == Approx(2.0).margin(0.15));

    // scale invariance
    std::vector<double> scaled = grid;
    for (auto& v : scaled) v *= 37.5;
    CHECK(hill_estimator(scaled, 500) == Approx(hill_estimator(grid, 500)).margin(1e-12));

    // Monte-Carlo consistency
    Rng rng(11);
    const Eigen::VectorXd draws = sample_pareto2(1'000'000, rng);
    std::vector<double> sample(draws.data(), draws.data() + draws.size());
    const double alpha_hat = hill_estimator(sample, 2000);
    CHECK(alpha_hat >= 1.9);
    CHECK(alpha_hat <= 2.1);

    CHECK_THROWS_AS(hill_estimator(grid, 1), InputError);
    CHECK_THROWS_AS(hill_estimator(grid, n), InputError);
    CHECK_THROWS_AS(hill_estimator(std::vector<double>{1.0, -1.0, 2.0}, 2), InputError);
}

TEST_CASE("hill default exceedance count reuses the threshold quantile", "[tla]") {
    std::vector<double> values(1000);
    for (int i = 0; i < 1000; ++i) values[static_cast<std::size_t>(i)] = i + 1;
    CHECK(hill_default_k(values, 0.99) == 10);
    CHECK(hill_default_k(values, 0.5) == 500);
    const std::vector<double> constant(100, 4.0);
    CHECK(hill_default_k(constant, 0.9) == 0);  // strict exceedance
    CHECK_THROWS_AS(hill_default_k(values, 1.0), InputError);
}

TEST_CASE("standardize_columns matches per-column transform", "[tla]") {
    Eigen::MatrixXd raw(3, 2);
    raw << 3, 1, 1, 2, 2, 3;
    const StandardizedMatrix s = standardize_columns(raw);
    REQUIRE(s.standardized);
    const auto col1 = rank_to_pareto2(std::vector<double>{3, 1, 2});
    for (int i = 0; i < 3; ++i) REQUIRE(s.data(i, 0) == col1[static_cast<std::size_t>(i)]);
}
