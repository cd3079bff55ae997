#include <catch2/catch.hpp>

#include <Eigen/Cholesky>

#include "extail/models.hpp"
#include "extail/tpdm.hpp"
#include "support/oracles.hpp"

using namespace extail;

TEST_CASE("radial decomposition", "[tpdm]") {
    StandardizedMatrix x;
    x.data.resize(2, 2);
    x.data << 3, 4, 5, 5;
    const RadialDecomposition rd = radial_angular(x);
    CHECK(rd.radii[0] == Approx(5.0));
    CHECK(rd.angles(0, 0) == Approx(0.6));
    CHECK(rd.angles(0, 1) == Approx(0.8));
    CHECK(rd.angles(1, 0) == Approx(1.0 / std::sqrt(2.0)));

    for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j)
            REQUIRE(rd.radii[l] * rd.angles(l, j) == Approx(x.data(l, j)).margin(1e-12));
}

TEST_CASE("threshold selection", "[tpdm]") {
    Eigen::VectorXd radii(100);
    for (int i = 0; i < 100; ++i) radii[i] = i + 1;
    CHECK(select_threshold(radii, 0.99) == 99.0);
    CHECK(select_threshold(radii, 0.5) == 50.0);

    Eigen::VectorXd small(3);
    small << 5, 7, 9;
    CHECK(select_threshold(small, 1e-9) == 5.0);

    Eigen::VectorXd constant = Eigen::VectorXd::Constant(10, 3.25);
    for (double q : {0.1, 0.5, 0.9}) CHECK(select_threshold(constant, q) == 3.25);

    CHECK_THROWS_AS(select_threshold(radii, 0.0), InputError);
    CHECK_THROWS_AS(select_threshold(radii, 1.0), InputError);
}

TEST_CASE("tpdm estimate on degenerate and independent data", "[tpdm]") {
    Rng rng(19);

    SECTION("perfectly dependent pair") {
        StandardizedMatrix x;
        x.data.resize(1000, 2);
        const Eigen::VectorXd z = sample_pareto2(1000, rng);
        x.data.col(0) = z;
        x.data.col(1) = z;
        const Tpdm t = estimate_tpdm(x, 0.9);
        CHECK(t.sigma(0, 1) == Approx(t.sigma(0, 0)).margin(1e-12));
        CHECK(t.sigma(0, 0) == Approx(t.total_mass / 2.0).margin(1e-12));
    }

    SECTION("independent standardized columns give near-identity as q grows") {
        // the angular moment carries a positive finite-threshold bias of about
        // 0.15 at q=0.99 for this n; it shrinks with the threshold
        const int n = 200'000, p = 4;
        StandardizedMatrix x;
        x.data.resize(n, p);
        for (int j = 0; j < p; ++j) x.data.col(j) = sample_pareto2(n, rng);
        x.standardized = true;
        const Tpdm t99 = estimate_tpdm(x, 0.99);
        double off99 = 0.0;
        for (int i = 0; i < p; ++i) {
            CHECK(t99.sigma(i, i) == Approx(1.0).margin(0.15));
            for (int j = i + 1; j < p; ++j) off99 = std::max(off99, t99.sigma(i, j));
        }
        CHECK(off99 <= 0.2);
        CHECK(t99.total_mass == Approx(p).margin(0.5));

        const Tpdm t999 = estimate_tpdm(x, 0.999);
        double off999 = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off999 = std::max(off999, t999.sigma(i, j));
        CHECK(off999 <= 0.1);
        CHECK(off999 < off99);
    }

    SECTION("insufficient exceedances") {
        StandardizedMatrix x;
        x.data = Eigen::MatrixXd::Constant(20, 8, 1.0);
        CHECK_THROWS_AS(estimate_tpdm(x, 0.9), InsufficientExceedances);
    }
}

TEST_CASE("tpdm estimate is symmetric, nonnegative, permutation-equivariant", "[tpdm]") {
    Rng rng(23);
    const int n = 5000, p = 5;
    const XscmSpec spec = random_xscm(p, 0.5, rng);
    const StandardizedMatrix x = sample_xscm(spec, n, rng);
    const Tpdm t = estimate_tpdm(x, 0.95);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            REQUIRE(t.sigma(i, j) == t.sigma(j, i));
            REQUIRE(t.sigma(i, j) >= 0.0);
        }

    // reverse the columns; sigma must permute identically
    StandardizedMatrix rev;
    rev.data = x.data.rowwise().reverse();
    const Tpdm t2 = estimate_tpdm(rev, 0.95);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            REQUIRE(t2.sigma(i, j) == Approx(t.sigma(p - 1 - i, p - 1 - j)).margin(1e-12));
}

TEST_CASE("analytic tpdm", "[tpdm]") {
    SECTION("no edges gives the identity") {
        const Tpdm t = analytic_tpdm(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Ones(3));
        CHECK(t.sigma.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-14));
        CHECK(t.total_mass == Approx(3.0));
    }

    SECTION("single-edge closed form") {
        const double b = 0.7;
        Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(2, 2);
        bm(1, 0) = b;
        const Tpdm t = analytic_tpdm(bm, Eigen::VectorXd::Ones(2));
        CHECK(t.sigma(0, 0) == Approx(1.0));
        CHECK(t.sigma(0, 1) == Approx(b));
        CHECK(t.sigma(1, 1) == Approx(1.0 + b * b));
    }

    SECTION("cyclic support is rejected") {
        Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(2, 2);
        bm(0, 1) = 0.5;
        bm(1, 0) = 0.5;
        CHECK_THROWS_AS(analytic_tpdm(bm, Eigen::VectorXd::Ones(2)), CyclicGraphError);
    }

    SECTION("positive definite for random acyclic coefficients") {
        Rng rng(37);
        for (int rep = 0; rep < 25; ++rep) {
            const XscmSpec spec = random_xscm(4 + rep % 3, 0.6, rng);
            const Tpdm t = analytic_tpdm(spec.B[0], spec.A);
            const Eigen::LLT<Eigen::MatrixXd> llt(t.sigma);
            REQUIRE(llt.info() == Eigen::Success);
        }
    }
}

TEST_CASE("tpdm estimator approaches the analytic matrix as q grows", "[tpdm][slow]") {
    const Eigen::MatrixXd b = oracles::example_b_matrix();
    const Tpdm analytic = analytic_tpdm(b, Eigen::VectorXd::Ones(6));

    XscmSpec spec;
    spec.p = 6;
    spec.tau = 0;
    spec.B = {b};
    spec.A = Eigen::VectorXd::Ones(6);

    // convergence toward the analytic matrix is slow in the threshold; at
    // this n the error is ~6.4 at q=0.98 and ~0.67 at q=0.999
    Rng rng(2024);
    const StandardizedMatrix x = sample_xscm(spec, 200'000, rng);
    const double err98 = (estimate_tpdm(x, 0.98).sigma - analytic.sigma).cwiseAbs().maxCoeff();
    const double err999 = (estimate_tpdm(x, 0.999).sigma - analytic.sigma).cwiseAbs().maxCoeff();
    CHECK(err999 < err98);
    CHECK(err999 <= 1.0);

    // entries scale together; the normalized matrices carry the shape
    const Eigen::VectorXd d = analytic.sigma.diagonal().cwiseSqrt();
    const Eigen::MatrixXd normalized = analytic.sigma.array() / (d * d.transpose()).array();
    const StandardizedMatrix xs = standardize_columns(x.data);
    const double err_std =
        (estimate_tpdm(xs, 0.98).sigma - normalized).cwiseAbs().maxCoeff();
    CHECK(err_std <= 0.3);
}
