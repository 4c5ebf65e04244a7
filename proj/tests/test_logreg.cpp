#include <doctest.h>

#include <cmath>
#include <vector>

#include "cgain/error.hpp"
#include "cgain/logreg.hpp"
#include "cgain/random.hpp"

using namespace cgain;

namespace {

// Gradient of sum log-loss + ridge/2 |w|^2, evaluated from scratch.
VectorXd objective_gradient(const MatrixXd& x, const std::vector<int>& y, double ridge, const LogisticModel& m) {
    VectorXd g = VectorXd::Zero(x.cols() + 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double z = x.row(i).dot(m.weights) + m.intercept;
        const double r = 1.0 / (1.0 + std::exp(-z)) - y[static_cast<std::size_t>(i)];
        g.head(x.cols()) += r * x.row(i).transpose();
        g(x.cols()) += r;
    }
    g.head(x.cols()) += ridge * m.weights;
    return g;
}

}  // namespace

TEST_CASE("intercept-only fit") {
    const MatrixXd x = MatrixXd::Zero(20, 2);
    const std::vector<int> y(20, 1);
    const auto m = fit_logreg_ridge(x, y, 1e-3, {1e-6, 100000});
    CHECK((m.predict_proba(x).array() > 0.9).all());
}

TEST_CASE("separable 1-d data") {
    MatrixXd x(8, 1);
    x << -4, -3, -2, -1, 1, 2, 3, 4;
    const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
    const auto m = fit_logreg_ridge(x, y, 1e-4);
    const VectorXd p = m.predict_proba(x);
    for (Eigen::Index i = 0; i < 8; ++i) CHECK((p(i) >= 0.5 ? 1 : 0) == y[static_cast<std::size_t>(i)]);
}

TEST_CASE("first-order condition at the returned optimum") {
    Rng rng(31);
    for (const double ridge : {0.01, 1.0, 10.0}) {
        MatrixXd x(150, 12);
        std::vector<int> y(150);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform() < 0.3 ? 1.0 : 0.0;
            const double z = 1.5 * x(i, 0) - x(i, 1) + 0.5 * x(i, 2) - 0.3;
            y[static_cast<std::size_t>(i)] = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
        }
        const auto m = fit_logreg_ridge(x, y, ridge);
        CHECK(objective_gradient(x, y, ridge, m).norm() < 1e-6);
    }
}

TEST_CASE("input validation and iteration cap") {
    MatrixXd x(3, 1);
    x << 0, 1, 2;
    CHECK_THROWS_AS(fit_logreg_ridge(x, std::vector<int>{0, 1}, 1.0), DimensionError);
    CHECK_THROWS_AS(fit_logreg_ridge(x, std::vector<int>{0, 1, 2}, 1.0), Error);
    MatrixXd bad = x;
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(fit_logreg_ridge(bad, std::vector<int>{0, 1, 1}, 1.0), Error);
    CHECK_THROWS_AS(fit_logreg_ridge(x, std::vector<int>{0, 1, 1}, 1.0, {1e-12, 1}), NumericError);
}
