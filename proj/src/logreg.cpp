#include "cgain/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cgain/error.hpp"

namespace cgain {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Problem {
    const MatrixXd& x;
    const VectorXd& y;
    double ridge;

    // Parameters are [w; b].
    double objective(const VectorXd& theta) const {
        const auto d = x.cols();
        const VectorXd z = (x * theta.head(d)).array() + theta(d);
        double f = 0.5 * ridge * theta.head(d).squaredNorm();
        for (Eigen::Index i = 0; i < z.size(); ++i) f += softplus(z(i)) - y(i) * z(i);
        return f;
    }

    VectorXd gradient(const VectorXd& theta) const {
        const auto d = x.cols();
        const VectorXd z = (x * theta.head(d)).array() + theta(d);
        VectorXd residual(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - y(i);
        VectorXd g(d + 1);
        g.head(d) = x.transpose() * residual + ridge * theta.head(d);
        g(d) = residual.sum();
        return g;
    }
};

}  // namespace

VectorXd LogisticModel::predict_proba(const MatrixXd& features) const {
    if (features.cols() != weights.size()) throw DimensionError("predict_proba: feature width mismatch");
    VectorXd z = (features * weights).array() + intercept;
    return z.unaryExpr(&sigmoid);
}

LogisticModel fit_logreg_ridge(const MatrixXd& features, std::span<const int> labels, double ridge,
                               const LogregOptions& options) {
    if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.empty()) {
        throw DimensionError("fit_logreg_ridge: need one label per row");
    }
    if (!features.allFinite()) throw Error("fit_logreg_ridge: non-finite features");
    if (ridge < 0.0) throw Error("fit_logreg_ridge: ridge must be non-negative");
    VectorXd y(features.rows());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw Error("fit_logreg_ridge: labels must be 0 or 1");
        y(static_cast<Eigen::Index>(i)) = labels[i];
    }

    const Problem problem{features, y, ridge};
    const auto d = features.cols();
    VectorXd theta = VectorXd::Zero(d + 1);
    double f = problem.objective(theta);
    VectorXd g = problem.gradient(theta);
    double step = 1.0 / (0.25 * (features.squaredNorm() + static_cast<double>(features.rows())) + ridge);

    // Nonmonotone Armijo test against the worst of the last few objective
    // values, so BB steps are not cut back needlessly. The slack absorbs
    // rounding once f stops changing in the last digits.
    constexpr std::size_t memory = 10;
    std::vector<double> recent{f};
    std::size_t it = 0;
    for (; it < options.max_iterations && g.norm() >= options.gradient_tolerance; ++it) {
        const double f_ref = *std::max_element(recent.begin(), recent.end());
        const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(f_ref);
        double t = step;
        VectorXd next = theta - t * g;
        double f_next = problem.objective(next);
        const double g2 = g.squaredNorm();
        while (f_next > f_ref - 1e-4 * t * g2 + slack) {
            t *= 0.5;
            if (t < 1e-20) break;
            next = theta - t * g;
            f_next = problem.objective(next);
        }
        const VectorXd g_next = problem.gradient(next);
        const VectorXd s = next - theta;
        const VectorXd r = g_next - g;
        const double sr = s.dot(r);
        // Barzilai-Borwein step for the next trial.
        step = sr > 0.0 ? std::clamp(s.squaredNorm() / sr, 1e-12, 1e12) : 2.0 * t;
        theta = next;
        f = f_next;
        recent.push_back(f);
        if (recent.size() > memory) recent.erase(recent.begin());
        g = g_next;
    }
    if (g.norm() >= options.gradient_tolerance) {
        throw NumericError("logistic regression did not reach gradient norm " +
                               std::to_string(options.gradient_tolerance),
                           it);
    }
    LogisticModel model;
    model.weights = theta.head(d);
    model.intercept = theta(d);
    model.iterations = it;
    return model;
}

}  // namespace cgain
