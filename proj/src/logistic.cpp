#include "cheapsub/logistic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cheapsub/errors.hpp"
#include "cheapsub/numerics.hpp"

namespace cheapsub {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept
{
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y, const Eigen::VectorXd& w)
{
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (w[i] == 0.0) continue;
        ll += w[i] * (y[i] * eta[i] - softplus(eta[i]));
    }
    return ll;
}

void validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
              const Eigen::VectorXd& offset)
{
    const auto n = X.rows();
    if (y.size() != n || w.size() != n || offset.size() != n) {
        throw std::invalid_argument("fit_logistic: dimension mismatch");
    }
    if (X.cols() == 0) throw std::invalid_argument("fit_logistic: design has no columns");
    if (!X.allFinite() || !offset.allFinite()) throw DataError("fit_logistic: non-finite design or offset");
    Eigen::Index active = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(y[i] >= 0.0 && y[i] <= 1.0)) throw DataError("fit_logistic: outcome outside [0, 1]");
        if (!(w[i] >= 0.0) || !std::isfinite(w[i])) throw DataError("fit_logistic: weights must be finite and >= 0");
        if (w[i] > 0.0) ++active;
    }
    if (active <= X.cols()) {
        throw EstimatorFailure("fit_logistic: need more weighted rows (" + std::to_string(active) +
                               ") than coefficients (" + std::to_string(X.cols()) + ")");
    }
}

}  // namespace

LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LogisticOptions& options)
{
    return fit_logistic(X, y, Eigen::VectorXd(), Eigen::VectorXd(), options);
}

LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& weights_in,
                         const Eigen::VectorXd& offset_in, const LogisticOptions& options)
{
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const Eigen::VectorXd w = weights_in.size() == 0 ? Eigen::VectorXd::Ones(n) : weights_in;
    const Eigen::VectorXd offset = offset_in.size() == 0 ? Eigen::VectorXd::Zero(n) : offset_in;
    validate(X, y, w, offset);

    const double total_weight = w.sum();
    const double event_mass = w.dot(y);
    if (event_mass <= 0.0 || event_mass >= total_weight) {
        throw EstimatorFailure("fit_logistic: separation (outcome is constant on weighted rows)");
    }

    {
        // Rank check on the weighted rows.
        Eigen::MatrixXd active(n, p);
        Eigen::Index rows = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w[i] > 0.0) active.row(rows++) = X.row(i) * std::sqrt(w[i]);
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(active.topRows(rows));
        qr.setThreshold(1e-10);
        if (qr.rank() < p) throw EstimatorFailure("fit_logistic: singular design (collinear columns)");
    }

    LogisticFit fit;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    const bool has_intercept = (X.col(0).array() == 1.0).all();
    if (has_intercept && offset.isZero()) fit.coefficients[0] = logit(event_mass / total_weight);

    Eigen::VectorXd eta = X * fit.coefficients + offset;
    double ll = log_likelihood(eta, y, w);
    Eigen::VectorXd prob(n);
    Eigen::VectorXd resid(n);
    Eigen::VectorXd sqrt_curv(n);
    bool converged = false;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        for (Eigen::Index i = 0; i < n; ++i) {
            prob[i] = expit(eta[i]);
            resid[i] = w[i] * (y[i] - prob[i]);
            sqrt_curv[i] = std::sqrt(w[i] * prob[i] * (1.0 - prob[i]));
        }
        const Eigen::VectorXd score = X.transpose() * resid;
        fit.max_abs_score = score.cwiseAbs().maxCoeff();
        fit.iterations = iter - 1;
        if (fit.max_abs_score < options.score_tolerance) {
            converged = true;
            break;
        }

        const Eigen::MatrixXd Xs = X.array().colwise() * sqrt_curv.array();
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
        info.selfadjointView<Eigen::Lower>().rankUpdate(Xs.transpose());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info.selfadjointView<Eigen::Lower>());
        if (ldlt.info() != Eigen::Success) throw EstimatorFailure("fit_logistic: information matrix is singular");
        const Eigen::VectorXd step = ldlt.solve(score);
        if (!step.allFinite()) throw EstimatorFailure("fit_logistic: non-finite Newton step");

        // Step halving guards against overshoot far from the optimum.
        double scale = 1.0;
        Eigen::VectorXd candidate;
        Eigen::VectorXd candidate_eta;
        double candidate_ll = -std::numeric_limits<double>::infinity();
        for (int half = 0; half < 40; ++half) {
            candidate = fit.coefficients + scale * step;
            candidate_eta = X * candidate + offset;
            candidate_ll = log_likelihood(candidate_eta, y, w);
            if (candidate_ll >= ll - 1e-12 * std::abs(ll)) break;
            scale *= 0.5;
        }
        const double change = std::abs(candidate_ll - ll);
        fit.coefficients = candidate;
        eta = candidate_eta;
        const double previous = ll;
        ll = candidate_ll;
        fit.iterations = iter;
        if (change <= options.loglik_tolerance * std::abs(previous)) {
            converged = true;
            Eigen::VectorXd r(n);
            for (Eigen::Index i = 0; i < n; ++i) r[i] = w[i] * (y[i] - expit(eta[i]));
            fit.max_abs_score = (X.transpose() * r).cwiseAbs().maxCoeff();
            break;
        }
    }
    if (!converged) {
        throw EstimatorFailure("fit_logistic: no convergence within " + std::to_string(options.max_iterations) +
                               " iterations");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w[i] > 0.0 && std::abs(eta[i]) > options.separation_threshold) {
            throw EstimatorFailure("fit_logistic: quasi-complete separation (fitted probability at 0 or 1)");
        }
    }
    fit.log_likelihood = ll;
    return fit;
}

Eigen::VectorXd predict_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& coefficients)
{
    Eigen::VectorXd eta = X * coefficients;
    for (auto& v : eta) v = expit(v);
    return eta;
}

Eigen::VectorXd logistic_score(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& offset, const Eigen::VectorXd& coefficients)
{
    const Eigen::Index n = X.rows();
    Eigen::VectorXd eta = X * coefficients;
    if (offset.size() != 0) eta += offset;
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = weights.size() == 0 ? 1.0 : weights[i];
        r[i] = wi * (y[i] - expit(eta[i]));
    }
    return X.transpose() * r;
}

double solve_logistic_shift(std::span<const double> offset, std::span<const double> y,
                            std::span<const double> weights)
{
    if (offset.size() != y.size() || weights.size() != y.size()) {
        throw std::invalid_argument("solve_logistic_shift: size mismatch");
    }
    double total = 0.0;
    double events = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total += weights[i];
        events += weights[i] * y[i];
    }
    if (total <= 0.0) throw EstimatorFailure("solve_logistic_shift: no weighted rows");
    if (events <= 0.0) return -std::numeric_limits<double>::infinity();
    if (events >= total) return std::numeric_limits<double>::infinity();

    auto score = [&](double eps, double* slope) {
        double f = 0.0;
        double d = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (weights[i] == 0.0) continue;
            const double pr = expit(offset[i] + eps);
            f += weights[i] * (y[i] - pr);
            d += weights[i] * pr * (1.0 - pr);
        }
        if (slope) *slope = d;
        return f;  // decreasing in eps
    };

    double lo = -1.0;
    double hi = 1.0;
    while (score(lo, nullptr) < 0.0) {
        lo *= 2.0;
        if (lo < -1e3) throw EstimatorFailure("solve_logistic_shift: cannot bracket root");
    }
    while (score(hi, nullptr) > 0.0) {
        hi *= 2.0;
        if (hi > 1e3) throw EstimatorFailure("solve_logistic_shift: cannot bracket root");
    }
    const double tol = 1e-11 * std::max(1.0, total);
    double eps = 0.0;
    if (eps <= lo || eps >= hi) eps = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double slope = 0.0;
        const double f = score(eps, &slope);
        if (std::abs(f) < tol) return eps;
        if (f > 0.0) lo = eps; else hi = eps;
        double next = slope > 0.0 ? eps + f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo < 1e-15) return next;
        eps = next;
    }
    throw EstimatorFailure("solve_logistic_shift: no convergence");
}

}  // namespace cheapsub
