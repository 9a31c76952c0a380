#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cheapsub/errors.hpp"
#include "cheapsub/logistic.hpp"
#include "cheapsub/longitudinal.hpp"
#include "cheapsub/numerics.hpp"

namespace cheapsub {

namespace {

constexpr double kLogitClamp = 1e-12;

using RowPredicate = std::function<bool(const LongitudinalRecord&)>;
using RowFeatures = std::function<void(const LongitudinalRecord&, double*)>;

double safe_logit(double p) { return logit(std::clamp(p, kLogitClamp, 1.0 - kLogitClamp)); }

double shifted(double p, double eps)
{
    if (eps == -std::numeric_limits<double>::infinity()) return 0.0;
    if (eps == std::numeric_limits<double>::infinity()) return 1.0;
    return expit(safe_logit(p) + eps);
}

Eigen::MatrixXd design(const std::vector<const LongitudinalRecord*>& rows, int p, const RowFeatures& features)
{
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), p);
    std::vector<double> buf(static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        features(*rows[i], buf.data());
        for (int j = 0; j < p; ++j) X(static_cast<Eigen::Index>(i), j) = buf[static_cast<std::size_t>(j)];
    }
    return X;
}

double linear(const Eigen::VectorXd& beta, const double* x)
{
    double eta = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) eta += beta[j] * x[j];
    return eta;
}

// Fits a binary or fractional outcome on the rows selected by `train`.
Eigen::VectorXd fit_on(const LongitudinalDataset& data, const RowPredicate& train, int p,
                       const RowFeatures& features, const std::function<double(const LongitudinalRecord&)>& outcome,
                       const char* model, bool bounded = false)
{
    std::vector<const LongitudinalRecord*> rows;
    for (const auto& r : data.records) {
        if (train(r)) rows.push_back(&r);
    }
    if (rows.empty()) throw EstimatorFailure(std::string(model) + ": no training records");
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = outcome(*rows[i]);
    try {
        // Treatment and censoring predictions are clipped before use, so a
        // diverging coefficient under quasi-separation is harmless there.
        LogisticOptions options;
        if (bounded) options.separation_threshold = std::numeric_limits<double>::infinity();
        return fit_logistic(design(rows, p, features), y, options).coefficients;
    } catch (const EstimatorFailure& e) {
        throw EstimatorFailure(std::string(model) + ": " + e.what());
    }
}

// Censoring model: returns an empty vector when nobody was censored.
Eigen::VectorXd fit_censoring(const LongitudinalDataset& data, const RowPredicate& at_risk, int p,
                              const RowFeatures& features, const std::function<std::int8_t(const LongitudinalRecord&)>& c,
                              const char* model)
{
    bool any_censored = false;
    for (const auto& r : data.records) {
        if (at_risk(r) && c(r) == 0) {
            any_censored = true;
            break;
        }
    }
    if (!any_censored) return {};
    return fit_on(data, at_risk, p, features, [&](const LongitudinalRecord& r) { return double(c(r) == 1); }, model,
                  true);
}

}  // namespace

LongitudinalFit fit_longitudinal_risk(const LongitudinalDataset& data, const LongitudinalOptions& opt)
{
    if (opt.regime != 0 && opt.regime != 1) throw std::invalid_argument("regime must be 0 or 1");
    if (!(opt.probability_floor > 0.0 && opt.probability_floor < opt.probability_ceiling &&
          opt.probability_ceiling <= 1.0)) {
        throw std::invalid_argument("probability bounds must satisfy 0 < floor < ceiling <= 1");
    }
    const std::size_t n = data.records.size();
    if (n < 2) throw DataError("longitudinal estimator needs at least 2 records");
    validate(data);
    const auto a = static_cast<std::int8_t>(opt.regime);
    const double ad = opt.regime;

    auto consistent1 = [a](const LongitudinalRecord& r) { return r.a0 == a && r.c1 == 1; };
    auto at_risk2 = [](const LongitudinalRecord& r) { return r.c1 == 1 && r.y1 == 0; };
    auto in_r2 = [a](const LongitudinalRecord& r) { return r.a0 == a && r.c1 == 1 && r.y1 == 0; };
    auto follower2 = [a](const LongitudinalRecord& r) {
        return r.a0 == a && r.c1 == 1 && r.y1 == 0 && r.a1 == a && r.c2 == 1;
    };

    LongitudinalFit out;
    NuisanceModelSet& nu = out.nuisance;

    // Time-2 outcome regression.
    const bool pooled = opt.q2_scope == OutcomeRegressionScope::pooled;
    const int q2_p = (pooled ? 5 : 3) + (opt.q2_interaction ? 1 : 0);
    auto q2_features = [&](const LongitudinalRecord& r, double* x, bool set_regime) {
        int j = 0;
        x[j++] = 1.0;
        x[j++] = r.w0;
        if (pooled) x[j++] = set_regime ? ad : r.a0;
        x[j++] = r.w1;
        if (pooled) x[j++] = set_regime ? ad : r.a1;
        if (opt.q2_interaction) x[j++] = r.w0 * r.w1;
    };
    RowPredicate q2_train = pooled ? RowPredicate([](const LongitudinalRecord& r) {
        return r.c1 == 1 && r.y1 == 0 && r.c2 == 1;
    })
                                   : RowPredicate(follower2);
    nu.outcome2 = fit_on(
        data, q2_train, q2_p, [&](const LongitudinalRecord& r, double* x) { q2_features(r, x, false); },
        [](const LongitudinalRecord& r) { return double(r.y2); }, "outcome model (time 2)");

    const bool need_weights = opt.targeting || opt.compute_influence;
    std::vector<double> h1(n, 0.0);  // 1/(g_A0 g_C1) on consistent1 rows
    std::vector<double> h2(n, 0.0);  // h1/(g_A1 g_C2) on follower rows
    if (need_weights) {
        auto bound = [&](double p) { return std::clamp(p, opt.probability_floor, opt.probability_ceiling); };
        auto all = [](const LongitudinalRecord&) { return true; };
        auto f_a0 = [](const LongitudinalRecord& r, double* x) {
            x[0] = 1.0;
            x[1] = r.w0;
        };
        auto f_c1 = [](const LongitudinalRecord& r, double* x) {
            x[0] = 1.0;
            x[1] = r.w0;
            x[2] = r.a0;
        };
        auto f_a1 = [](const LongitudinalRecord& r, double* x) {
            x[0] = 1.0;
            x[1] = r.w0;
            x[2] = r.a0;
            x[3] = r.w1;
        };
        auto f_c2 = [](const LongitudinalRecord& r, double* x) {
            x[0] = 1.0;
            x[1] = r.w0;
            x[2] = r.a0;
            x[3] = r.w1;
            x[4] = r.a1;
        };
        nu.treatment0 = fit_on(data, all, 2, f_a0, [](const LongitudinalRecord& r) { return double(r.a0 == 1); },
                               "treatment model (time 0)", true);
        nu.censoring1 = fit_censoring(data, all, 3, f_c1, [](const LongitudinalRecord& r) { return r.c1; },
                                      "censoring model (time 1)");
        nu.treatment1 = fit_on(data, at_risk2, 4, f_a1, [](const LongitudinalRecord& r) { return double(r.a1 == 1); },
                               "treatment model (time 1)", true);
        nu.censoring2 = fit_censoring(data, at_risk2, 5, f_c2, [](const LongitudinalRecord& r) { return r.c2; },
                                      "censoring model (time 2)");

        double x[5];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = data.records[i];
            if (!consistent1(r)) continue;
            f_a0(r, x);
            const double p_a1 = expit(linear(nu.treatment0, x));
            const double g_a0 = bound(a == 1 ? p_a1 : 1.0 - p_a1);
            f_c1(r, x);
            const double g_c1 = bound(nu.censoring1.size() ? expit(linear(nu.censoring1, x)) : 1.0);
            h1[i] = 1.0 / (g_a0 * g_c1);
            if (!follower2(r)) continue;
            f_a1(r, x);
            const double p_t1 = expit(linear(nu.treatment1, x));
            const double g_a1 = bound(a == 1 ? p_t1 : 1.0 - p_t1);
            f_c2(r, x);
            const double g_c2 = bound(nu.censoring2.size() ? expit(linear(nu.censoring2, x)) : 1.0);
            h2[i] = h1[i] / (g_a1 * g_c2);
        }
    }

    // Predict Q2 under the regime on regime-consistent records at risk at time 2.
    std::vector<double> q2(n, 0.0);
    {
        double x[6];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = data.records[i];
            if (!in_r2(r)) continue;
            q2_features(r, x, true);
            q2[i] = expit(linear(nu.outcome2, x));
        }
    }

    std::vector<double> off;
    std::vector<double> yy;
    std::vector<double> ww;
    if (opt.targeting) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = data.records[i];
            if (!follower2(r)) continue;
            ++out.followers;
            off.push_back(safe_logit(q2[i]));
            yy.push_back(r.y2);
            ww.push_back(h2[i]);
        }
        if (!yy.empty()) out.fluctuation2 = solve_logistic_shift(off, yy, ww);
        if (out.fluctuation2 != 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (in_r2(data.records[i])) q2[i] = shifted(q2[i], out.fluctuation2);
            }
        }
    } else {
        for (const auto& r : data.records) out.followers += follower2(r) ? 1 : 0;
    }

    // Pseudo-outcome at time 1: the event itself, else the time-2 prediction.
    std::vector<double> z1(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = data.records[i];
        if (!consistent1(r)) continue;
        z1[i] = r.y1 == 1 ? 1.0 : q2[i];
    }
    auto f_q1 = [](const LongitudinalRecord& r, double* x) {
        x[0] = 1.0;
        x[1] = r.w0;
    };
    {
        std::vector<const LongitudinalRecord*> rows;
        std::vector<double> outcome;
        for (std::size_t i = 0; i < n; ++i) {
            if (!consistent1(data.records[i])) continue;
            rows.push_back(&data.records[i]);
            outcome.push_back(z1[i]);
        }
        if (rows.empty()) throw EstimatorFailure("outcome model (time 1): no regime-consistent records");
        try {
            nu.outcome1 =
                fit_logistic(design(rows, 2, f_q1), Eigen::Map<const Eigen::VectorXd>(outcome.data(), outcome.size()))
                    .coefficients;
        } catch (const EstimatorFailure& e) {
            throw EstimatorFailure(std::string("outcome model (time 1): ") + e.what());
        }
    }
    std::vector<double> q1(n);
    {
        double x[2];
        for (std::size_t i = 0; i < n; ++i) {
            f_q1(data.records[i], x);
            q1[i] = expit(linear(nu.outcome1, x));
        }
    }
    if (opt.targeting) {
        off.clear();
        yy.clear();
        ww.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (!consistent1(data.records[i])) continue;
            off.push_back(safe_logit(q1[i]));
            yy.push_back(z1[i]);
            ww.push_back(h1[i]);
        }
        out.fluctuation1 = solve_logistic_shift(off, yy, ww);
        if (out.fluctuation1 != 0.0) {
            for (auto& v : q1) v = shifted(v, out.fluctuation1);
        }
    }

    double sum = 0.0;
    for (double v : q1) sum += v;
    const double psi = sum / static_cast<double>(n);
    if (!std::isfinite(psi)) throw EstimatorFailure("longitudinal estimator: non-finite estimate");
    out.estimate.point = psi;

    if (opt.compute_influence) {
        std::vector<double> phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = data.records[i];
            double v = q1[i] - psi;
            if (consistent1(r)) v += h1[i] * (z1[i] - q1[i]);
            if (follower2(r)) v += h2[i] * (r.y2 - q2[i]);
            phi[i] = v;
        }
        out.estimate.influence = std::move(phi);
    }
    return out;
}

EstimateWithIF LongitudinalEstimator::fit(const LongitudinalDataset& data) const
{
    return fit_longitudinal_risk(data, options).estimate;
}

double LongitudinalEstimator::fit_point(const LongitudinalDataset& data) const
{
    LongitudinalOptions point_only = options;
    point_only.compute_influence = false;
    return fit_longitudinal_risk(data, point_only).estimate.point;
}

}  // namespace cheapsub
