#include "jumpkit/probit.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "jumpkit/stats.hpp"

namespace jumpkit {

namespace {

struct ScoreParts {
    double loglik = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd info;
};

ScoreParts evaluate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    bool want_info) {
    ScoreParts s;
    const Eigen::Index p = X.cols();
    s.grad = Eigen::VectorXd::Zero(p);
    if (want_info) s.info = Eigen::MatrixXd::Zero(p, p);
    const Eigen::VectorXd index = X * beta;
    Eigen::VectorXd w(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double q = y[i] > 0.5 ? 1.0 : -1.0;
        const double z = q * index[i];
        const double lambda = stats::mills_ratio(z);
        s.loglik += stats::log_normal_cdf(z);
        s.grad.noalias() += (q * lambda) * X.row(i).transpose();
        w[i] = lambda * (lambda + z);
    }
    if (want_info) s.info.noalias() = X.transpose() * w.asDiagonal() * X;
    return s;
}

// A strictly separating index means the likelihood has no finite maximum.
bool separates(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd index = X * beta;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if ((y[i] > 0.5 ? index[i] : -index[i]) <= 0.0) return false;
    }
    return true;
}

}  // namespace

Eigen::VectorXd ProbitFit::fitted(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd idx = X * beta;
    for (Eigen::Index i = 0; i < idx.size(); ++i) idx[i] = stats::normal_cdf(idx[i]);
    return idx;
}

double probit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd index = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        ll += stats::log_normal_cdf(y[i] > 0.5 ? index[i] : -index[i]);
    }
    return ll;
}

Eigen::VectorXd probit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta) {
    return evaluate(X, y, beta, false).grad;
}

Eigen::MatrixXd probit_information(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta) {
    return evaluate(X, y, beta, true).info;
}

ProbitFit fit_probit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::vector<std::string> names, const ProbitOptions& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) throw std::invalid_argument("outcome length does not match design rows");
    if (static_cast<Eigen::Index>(names.size()) != p) names.resize(static_cast<std::size_t>(p));
    if (n == 0) throw RankDeficientDesign("empty design");
    const double ones = y.sum();
    if (ones == 0.0 || ones == static_cast<double>(n)) {
        throw SeparationError("outcome is constant; probit MLE does not exist");
    }

    // Fit on RMS-scaled columns so the score is comparable across covariates.
    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        scale[j] = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
        if (!(scale[j] > 0.0) || !std::isfinite(scale[j])) {
            throw RankDeficientDesign("design column '" + names[static_cast<std::size_t>(j)] + "' is zero");
        }
    }
    const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw RankDeficientDesign("design matrix is rank deficient");

    ProbitFit fit;
    fit.names = std::move(names);
    fit.n_obs = static_cast<std::size_t>(n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    ScoreParts cur = evaluate(Xs, y, b, true);
    fit.loglik_trace.push_back(cur.loglik);

    const double nd = static_cast<double>(n);
    bool converged = false;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (cur.grad.lpNorm<Eigen::Infinity>() / nd <= opts.grad_tol) {
            converged = true;
            break;
        }
        const Eigen::VectorXd step = cur.info.ldlt().solve(cur.grad);
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            const Eigen::VectorXd cand = b + t * step;
            const double ll = probit_loglik(Xs, y, cand);
            if (std::isfinite(ll) && ll >= cur.loglik) {
                b = cand;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (separates(Xs, y, b)) throw SeparationError("outcome is perfectly separated by the covariates");
        cur = evaluate(Xs, y, b, true);
        fit.loglik_trace.push_back(cur.loglik);
    }
    if (!converged && cur.grad.lpNorm<Eigen::Infinity>() / nd <= opts.grad_tol) converged = true;
    if (!converged) {
        throw NonConvergence("probit did not converge after " + std::to_string(it) + " iterations");
    }

    fit.iterations = it;
    fit.loglik = cur.loglik;
    const Eigen::MatrixXd inv_info = cur.info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd cov_s = inv_info;
    if (opts.robust_se) {
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
        const Eigen::VectorXd index = Xs * b;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double q = y[i] > 0.5 ? 1.0 : -1.0;
            const Eigen::VectorXd gi = (q * stats::mills_ratio(q * index[i])) * Xs.row(i).transpose();
            meat.noalias() += gi * gi.transpose();
        }
        cov_s = inv_info * meat * inv_info;
    }
    const Eigen::VectorXd inv_scale = scale.cwiseInverse();
    fit.beta = b.cwiseProduct(inv_scale);
    fit.cov = inv_scale.asDiagonal() * cov_s * inv_scale.asDiagonal();
    fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
    fit.se = fit.cov.diagonal().cwiseSqrt();
    fit.z = fit.beta.cwiseQuotient(fit.se);
    fit.p.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) fit.p[j] = stats::two_sided_normal_p(fit.z[j]);
    return fit;
}

Design make_design(std::span<const FeatureRow> rows, bool fixed_effects) {
    Design d;
    d.names = {"intercept"};
    if (fixed_effects) {
        d.names.push_back("subperiod_2");
        d.names.push_back("subperiod_3");
    }
    for (const char* name : {"ms", "of", "wr", "price", "rv", "nv"}) d.names.emplace_back(name);

    std::size_t used = 0;
    for (const auto& r : rows) used += r.missing ? 0 : 1;
    const auto p = static_cast<Eigen::Index>(d.names.size());
    d.X.resize(static_cast<Eigen::Index>(used), p);
    d.y.resize(static_cast<Eigen::Index>(used));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        if (r.missing) continue;
        Eigen::Index j = 0;
        d.X(i, j++) = 1.0;
        if (fixed_effects) {
            d.X(i, j++) = r.subperiod == 2 ? 1.0 : 0.0;
            d.X(i, j++) = r.subperiod == 3 ? 1.0 : 0.0;
        }
        for (double v : {r.ms, r.of, r.wr, r.price, r.rv, r.nv}) d.X(i, j++) = v;
        d.y[i] = r.y_next;
        ++i;
    }
    return d;
}

std::vector<double> marginal_probabilities(const ProbitFit& fit, const Eigen::MatrixXd& X) {
    const Eigen::Index p = X.cols();
    const double nd = static_cast<double>(X.rows());
    const Eigen::RowVectorXd xbar = X.colwise().mean();
    const double base = xbar.dot(fit.beta);
    std::vector<double> out(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var = (X.col(j).array() - xbar[j]).square().sum() / std::max(1.0, nd - 1.0);
        if (var == 0.0) continue;  // intercept or constant column
        const double sd = std::sqrt(var);
        out[static_cast<std::size_t>(j)] =
            stats::normal_cdf(base + fit.beta[j] * sd) - stats::normal_cdf(base);
    }
    return out;
}

FitDiagnostics fit_diagnostics(const ProbitFit& fit, const Eigen::VectorXd& y) {
    FitDiagnostics d;
    const double n = static_cast<double>(y.size());
    const double ybar = y.mean();
    d.loglik_null = n * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
    const double k = static_cast<double>(fit.beta.size());
    d.pseudo_r2 = 1.0 - fit.loglik / d.loglik_null;
    d.adj_pseudo_r2 = 1.0 - (fit.loglik - k) / d.loglik_null;
    d.lr_stat = 2.0 * (fit.loglik - d.loglik_null);
    d.lr_df = static_cast<int>(fit.beta.size()) - 1;
    d.lr_p = d.lr_df > 0 ? stats::chi_squared_sf(d.lr_stat, d.lr_df) : 1.0;
    return d;
}

ProbitReport fit_probit_report(std::span<const FeatureRow> rows, bool fixed_effects,
                               const ProbitOptions& opts) {
    const auto design = make_design(rows, fixed_effects);
    ProbitReport r;
    r.fixed_effects = fixed_effects;
    r.fit = fit_probit(design.X, design.y, design.names, opts);
    r.marginal = marginal_probabilities(r.fit, design.X);
    r.diagnostics = fit_diagnostics(r.fit, design.y);
    return r;
}

void to_json(nlohmann::json& j, const ProbitReport& r) {
    nlohmann::json coefs = nlohmann::json::array();
    for (std::size_t i = 0; i < r.fit.names.size(); ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        coefs.push_back({{"name", r.fit.names[i]},
                         {"estimate", r.fit.beta[e]},
                         {"std_error", r.fit.se[e]},
                         {"z", r.fit.z[e]},
                         {"p_value", r.fit.p[e]},
                         {"marginal_probability", r.marginal.at(i)}});
    }
    j = nlohmann::json{{"fixed_effects", r.fixed_effects},
                       {"n_obs", r.fit.n_obs},
                       {"iterations", r.fit.iterations},
                       {"loglik", r.fit.loglik},
                       {"loglik_null", r.diagnostics.loglik_null},
                       {"pseudo_r2", r.diagnostics.pseudo_r2},
                       {"adj_pseudo_r2", r.diagnostics.adj_pseudo_r2},
                       {"lr_stat", r.diagnostics.lr_stat},
                       {"lr_df", r.diagnostics.lr_df},
                       {"lr_p_value", r.diagnostics.lr_p},
                       {"coefficients", coefs}};
}

}  // namespace jumpkit
