#pragma once

// Binary probit by maximum likelihood.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "jumpkit/features.hpp"

namespace jumpkit {

struct ProbitOptions {
    int max_iter = 200;
    double grad_tol = 1e-8;  // on the mean score of the column-scaled problem
    bool robust_se = false;  // sandwich instead of inverse observed information
};

struct ProbitFit {
    std::vector<std::string> names;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::VectorXd z;
    Eigen::VectorXd p;
    Eigen::MatrixXd cov;
    double loglik = 0.0;
    std::size_t n_obs = 0;
    int iterations = 0;
    std::vector<double> loglik_trace;  // one entry per accepted iterate

    Eigen::VectorXd fitted(const Eigen::MatrixXd& X) const;
};

double probit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd probit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta);
// Observed information -∇²ℓ.
Eigen::MatrixXd probit_information(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta);

// Newton–Raphson with step halving. Throws SeparationError for a constant
// outcome, RankDeficientDesign, or NonConvergence after max_iter.
ProbitFit fit_probit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::vector<std::string> names, const ProbitOptions& opts = {});

struct Design {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names;
};

// Rows flagged missing are dropped; outcome is y_next. Columns: intercept,
// [sub-period 2 and 3 dummies], ms, of, wr, price, rv, nv.
Design make_design(std::span<const FeatureRow> rows, bool fixed_effects);

// Φ(x̄β + β_j s_j) - Φ(x̄β) per column; 0 for the intercept.
std::vector<double> marginal_probabilities(const ProbitFit& fit, const Eigen::MatrixXd& X);

struct FitDiagnostics {
    double loglik_null = 0.0;
    double pseudo_r2 = 0.0;
    double adj_pseudo_r2 = 0.0;
    double lr_stat = 0.0;
    double lr_p = 1.0;
    int lr_df = 0;
};

FitDiagnostics fit_diagnostics(const ProbitFit& fit, const Eigen::VectorXd& y);

struct ProbitReport {
    bool fixed_effects = false;
    ProbitFit fit;
    std::vector<double> marginal;
    FitDiagnostics diagnostics;
};

ProbitReport fit_probit_report(std::span<const FeatureRow> rows, bool fixed_effects,
                               const ProbitOptions& opts = {});

void to_json(nlohmann::json& j, const ProbitReport& r);

}  // namespace jumpkit
