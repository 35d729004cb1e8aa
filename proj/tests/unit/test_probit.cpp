#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jumpkit/probit.hpp"
#include "jumpkit/stats.hpp"

using namespace jumpkit;

namespace {

struct Sim {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

Sim simulate(std::size_t n, const Eigen::VectorXd& beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Sim s;
    const auto p = beta.size();
    s.X.resize(static_cast<Eigen::Index>(n), p);
    s.y.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
        s.X(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < p; ++j) s.X(i, j) = g(rng) * static_cast<double>(j);
        const double z = s.X.row(i).dot(beta) + g(rng);
        s.y[i] = z > 0.0 ? 1.0 : 0.0;
    }
    return s;
}

std::vector<std::string> names(Eigen::Index p) {
    std::vector<std::string> n{"intercept"};
    for (Eigen::Index j = 1; j < p; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

}  // namespace

TEST(Probit, GradientMatchesFiniteDifferences) {
    Eigen::VectorXd truth(4);
    truth << -0.5, 0.4, -0.2, 0.1;
    const auto s = simulate(2000, truth, 1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int r = 0; r < 20; ++r) {
        Eigen::VectorXd b(4);
        for (auto& v : b) v = u(rng);
        const auto g = probit_gradient(s.X, s.y, b);
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(b[j]));
            Eigen::VectorXd bp = b, bm = b;
            bp[j] += h;
            bm[j] -= h;
            const double fd = (probit_loglik(s.X, s.y, bp) - probit_loglik(s.X, s.y, bm)) / (2 * h);
            EXPECT_LE(std::abs(fd - g[j]), 1e-6 * std::max(1.0, std::abs(g[j])));
        }
    }
}

TEST(Probit, RecoversCoefficientsAndLikelihoodIncreases) {
    Eigen::VectorXd truth(3);
    truth << -1.2, 0.5, -0.25;
    const auto s = simulate(20000, truth, 3);
    const auto fit = fit_probit(s.X, s.y, names(3));
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_LT(std::abs(fit.beta[j] - truth[j]), 4.0 * fit.se[j]);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
        EXPECT_GE(fit.loglik_trace[i], fit.loglik_trace[i - 1]);
    }
    EXPECT_NEAR(fit.loglik, probit_loglik(s.X, s.y, fit.beta), 1e-6 * std::abs(fit.loglik));
    const Eigen::MatrixXd asym = fit.cov - fit.cov.transpose();
    EXPECT_EQ(asym.norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.cov);
    EXPECT_GE(es.eigenvalues().minCoeff(), 0.0);
    const auto f = fit.fitted(s.X);
    EXPECT_GT(f.minCoeff(), 0.0);
    EXPECT_LT(f.maxCoeff(), 1.0);
}

TEST(Probit, RobustErrorsClose) {
    Eigen::VectorXd truth(2);
    truth << 0.3, 0.6;
    const auto s = simulate(5000, truth, 4);
    ProbitOptions o;
    o.robust_se = true;
    const auto a = fit_probit(s.X, s.y, names(2));
    const auto b = fit_probit(s.X, s.y, names(2), o);
    EXPECT_EQ(a.beta, b.beta);
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(b.se[j] / a.se[j], 1.0, 0.15);
}

TEST(Probit, ScaleInvariance) {
    Eigen::VectorXd truth(3);
    truth << -0.3, 0.7, 0.2;
    auto s = simulate(4000, truth, 5);
    const auto a = fit_probit(s.X, s.y, names(3));
    const double k = 1e-4;
    Sim t = s;
    t.X.col(2) *= k;
    const auto b = fit_probit(t.X, t.y, names(3));
    EXPECT_NEAR(b.beta[2] * k, a.beta[2], 1e-8 * std::abs(a.beta[2]) + 1e-10);
    EXPECT_LE((a.fitted(s.X) - b.fitted(t.X)).cwiseAbs().maxCoeff(), 1e-8);
    const auto da = fit_diagnostics(a, s.y);
    const auto db = fit_diagnostics(b, t.y);
    EXPECT_NEAR(da.adj_pseudo_r2, db.adj_pseudo_r2, 1e-8);
    const auto ma = marginal_probabilities(a, s.X);
    const auto mb = marginal_probabilities(b, t.X);
    for (std::size_t j = 0; j < ma.size(); ++j) EXPECT_NEAR(ma[j], mb[j], 1e-8);
}

TEST(Probit, ConstantOutcomeIsNotFitted) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(50, 2);
    X.col(1).setLinSpaced(50, -1, 1);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(50);
    EXPECT_THROW(fit_probit(X, y, names(2)), SeparationError);
    y.setOnes();
    EXPECT_THROW(fit_probit(X, y, names(2)), NonConvergence);
}

TEST(Probit, PerfectSeparationRejected) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(40, 2);
    X.col(1).setLinSpaced(40, -1, 1);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) y[i] = X(i, 1) > 0 ? 1.0 : 0.0;
    EXPECT_THROW(fit_probit(X, y, names(2)), SeparationError);
}

TEST(Probit, RankDeficient) {
    Eigen::VectorXd truth(2);
    truth << 0.1, 0.5;
    auto s = simulate(500, truth, 6);
    Eigen::MatrixXd X(s.X.rows(), 3);
    X << s.X, 2.0 * s.X.col(1);
    EXPECT_THROW(fit_probit(X, s.y, names(3)), RankDeficientDesign);
    X.col(2).setZero();
    EXPECT_THROW(fit_probit(X, s.y, names(3)), RankDeficientDesign);
}

TEST(Probit, MarginalsZeroWhenCoefficientZero) {
    Eigen::VectorXd truth(1);
    truth << 0.4;
    const auto s = simulate(1000, truth, 7);
    const auto fit = fit_probit(s.X, s.y, names(1));
    for (double m : marginal_probabilities(fit, s.X)) EXPECT_EQ(m, 0.0);

    ProbitFit f;
    f.beta = Eigen::VectorXd::Zero(3);
    f.beta[0] = 0.2;
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(100, 3);
    X.col(0).setOnes();
    const auto m = marginal_probabilities(f, X);
    EXPECT_EQ(m[1], 0.0);
    EXPECT_EQ(m[2], 0.0);
}

TEST(Probit, DiagnosticsIntercept) {
    Eigen::VectorXd truth(1);
    truth << -0.8;
    const auto s = simulate(3000, truth, 8);
    const auto fit = fit_probit(s.X, s.y, names(1));
    const auto d = fit_diagnostics(fit, s.y);
    EXPECT_NEAR(fit.loglik, d.loglik_null, 1e-6);
    EXPECT_NEAR(d.pseudo_r2, 0.0, 1e-9);
    EXPECT_EQ(d.lr_df, 0);
    EXPECT_NEAR(fit.beta[0], -0.8, 0.05);
}

TEST(Probit, DesignFromFeatures) {
    std::vector<FeatureRow> rows(6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].ms = 0.01 * static_cast<double>(i);
        rows[i].of = 10.0 * static_cast<double>(i);
        rows[i].subperiod = static_cast<int>(i % 3) + 1;
        rows[i].y_next = static_cast<int>(i % 2);
    }
    rows[3].missing = true;
    const auto d = make_design(rows, true);
    EXPECT_EQ(d.X.rows(), 5);
    EXPECT_EQ(d.names, (std::vector<std::string>{"intercept", "subperiod_2", "subperiod_3", "ms", "of", "wr",
                                                  "price", "rv", "nv"}));
    EXPECT_EQ(d.X(1, 1), 1.0);  // row 1 is sub-period 2
    EXPECT_EQ(d.X(2, 2), 1.0);
    EXPECT_EQ(d.X(3, 3), 0.04);  // row 4 after dropping row 3
    EXPECT_EQ(d.y[3], 0.0);
    const auto n = make_design(rows, false);
    EXPECT_EQ(n.X.cols(), 7);
}
