#pragma once

#include "panelegls/numerics.hpp"
#include "panelegls/panel.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panelegls {

enum class Method { pooled_ols, fixed_effects, random_effects, egls_period_sur };

std::string_view method_name(Method m);
std::string_view covariance_description(CovarianceKind c);

/// Summary statistics of one residual vector against one dependent vector.
struct FitStats {
    double r_squared = 0;
    double adj_r_squared = 0;
    double se_regression = 0;
    double ssr = 0;
    /// Absent for models without a constant or with no slope regressors.
    std::optional<double> f_statistic;
    std::optional<double> prob_f;
    double durbin_watson = 0;
    double mean_dep = 0;
    double sd_dep = 0;
};

struct VarianceComponents {
    double sigma2_e = 0;  ///< idiosyncratic
    double sigma2_u = 0;  ///< entity effect
};

struct EstimationResult {
    Method method = Method::pooled_ols;
    CovarianceKind covariance_kind = CovarianceKind::ordinary;
    std::string dependent;
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    SymMatrix covariance;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;

    /// Residuals of the estimating (possibly transformed) regression.
    Eigen::VectorXd residuals_weighted;
    /// Original-scale residuals y - X b.
    Eigen::VectorXd residuals_unweighted;
    std::vector<Observation> obs;

    FitStats weighted;
    FitStats unweighted;

    std::size_t n_obs = 0;
    std::size_t k_params = 0;
    /// Residual degrees of freedom used for t tests and s^2.
    std::size_t df_resid = 0;
    std::size_t n_entities = 0;
    std::size_t n_periods = 0;
    bool balanced = true;
    /// Gaussian log-likelihood of the unweighted fit.
    double log_likelihood = 0;

    std::optional<VarianceComponents> components;
    std::vector<std::string> warnings;

    /// Index of `name` in names, or names.size() when absent.
    std::size_t index_of(std::string_view name) const;
};

/// Across-period residual covariance, one row/column per sample year.
struct PeriodCovariance {
    SymMatrix omega;
    std::vector<Year> periods;
    /// Number of entities observed in both years of each pair.
    Eigen::MatrixXi pair_counts;
};

/// Stacked data after the per-entity Period-SUR transform.
struct WeightedData {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
};

/// Ordinary least squares on the stacked sample.
EstimationResult ols(const DesignMatrix& dm);

/// Cross-section fixed effects by entity demeaning. Reports slope coefficients only.
EstimationResult fixed_effects(const DesignMatrix& dm);

/// Swamy-Arora variance components from within and between regressions.
VarianceComponents swamy_arora_components(const DesignMatrix& dm);

/// Random effects GLS by quasi-demeaning with the given components.
EstimationResult random_effects(const DesignMatrix& dm, const VarianceComponents& components);
/// Random effects GLS with Swamy-Arora components.
EstimationResult random_effects(const DesignMatrix& dm);

/// Pairwise-average residual cross products per pair of years.
PeriodCovariance estimate_period_omega(std::span<const double> residuals, std::span<const Observation> obs);

/// Applies Omega^{-1/2}, restricted to each entity's observed years, block by block.
WeightedData period_sur_transform(const DesignMatrix& dm, const PeriodCovariance& omega);

/// Second stage of Period-SUR EGLS with a given Omega.
EstimationResult egls_with_omega(const DesignMatrix& dm, const PeriodCovariance& omega,
                                 CovarianceKind covariance = CovarianceKind::pcse_period_sur);

/// One-step Period-SUR EGLS: OLS, Omega from its residuals, GLS on the transformed data.
EstimationResult egls_period_sur(const DesignMatrix& dm,
                                 CovarianceKind covariance = CovarianceKind::pcse_period_sur);

/// Degrees-of-freedom correction applied to PCSE covariances: n / (n - k).
double pcse_dof_correction(std::size_t n, std::size_t k);

/// Period-SUR panel corrected sandwich covariance of `b` on the transformed data.
SymMatrix pcse_covariance(const DesignMatrix& dm, const PeriodCovariance& omega, const Eigen::VectorXd& b);

/// Dispatches on the weighting and covariance of a model specification.
EstimationResult estimate(const DesignMatrix& dm, Weighting weighting, CovarianceKind covariance);

double durbin_watson(std::span<const double> residuals);

}  // namespace panelegls
