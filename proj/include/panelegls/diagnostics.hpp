#pragma once

#include "panelegls/estimators.hpp"
#include "panelegls/panel.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace panelegls {

/// Significance level at which every verdict is decided.
inline constexpr double kSignificance = 0.05;

struct Statistic {
    std::string label;
    double value = 0;
    std::vector<double> df;
    /// Absent for screens that carry no sampling distribution.
    std::optional<double> p_value;
};

/// Labelled quantity attached to a test, e.g. one entry of a correlation table.
struct Detail {
    std::string label;
    double value = 0;
};

struct TestResult {
    std::string name;
    std::string null_hypothesis;
    Statistic primary;
    std::vector<Statistic> secondary;
    std::size_t n_obs = 0;
    bool null_retained = true;
    std::string verdict;
    std::vector<Detail> details;
    std::vector<std::string> warnings;
};

/// Residual series of one entity, keyed by year.
struct EntityResiduals {
    std::string entity;
    std::vector<Year> years;
    std::vector<double> values;
};

/// Regroups stacked residuals by entity, preserving the observation order.
std::vector<EntityResiduals> group_by_entity(std::span<const double> residuals, std::span<const Observation> obs);

/// F and likelihood-ratio tests of pooled OLS against cross-section fixed effects.
TestResult redundant_fixed_effects(const EstimationResult& pooled, const EstimationResult& fe);

/// Hausman test on the slope coefficients common to both fits.
TestResult hausman(const EstimationResult& fe, const EstimationResult& re);

/// Jarque-Bera normality test with moment-based skewness and kurtosis.
TestResult jarque_bera(std::span<const double> residuals);

/// Breusch-Pagan LM test of cross-section independence.
TestResult breusch_pagan_cd(std::span<const EntityResiduals> residuals);

/// Pesaran CD test of cross-section independence.
TestResult pesaran_cd(std::span<const EntityResiduals> residuals);

/// Breusch-Pagan-Godfrey test: n R^2 of squared unweighted residuals on the regressors.
TestResult bpg_heteroskedasticity(const EstimationResult& result, const DesignMatrix& dm);

/// Breusch-Godfrey LM test with `lags` within-entity lagged residuals. Rows without a full
/// set of lags are dropped; LM = n_aux (SSR_r - SSR_u) / SSR_r on the retained rows.
TestResult breusch_godfrey(const EstimationResult& result, const DesignMatrix& dm, int lags);

/// Largest absolute pairwise correlation among slope regressors against the model R^2.
TestResult multicollinearity_screen(const DesignMatrix& dm, const EstimationResult& result);

}  // namespace panelegls
