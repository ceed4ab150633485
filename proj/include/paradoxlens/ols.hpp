#pragma once

#include "paradoxlens/dataset.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace paradoxlens {

enum class Term { intercept, group_indicator, group0_indicator, group1_indicator, w_initial };

std::string term_name(Term t);

// Model description: response column plus an ordered term list. The usual
// responses are w_final and gain; w_initial stays available for the
// forward/reverse comparison.
struct DesignSpec {
    Variable response = Variable::w_final;
    std::vector<Term> terms;

    void validate() const;
};

struct FitResult {
    std::string response;
    std::vector<std::string> terms;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> t_statistics;
    std::vector<double> residuals;
    double residual_variance = 0.0;   // SSE / (n - p)
    double r_squared = 0.0;
    int n = 0;
    std::uint64_t dataset_fingerprint = 0;

    double coefficient(std::string_view term) const;
    double standard_error(std::string_view term) const;
    double t_statistic(std::string_view term) const;
    bool has_term(std::string_view term) const;
    double sse() const;
};

// Column-level engine behind fit(). Kept public because the residual stage
// regresses a residual vector, which is not a dataset column.
FitResult fit_columns(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns,
                      const std::vector<double>& response,
                      const std::string& response_name,
                      std::uint64_t dataset_fingerprint);

FitResult fit(const Dataset& ds, const DesignSpec& spec);

// Evaluates a fitted model on (possibly different) data.
std::vector<double> predict(const FitResult& fit, const Dataset& ds);

struct ReverseFitReport {
    FitResult forward;        // y ~ {intercept, x}
    FitResult reverse;        // x ~ {intercept, y}
    double slope_product = 0.0;
    double r_squared = 0.0;   // of the forward simple regression
};

// Forward and reverse simple regressions of the same pair; the slope product
// equals the squared correlation, which is what makes the two directions
// inequivalent whenever r^2 < 1.
ReverseFitReport reverse_fit(const Dataset& ds, Variable x, Variable y);

} // namespace paradoxlens
