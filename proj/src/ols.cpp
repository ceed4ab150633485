#include "paradoxlens/ols.hpp"

#include "paradoxlens/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace paradoxlens {

namespace {

constexpr double kRcondFallback = 1e-8;   // below this, leave the normal equations
constexpr double kPivotRelTol = 1e-10;    // pivot below tol * largest => collinear

std::vector<double> column_for_name(const std::string& name, const Dataset& ds) {
    const std::size_t n = ds.size();
    if (name == "intercept") return std::vector<double>(n, 1.0);
    if (name == "group") return ds.group_indicator();
    if (name == "group0") {
        auto s = ds.group_indicator();
        for (double& v : s) v = 1.0 - v;
        return s;
    }
    if (name == "group1") return ds.group_indicator();
    if (name == "w_initial") return ds.values(Variable::w_initial);
    if (name == "w_final") return ds.values(Variable::w_final);
    if (name == "gain") return ds.values(Variable::gain);
    if (name == "w_initial:group1") {
        auto x = ds.values(Variable::w_initial);
        const auto s = ds.group_indicator();
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= s[i];
        return x;
    }
    throw ConfigError("unknown design column '" + name + "'");
}

// Indices of columns whose span carries the constant vector: an explicit
// intercept, or the complete {group0, group1} indicator basis.
std::vector<std::size_t> constant_carrier(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "intercept") return {i};
    }
    std::vector<std::size_t> both;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "group0" || names[i] == "group1") both.push_back(i);
    }
    if (both.size() == 2) return both;
    return {};
}

} // namespace

std::string term_name(Term t) {
    switch (t) {
        case Term::intercept: return "intercept";
        case Term::group_indicator: return "group";
        case Term::group0_indicator: return "group0";
        case Term::group1_indicator: return "group1";
        case Term::w_initial: return "w_initial";
    }
    return "?";
}

void DesignSpec::validate() const {
    if (terms.empty()) {
        throw ConfigError("design needs at least one term");
    }
    std::set<Term> seen;
    for (Term t : terms) {
        if (!seen.insert(t).second) {
            throw ConfigError("duplicate term '" + term_name(t) + "' in design");
        }
    }
    if (seen.count(Term::intercept) && seen.count(Term::group0_indicator) &&
        seen.count(Term::group1_indicator)) {
        throw ConfigError("intercept plus both group indicators is rank deficient by construction");
    }
}

double FitResult::coefficient(std::string_view term) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i] == term) return coefficients[i];
    }
    throw ConfigError("fit has no term '" + std::string(term) + "'");
}

double FitResult::standard_error(std::string_view term) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i] == term) return standard_errors[i];
    }
    throw ConfigError("fit has no term '" + std::string(term) + "'");
}

double FitResult::t_statistic(std::string_view term) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i] == term) return t_statistics[i];
    }
    throw ConfigError("fit has no term '" + std::string(term) + "'");
}

bool FitResult::has_term(std::string_view term) const {
    return std::find(terms.begin(), terms.end(), term) != terms.end();
}

double FitResult::sse() const {
    double s = 0.0;
    for (double r : residuals) s += r * r;
    return s;
}

FitResult fit_columns(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns,
                      const std::vector<double>& response,
                      const std::string& response_name,
                      std::uint64_t dataset_fingerprint) {
    const std::size_t p = columns.size();
    const std::size_t n = response.size();
    if (p == 0) {
        throw ConfigError("design needs at least one column");
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (columns[j].size() != n) {
            throw ConfigError("design column '" + names[j] + "' length mismatch");
        }
    }
    if (n < p) {
        throw DegenerateError("too few observations for " + std::to_string(p) +
                              " terms: n = " + std::to_string(n) +
                              " leaves no degrees of freedom");
    }

    const auto carrier = constant_carrier(names);
    const bool has_carrier = !carrier.empty();

    // Center non-carrier columns (and the response) when the constant vector
    // lies in the design span, then scale every column to unit RMS. Both maps
    // are undone on the way out.
    std::vector<double> means(p, 0.0);
    std::vector<bool> is_carrier(p, false);
    for (std::size_t c : carrier) is_carrier[c] = true;

    Eigen::MatrixXd x(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        if (has_carrier && !is_carrier[j]) {
            mean = std::accumulate(columns[j].begin(), columns[j].end(), 0.0) /
                   static_cast<double>(n);
        }
        means[j] = mean;
        for (std::size_t i = 0; i < n; ++i) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i] - mean;
        }
    }
    const double y_mean =
        has_carrier ? std::accumulate(response.begin(), response.end(), 0.0) /
                          static_cast<double>(n)
                    : 0.0;
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = response[i] - y_mean;

    std::vector<double> scales(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double rms = std::sqrt(x.col(static_cast<Eigen::Index>(j)).squaredNorm() /
                                     static_cast<double>(n));
        if (rms == 0.0) {
            throw SingularityError("design column '" + names[j] +
                                   "' is constant and collinear with the model constant");
        }
        scales[j] = rms;
        x.col(static_cast<Eigen::Index>(j)) /= rms;
    }

    const auto pe = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::VectorXd xty = x.transpose() * y;

    Eigen::VectorXd beta_scaled(pe);
    Eigen::MatrixXd gram_inv(pe, pe);
    bool solved = false;

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success && llt.rcond() > kRcondFallback) {
        beta_scaled = llt.solve(xty);
        gram_inv = llt.solve(Eigen::MatrixXd::Identity(pe, pe));
        solved = true;
    }

    if (!solved) {
        // Degenerate or ill-conditioned path: column-pivoted QR of the design.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        const Eigen::VectorXd r_diag = qr.matrixR().diagonal().head(pe).cwiseAbs();
        const double largest = r_diag.maxCoeff();
        Eigen::Index rank = 0;
        for (Eigen::Index k = 0; k < pe; ++k) {
            if (r_diag(k) >= kPivotRelTol * largest) ++rank;
            else break;
        }
        if (rank < pe) {
            const auto perm = qr.colsPermutation().indices();
            std::string collinear;
            for (Eigen::Index k = rank; k < pe; ++k) {
                if (!collinear.empty()) collinear += ", ";
                collinear += names[static_cast<std::size_t>(perm(k))];
            }
            throw SingularityError("design is rank deficient; collinear terms: " + collinear);
        }
        beta_scaled = qr.solve(y);
        Eigen::MatrixXd r_inv =
            qr.matrixR().topLeftCorner(pe, pe).triangularView<Eigen::Upper>().solve(
                Eigen::MatrixXd::Identity(pe, pe));
        gram_inv = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
                   qr.colsPermutation().transpose();
    }

    const Eigen::VectorXd resid = y - x * beta_scaled;
    const double sse = resid.squaredNorm();
    const double dof = static_cast<double>(n) - static_cast<double>(p);
    const double resid_var = dof > 0.0 ? sse / dof : 0.0;

    // Undo scaling/centering: beta = A * beta_scaled + d with A = S^-1 plus
    // carrier rows picking up -mean_j/s_j, d = y_mean on carrier rows.
    Eigen::MatrixXd unmap = Eigen::MatrixXd::Zero(pe, pe);
    for (std::size_t j = 0; j < p; ++j) {
        unmap(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0 / scales[j];
    }
    for (std::size_t c : carrier) {
        for (std::size_t j = 0; j < p; ++j) {
            if (!is_carrier[j] && means[j] != 0.0) {
                unmap(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) -=
                    means[j] / scales[j];
            }
        }
    }
    Eigen::VectorXd beta = unmap * beta_scaled;
    double carrier_shift = y_mean;
    for (std::size_t c : carrier) beta(static_cast<Eigen::Index>(c)) += carrier_shift;

    const Eigen::MatrixXd covariance = resid_var * (unmap * gram_inv * unmap.transpose());

    FitResult result;
    result.response = response_name;
    result.terms = names;
    result.n = static_cast<int>(n);
    result.dataset_fingerprint = dataset_fingerprint;
    result.residual_variance = resid_var;
    result.coefficients.resize(p);
    result.standard_errors.resize(p);
    result.t_statistics.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto je = static_cast<Eigen::Index>(j);
        result.coefficients[j] = beta(je);
        const double var_j = std::max(covariance(je, je), 0.0);
        result.standard_errors[j] = std::sqrt(var_j);
        result.t_statistics[j] =
            result.standard_errors[j] > 0.0 ? beta(je) / result.standard_errors[j] : 0.0;
    }
    result.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.residuals[i] = resid(static_cast<Eigen::Index>(i));

    double tss = 0.0;
    if (has_carrier) {
        for (double v : response) tss += (v - y_mean) * (v - y_mean);
    } else {
        for (double v : response) tss += v * v;
    }
    if (tss > 0.0) {
        result.r_squared = std::clamp(1.0 - sse / tss, 0.0, 1.0);
    } else {
        result.r_squared = sse <= 1e-24 ? 1.0 : 0.0;
    }
    return result;
}

FitResult fit(const Dataset& ds, const DesignSpec& spec) {
    spec.validate();
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    names.reserve(spec.terms.size());
    for (Term t : spec.terms) {
        names.push_back(term_name(t));
        columns.push_back(column_for_name(names.back(), ds));
    }
    return fit_columns(names, columns, ds.values(spec.response),
                       variable_name(spec.response), ds.fingerprint());
}

std::vector<double> predict(const FitResult& fit, const Dataset& ds) {
    std::vector<double> out(ds.size(), 0.0);
    for (std::size_t j = 0; j < fit.terms.size(); ++j) {
        const auto column = column_for_name(fit.terms[j], ds);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += fit.coefficients[j] * column[i];
        }
    }
    return out;
}

ReverseFitReport reverse_fit(const Dataset& ds, Variable x, Variable y) {
    if (x == y) {
        throw ConfigError("reverse_fit needs two distinct variables");
    }
    const auto xv = ds.values(x);
    const auto yv = ds.values(y);
    auto variance = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double value : v) ss += (value - mean) * (value - mean);
        return ss;
    };
    if (ds.size() < 3) {
        throw DegenerateError("reverse_fit needs at least 3 observations");
    }
    if (variance(xv) == 0.0) {
        throw DegenerateError("variable '" + variable_name(x) + "' has zero variance");
    }
    if (variance(yv) == 0.0) {
        throw DegenerateError("variable '" + variable_name(y) + "' has zero variance");
    }

    const std::vector<double> ones(ds.size(), 1.0);
    ReverseFitReport report;
    report.forward = fit_columns({"intercept", variable_name(x)}, {ones, xv}, yv,
                                 variable_name(y), ds.fingerprint());
    report.reverse = fit_columns({"intercept", variable_name(y)}, {ones, yv}, xv,
                                 variable_name(x), ds.fingerprint());
    report.slope_product = report.forward.coefficient(variable_name(x)) *
                           report.reverse.coefficient(variable_name(y));
    report.r_squared = report.forward.r_squared;
    return report;
}

} // namespace paradoxlens
