#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace kac {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tolerance applied to every exclusion comparison.
inline constexpr double kExclusionTol = 1e-12;

class ModelParams {
public:
    ModelParams(int n, double alpha);

    int n() const { return n_; }
    double alpha() const { return alpha_; }
    // Minimal scaled gap alpha/(n-1).
    double min_gap() const { return alpha_ / static_cast<double>(n_ - 1); }

private:
    int n_;
    double alpha_;
};

// Sorted scaled energies. A plain value: validate() says whether it is admissible.
struct Configuration {
    std::vector<double> energies;
    ModelParams params;

    std::size_t size() const { return energies.size(); }
};

class SimplexPoint {
public:
    explicit SimplexPoint(std::vector<double> z);
    // Divides by the sum first; the input must be nonnegative with positive sum.
    static SimplexPoint normalized(std::vector<double> z);

    const std::vector<double>& z() const { return z_; }
    std::size_t size() const { return z_.size(); }
    double operator[](std::size_t i) const { return z_[i]; }

private:
    std::vector<double> z_;
};

struct GapSample {
    double center_x = 0.0;
    double window = 0.0;
    std::vector<double> scaled_gaps;
    double fitted_rate = 0.0;
    double reference_rate = 0.0;  // rate the KS test was run against
    double ks_statistic = 0.0;
    double ks_pvalue = 0.0;
    bool ks_pass = false;
};

Configuration t_n_map(const SimplexPoint& z, const ModelParams& params);
SimplexPoint t_n_inverse(const Configuration& config);

struct CheckResult {
    std::string name;
    bool pass = true;
    std::ptrdiff_t worst_index = -1;
    double magnitude = 0.0;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    const CheckResult& check(const std::string& name) const;
    std::string summary() const;
};

ValidationReport validate(const Configuration& config);

double neumaier_sum(const std::vector<double>& v);

// CSV with comment header; columns index,energy.
void write_configuration_csv(std::ostream& os, const Configuration& config,
                             const std::vector<std::string>& header = {});
Configuration read_configuration_csv(std::istream& is);

}  // namespace kac
