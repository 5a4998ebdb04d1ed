#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "kac/density.hpp"
#include "kac/model.hpp"

namespace kac {

// Weighted point masses, sorted by position, total weight 1.
struct EmpiricalMeasure {
    std::vector<double> points;
    std::vector<double> weights;

    static EmpiricalMeasure from_points(std::vector<double> pts);
    static EmpiricalMeasure from_configuration(const Configuration& c) { return from_points(c.energies); }
    static EmpiricalMeasure from_ensemble(const std::vector<Configuration>& cs);
    static EmpiricalMeasure from_weighted(std::vector<double> pts, std::vector<double> w);
    double mean() const;
};

// One-dimensional Wasserstein-1 distance as the L1 distance of the CDFs.
double w1_distance(const EmpiricalMeasure& mu, const DensityTable& nu);
double w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double w1_distance(const DensityTable& mu, const DensityTable& nu);

struct KsResult {
    double statistic = 0.0;
    double pvalue = 1.0;
    bool rejects(double level = 0.05) const { return pvalue < level; }
};

// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double lambda);
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Exact two-sided binomial test (minimum-likelihood rule).
double binomial_two_sided_p(long k, long n, double p = 0.5);

double exponential_rate_mle(const std::vector<double>& sample);

struct Histogram {
    Eigen::VectorXd edges;
    Eigen::VectorXd mean_density;
    Eigen::VectorXd std_error;          // standard error of the mean density per bin
    std::vector<std::vector<int>> counts;  // counts[bin][sample]

    DensityTable table() const;
    Eigen::Index bins() const { return mean_density.size(); }
    double center(Eigen::Index b) const { return 0.5 * (edges(b) + edges(b + 1)); }
};

// Bins [0, x_max) in steps of bin_width; x_max defaults to cover every energy.
Histogram empirical_histogram(const std::vector<Configuration>& configs, double bin_width,
                              std::optional<double> x_max = std::nullopt);

// Scaled gaps of consecutive particles with |x_j - x| <= window/2. The KS test is run
// against reference_rate when given, otherwise against the fitted rate.
GapSample gap_statistics(const Configuration& config, double x, double window,
                         std::optional<double> reference_rate = std::nullopt);
GapSample gap_statistics(const std::vector<Configuration>& ensemble, double x, double window,
                         std::optional<double> reference_rate = std::nullopt);

}  // namespace kac
