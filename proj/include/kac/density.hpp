#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

namespace kac {

// Tabulated density on [grid(0), grid(N-1)]. The CDF is stored at the nodes; inside
// a cell it is the cubic Hermite interpolant with nodal slopes equal to the density,
// so density() is its derivative. Cells where that derivative would go negative (or
// that are flagged) use a linear CDF, i.e. a constant density.
class DensityTable {
public:
    DensityTable() = default;

    // Nodal density and nodal CDF supplied by the caller.
    static DensityTable from_nodes(Eigen::VectorXd grid, Eigen::VectorXd values, Eigen::VectorXd cdf,
                                   const std::vector<int>& linear_cells = {});
    // CDF by the trapezoid rule: a piecewise-linear density is reproduced exactly.
    static DensityTable from_values(Eigen::VectorXd grid, Eigen::VectorXd values);
    // CDF by per-cell 8-point Gauss-Legendre quadrature of f.
    static DensityTable from_function(const std::function<double(double)>& f, Eigen::VectorXd grid);
    // Piecewise-constant density on the given bin edges.
    static DensityTable histogram(Eigen::VectorXd edges, const Eigen::VectorXd& heights);

    static Eigen::VectorXd uniform_grid(double a, double b, int points);

    double density(double x) const;
    Eigen::ArrayXd density(const Eigen::ArrayXd& x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    // Integral of the CDF from lower() to x.
    double cdf_integral(double x) const;
    double cdf_integral(double a, double b) const { return cdf_integral(b) - cdf_integral(a); }

    double mass() const { return C_(C_.size() - 1); }
    double mean() const;
    double lower() const { return x_(0); }
    double upper() const { return x_(x_.size() - 1); }
    Eigen::Index points() const { return x_.size(); }
    bool piecewise_constant() const { return piecewise_constant_; }

    const Eigen::VectorXd& grid() const { return x_; }
    const Eigen::VectorXd& values() const { return g_; }
    const Eigen::VectorXd& cdf_nodes() const { return C_; }

    DensityTable normalized() const;
    double max_value() const;
    bool admissible(double alpha, double rel_tol = 1e-9) const;

    void write_csv(std::ostream& os, const std::vector<std::string>& header = {}) const;
    // Reads (x, density) rows; the CDF is rebuilt with the trapezoid rule.
    static DensityTable read_csv(std::istream& is);

private:
    void finish();
    Eigen::Index cell(double x) const;
    double cell_density(Eigen::Index i, double t) const;
    double cell_cdf(Eigen::Index i, double t) const;

    Eigen::VectorXd x_, g_, C_;
    Eigen::VectorXd I_;                // cumulative integral of the CDF at nodes
    std::vector<unsigned char> lin_;   // per cell: linear CDF
    bool piecewise_constant_ = false;
};

}  // namespace kac
