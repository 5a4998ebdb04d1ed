#include "kac/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kac {

ModelParams::ModelParams(int n, double alpha) : n_(n), alpha_(alpha) {
    if (n < 2) throw ModelError("n must be at least 2, got " + std::to_string(n));
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ModelError("alpha must lie in (0,2), got " + std::to_string(alpha));
}

double neumaier_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

SimplexPoint::SimplexPoint(std::vector<double> z) : z_(std::move(z)) {
    if (z_.empty()) throw ModelError("simplex point is empty");
    for (std::size_t i = 0; i < z_.size(); ++i)
        if (!(z_[i] >= 0.0))
            throw ModelError("simplex coordinate " + std::to_string(i) + " is negative");
    double s = neumaier_sum(z_);
    if (std::abs(s - 1.0) > 1e-12)
        throw ModelError("simplex coordinates sum to " + std::to_string(s) + ", not 1");
}

SimplexPoint SimplexPoint::normalized(std::vector<double> z) {
    double s = neumaier_sum(z);
    if (!(s > 0.0) || !std::isfinite(s)) throw ModelError("cannot normalize simplex point");
    for (double& v : z) v /= s;
    return SimplexPoint(std::move(z));
}

Configuration t_n_map(const SimplexPoint& z, const ModelParams& params) {
    const int n = params.n();
    if (static_cast<int>(z.size()) != n)
        throw ModelError("simplex point has dimension " + std::to_string(z.size()) +
                         " but n = " + std::to_string(n));
    const double scale = n * (1.0 - params.alpha() / 2.0);
    const double eps = params.min_gap();
    std::vector<double> x(n);
    double cum = 0.0;
    for (int j = 0; j < n; ++j) {
        cum += z[j] / static_cast<double>(n - j);
        x[j] = scale * cum + j * eps;
    }
    return Configuration{std::move(x), params};
}

SimplexPoint t_n_inverse(const Configuration& config) {
    const ModelParams& p = config.params;
    const int n = p.n();
    if (static_cast<int>(config.size()) != n)
        throw ModelError("configuration size does not match n");
    const double eps = p.min_gap();
    const double excess = 1.0 - p.alpha() / 2.0;
    std::vector<double> z(n);
    for (int j = 0; j < n; ++j) {
        double gap = j == 0 ? config.energies[0] : config.energies[j] - config.energies[j - 1] - eps;
        if (gap < -kExclusionTol)
            throw ModelError("exclusion violated at index " + std::to_string(j));
        gap = std::max(gap, 0.0);
        z[j] = static_cast<double>(n - j) / n * gap / excess;
    }
    return SimplexPoint::normalized(std::move(z));
}

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& ValidationReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw ModelError("no check named " + name);
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << std::setprecision(6);
    for (const auto& c : checks) {
        os << c.name << ": " << (c.pass ? "ok" : "FAIL");
        if (!c.pass) os << " at index " << c.worst_index << " (magnitude " << c.magnitude << ")";
        os << '\n';
    }
    return os.str();
}

ValidationReport validate(const Configuration& config) {
    const auto& x = config.energies;
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const double eps = config.params.min_gap();
    ValidationReport rep;

    CheckResult size{"size"};
    if (n != config.params.n()) {
        size.pass = false;
        size.magnitude = static_cast<double>(n - config.params.n());
    }
    rep.checks.push_back(size);

    CheckResult neg{"nonnegative"};
    for (std::ptrdiff_t i = 0; i < n; ++i)
        if (!(x[i] >= 0.0) && (neg.pass || x[i] < -neg.magnitude)) {
            neg.pass = false;
            neg.worst_index = i;
            neg.magnitude = -x[i];
        }
    rep.checks.push_back(neg);

    CheckResult sum{"sum"};
    const double target = static_cast<double>(config.params.n());
    double drift = neumaier_sum(x) - target;
    sum.magnitude = drift;
    sum.pass = std::abs(drift) <= 1e-9 * target;
    rep.checks.push_back(sum);

    // Differences below eps also catch unsorted input.
    CheckResult excl{"exclusion"};
    double worst_gap = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t i = 1; i < n; ++i) {
        double d = x[i] - x[i - 1];
        if (d < worst_gap) {
            worst_gap = d;
            excl.worst_index = i;
        }
    }
    if (n > 1) {
        excl.magnitude = worst_gap;
        excl.pass = worst_gap >= eps - kExclusionTol;
    }
    rep.checks.push_back(excl);

    // (j-i)*eps <= x_j - x_i for all i<j, via a running max of x_i - i*eps.
    CheckResult interval{"interval_count"};
    const double e = eps - kExclusionTol;
    double run_max = -std::numeric_limits<double>::infinity();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double y = x[j] - static_cast<double>(j) * e;
        if (j > 0 && run_max - y > worst) {
            worst = run_max - y;
            interval.worst_index = j;
        }
        run_max = std::max(run_max, y);
    }
    if (n > 1) {
        interval.magnitude = worst;
        interval.pass = worst <= kExclusionTol;
    }
    rep.checks.push_back(interval);
    return rep;
}

void write_configuration_csv(std::ostream& os, const Configuration& config,
                             const std::vector<std::string>& header) {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "# n=" << config.params.n() << '\n';
    os << "# alpha=" << std::setprecision(17) << config.params.alpha() << '\n';
    os << "index,energy\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < config.size(); ++i) os << i << ',' << config.energies[i] << '\n';
}

Configuration read_configuration_csv(std::istream& is) {
    std::string line;
    int n = -1;
    double alpha = -1.0;
    std::vector<double> x;
    bool saw_columns = false;
    auto number = [&](const std::string& text, auto parse) {
        try {
            return parse(text);
        } catch (const std::logic_error&) {
            throw ModelError("malformed configuration line: " + line);
        }
    };
    auto real = [](const std::string& t) { return std::stod(t); };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            std::string val = line.substr(eq + 1);
            if (key == "schema" && val.rfind("configuration/", 0) != 0)
                throw ModelError("not a configuration file (schema " + val + ")");
            if (key == "n") n = number(val, [](const std::string& t) { return std::stoi(t); });
            if (key == "alpha") alpha = number(val, real);
            continue;
        }
        if (!saw_columns) {
            saw_columns = true;
            if (line.rfind("index", 0) == 0) continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ModelError("malformed configuration row: " + line);
        x.push_back(number(line.substr(comma + 1), real));
    }
    if (n < 0 || alpha < 0) throw ModelError("configuration CSV lacks n or alpha header");
    if (static_cast<int>(x.size()) != n)
        throw ModelError("configuration CSV has " + std::to_string(x.size()) + " rows, header says " +
                         std::to_string(n));
    return Configuration{std::move(x), ModelParams(n, alpha)};
}

}  // namespace kac
