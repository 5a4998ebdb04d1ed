#include "kac/experiment.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "kac/equilibrium.hpp"
#include "kac/io.hpp"
#include "kac/kinetic.hpp"
#include "kac/samplers.hpp"
#include "kac/simulator.hpp"
#include "kac/stats.hpp"

namespace kac {

namespace {
const std::vector<std::string> kCommands{"sample", "simulate", "solve", "analyze"};
const std::vector<std::string> kConstructions{"flat", "dirichlet", "detailed"};
const std::vector<std::string> kDensityTargets{"equilibrium", "exp", "fig-excess-g"};
const std::vector<std::string> kConfigTargets{"step-equal-spacing", "step-plus-outlier"};

bool member(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : " | ") + s;
    return out;
}
}  // namespace

bool is_configuration_target(const std::string& target) { return member(kConfigTargets, target); }

void validate_config(const RunConfig& c) {
    auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(field + ": " + msg); };
    if (!member(kCommands, c.command)) fail("command", "unknown command '" + c.command + "', expected " + joined(kCommands));
    if (c.n < 2) fail("n", "must be at least 2");
    if (!(c.alpha > 0.0 && c.alpha < 2.0)) fail("alpha", "must lie in (0,2)");
    if (!member(kConstructions, c.construction))
        fail("construction", "unknown construction '" + c.construction + "', expected " + joined(kConstructions));
    if (!(c.dirichlet_k > 0.0)) fail("dirichlet_k", "must be positive");
    if (!(c.t_end >= 0.0)) fail("t_end", "must be nonnegative");
    if (!(c.snapshot_dt >= 0.0)) fail("snapshot_dt", "must be nonnegative");
    if (c.samples < 1) fail("samples", "must be at least 1");
    if (!(c.bin_width > 0.0)) fail("bin_width", "must be positive");
    if (!(c.dt > 0.0)) fail("dt", "must be positive");
    if (c.kinetic_points < 3) fail("kinetic_points", "must be at least 3");
    if (!(c.kinetic_xmax > 0.0)) fail("kinetic_xmax", "must be positive");
    if (!(c.gap_window > 0.0)) fail("gap_window", "must be positive");
    if (c.tracked < 0 || c.tracked > c.n) fail("tracked", "must lie in [0, n]");
    if (c.lowest_k < 0) fail("lowest_k", "must be nonnegative");
    if (c.write_configs < 0) fail("write_configs", "must be nonnegative");
    const bool builtin = member(kDensityTargets, c.target) || is_configuration_target(c.target);
    if (!builtin && !std::filesystem::is_regular_file(c.target))
        fail("target", "not a builtin (" + joined(kDensityTargets) + " | " + joined(kConfigTargets) +
                           ") and no such file: " + c.target);
    const bool samples_particles = c.command == "sample" || c.command == "simulate";
    if (samples_particles && c.construction == "flat" && !is_configuration_target(c.target) && c.target != "equilibrium")
        fail("construction", "flat sampling targets the equilibrium; use detailed or dirichlet for '" + c.target + "'");
    if (c.command == "solve" && is_configuration_target(c.target))
        fail("target", "'" + c.target + "' is a configuration; solve needs a density");
    if (c.command == "simulate" && !(c.t_end > 0.0)) fail("t_end", "simulate needs t_end > 0");
    if (c.command == "analyze") {
        if (c.inputs.empty()) fail("input", "analyze needs at least one configuration CSV");
        for (const auto& p : c.inputs)
            if (!std::filesystem::is_regular_file(p)) fail("input", "no such file: " + p);
    }
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"Kac energy-exchange process with exclusion", "kac"};
    app.set_config("--config", "", "TOML/INI file with option values; flags override it");
    app.add_option("command", c.command, "sample | simulate | solve | analyze")->required();
    app.add_option("--n", c.n, "particle count");
    app.add_option("--alpha", c.alpha, "exclusion parameter in (0,2)");
    app.add_option("--construction", c.construction, "flat | dirichlet | detailed");
    app.add_option("--dirichlet-k,--K", c.dirichlet_k, "Dirichlet concentration K");
    app.add_option("--target", c.target,
                   "equilibrium | exp | fig-excess-g | step-equal-spacing | step-plus-outlier | CSV path");
    app.add_option("--t-end", c.t_end, "process or kinetic end time");
    app.add_option("--snapshot-dt", c.snapshot_dt, "snapshot spacing (0: only start and end)");
    app.add_option("--samples", c.samples, "configurations (sample) or replicas (simulate)");
    app.add_option("--seed", c.seed, "base RNG seed");
    app.add_option("--bin-width", c.bin_width, "histogram bin width");
    app.add_option("--out,--output-dir", c.output_dir, "output directory");
    app.add_option("--dt", c.dt, "kinetic time step");
    app.add_option("--kinetic-points", c.kinetic_points, "kinetic grid points");
    app.add_option("--kinetic-xmax", c.kinetic_xmax, "kinetic grid upper end");
    app.add_option("--input", c.inputs, "configuration CSV files (analyze)");
    app.add_option("--gap-x", c.gap_x, "gap window center");
    app.add_option("--gap-window", c.gap_window, "gap window width");
    app.add_option("--tracked", c.tracked, "tagged particles to follow");
    app.add_option("--lowest-k", c.lowest_k, "lowest ranks to record");
    app.add_option("--write-configs", c.write_configs, "configurations written by sample");
    app.add_option("--scatter", c.scatter, "scatter reservoir capacity");
    app.add_flag("--events", c.events, "write every attempted event of replica 0");
    app.add_flag("--mod-variant", c.mod_variant, "use the wrapped collision update");
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("arguments: ") + e.what());
    }
    validate_config(c);
    return c;
}

RunConfig parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_config(args);
}

std::string canonical_string(const RunConfig& c) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "command=" << c.command << "\nn=" << c.n << "\nalpha=" << c.alpha << "\nconstruction=" << c.construction
       << "\ndirichlet_k=" << c.dirichlet_k << "\ntarget=" << c.target << "\nt_end=" << c.t_end
       << "\nsnapshot_dt=" << c.snapshot_dt << "\nsamples=" << c.samples << "\nseed=" << c.seed
       << "\nbin_width=" << c.bin_width << "\ndt=" << c.dt << "\nkinetic_points=" << c.kinetic_points
       << "\nkinetic_xmax=" << c.kinetic_xmax << "\ngap_x=" << c.gap_x << "\ngap_window=" << c.gap_window
       << "\ntracked=" << c.tracked << "\nlowest_k=" << c.lowest_k << "\nwrite_configs=" << c.write_configs
       << "\nscatter=" << c.scatter << "\nevents=" << c.events << "\nmod_variant=" << c.mod_variant << "\ninputs=";
    for (const auto& p : c.inputs) os << p << ';';
    os << '\n';
    return os.str();
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(canonical_string(c)); }

DensityTable target_density(const RunConfig& c) {
    if (c.target == "equilibrium") return f_alpha(c.alpha);
    if (c.target == "exp") return builtin::exponential();
    if (c.target == "fig-excess-g") return builtin::excess();
    if (is_configuration_target(c.target)) throw ConfigError("target: '" + c.target + "' is not a density");
    std::ifstream is(c.target);
    if (!is) throw ConfigError("target: cannot open " + c.target);
    return DensityTable::read_csv(is).normalized();
}

Configuration step_equal_spacing(const ModelParams& p) {
    return t_n_map(SimplexPoint(std::vector<double>(p.n(), 1.0 / p.n())), p);
}

Configuration step_plus_outlier(const ModelParams& p, double outlier_x) {
    const int n = p.n();
    const int m = (n + 99) / 100;
    const int bulk = n - m;
    if (bulk < 2) throw ModelError("step-plus-outlier needs n >= 3");
    const double eps = p.min_gap();
    double high = 0.0;
    for (int k = 0; k < m; ++k) high += outlier_x + k * eps;
    const double d = 2.0 * (n - high) / (static_cast<double>(bulk) * (bulk - 1));
    if (d < eps) throw ModelError("step-plus-outlier: outliers carry too much energy for the exclusion constraint");
    if ((bulk - 1) * d + eps > outlier_x) throw ModelError("step-plus-outlier: bulk reaches the outliers");
    std::vector<double> x(n);
    for (int j = 0; j < bulk; ++j) x[j] = j * d;
    for (int k = 0; k < m; ++k) x[bulk + k] = outlier_x + k * eps;
    return Configuration{std::move(x), p};
}

InitialSampler::InitialSampler(const RunConfig& c) : cfg_(c), params_(c.n, c.alpha) {
    if (c.target == "step-equal-spacing") {
        fixed_ = step_equal_spacing(params_);
        return;
    }
    if (c.target == "step-plus-outlier") {
        fixed_ = step_plus_outlier(params_);
        return;
    }
    if (c.construction == "flat") return;
    if (c.construction == "dirichlet") {
        if (c.target == "equilibrium") {
            weights_.assign(c.n, 1.0 / c.n);
        } else {
            weights_ = weights_from_density(w_from_g(target_density(c), c.alpha), c.n);
        }
        return;
    }
    target_ = target_density(c);
}

Configuration InitialSampler::draw(RngStream& rng) const {
    if (fixed_) return *fixed_;
    if (cfg_.construction == "flat") return sample_flat(params_, rng);
    if (cfg_.construction == "dirichlet")
        return sample_dirichlet(DirichletSpec(weights_, cfg_.dirichlet_k), params_, rng);
    return sample_detailed(*target_, params_, rng);
}

Configuration initial_configuration(const RunConfig& c, RngStream& rng) { return InitialSampler(c).draw(rng); }

namespace {

std::vector<std::string> header_for(const RunConfig& c) {
    std::ostringstream a;
    a << std::setprecision(17) << c.alpha;
    return {"config_hash=" + hex64(config_hash(c)), "seed=" + std::to_string(c.seed), "n=" + std::to_string(c.n),
            "alpha=" + a.str(), "command=" + c.command};
}

std::optional<DensityTable> reference_density(const RunConfig& c) {
    if (is_configuration_target(c.target)) return std::nullopt;
    return target_density(c);
}

void write_histogram(ArtifactWriter& out, const Histogram& h, const std::optional<DensityTable>& ref) {
    auto os = out.open("histogram.csv", "histogram");
    os << "bin_left,bin_right,mean_density,std_error" << (ref ? ",reference_density" : "") << '\n';
    for (Eigen::Index b = 0; b < h.bins(); ++b) {
        os << h.edges(b) << ',' << h.edges(b + 1) << ',' << h.mean_density(b) << ',' << h.std_error(b);
        if (ref) os << ',' << (ref->cdf(h.edges(b + 1)) - ref->cdf(h.edges(b))) /
                                                            (h.edges(b + 1) - h.edges(b));
        os << '\n';
    }
    auto cs = out.open("counts.csv", "bin-counts");
    cs << "bin_left,count,samples\n";
    for (Eigen::Index b = 0; b < h.bins(); ++b) {
        std::map<int, int> tally;
        for (int v : h.counts[b]) ++tally[v];
        for (const auto& [count, samples] : tally) cs << h.edges(b) << ',' << count << ',' << samples << '\n';
    }
}

void write_gaps(ArtifactWriter& out, const RunConfig& c, const std::vector<Configuration>& ens,
                const std::optional<DensityTable>& ref) {
    std::optional<double> rate;
    if (ref) {
        const double gv = ref->density(c.gap_x);
        if (c.alpha * gv < 1.0) rate = gap_rate(gv, c.alpha);
    }
    GapSample g;
    try {
        g = gap_statistics(ens, c.gap_x, c.gap_window, rate);
    } catch (const std::invalid_argument&) {
        return;  // too few particles in the window; nothing to report
    }
    auto ss = out.open("gap_summary.csv", "gap-summary");
    ss << "x,window,gaps,fitted_rate,reference_rate,ks_statistic,ks_pvalue,ks_pass\n";
    ss << g.center_x << ',' << g.window << ',' << g.scaled_gaps.size() << ',' << g.fitted_rate << ','
       << g.reference_rate << ',' << g.ks_statistic << ',' << g.ks_pvalue << ',' << (g.ks_pass ? 1 : 0) << '\n';
    std::vector<double> r = g.scaled_gaps;
    std::sort(r.begin(), r.end());
    auto os = out.open("gaps.csv", "gap-survival");
    os << "r,survival,reference_survival\n";
    const double N = static_cast<double>(r.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        os << r[k] << ',' << 1.0 - (k + 1) / N << ',' << std::exp(-g.reference_rate * r[k]) << '\n';
}

void run_sample(const RunConfig& c, ArtifactWriter& out) {
    InitialSampler sampler(c);
    std::vector<Configuration> ens;
    ens.reserve(c.samples);
    for (int s = 0; s < c.samples; ++s) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(s));
        ens.push_back(sampler.draw(rng));
    }
    for (int s = 0; s < std::min(c.samples, c.write_configs); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "configuration_%05d.csv", s);
        auto os = out.open(name, "configuration");
        write_configuration_csv(os, ens[s]);
    }
    const auto ref = reference_density(c);
    write_histogram(out, empirical_histogram(ens, c.bin_width), ref);
    write_gaps(out, c, ens, ref);
}

void run_simulate(const RunConfig& c, ArtifactWriter& out) {
    InitialSampler sampler(c);
    RunOptions opt;
    opt.t_end = c.t_end;
    opt.snapshot_dt = c.snapshot_dt;
    opt.mod_variant = c.mod_variant;
    for (int k = 0; k < c.tracked; ++k) opt.tracked_ids.push_back(static_cast<int>((2LL * k + 1) * c.n / (2 * c.tracked)));
    opt.lowest_k = c.lowest_k;

    std::vector<std::vector<Configuration>> by_time;
    std::vector<double> times;
    auto stats = out.open("stats.csv", "stats");
    stats << "replica,t,attempts,accepts\n";
    for (int r = 0; r < c.samples; ++r) {
        RngStream init_rng(c.seed, static_cast<std::uint64_t>(r));
        const Configuration init = sampler.draw(init_rng);
        SimState state(init, RngStream(c.seed, (1ULL << 32) + static_cast<std::uint64_t>(r)),
                       r == 0 ? c.scatter : 0);
        RunOptions o = opt;
        o.record_events = c.events && r == 0;
        const Trajectory tr = run(state, o);
        if (by_time.empty()) {
            by_time.resize(tr.snapshots.size());
            for (const auto& s : tr.snapshots) times.push_back(s.time);
        }
        for (std::size_t k = 0; k < tr.snapshots.size() && k < by_time.size(); ++k) {
            const auto& s = tr.snapshots[k];
            stats << r << ',' << s.time << ',' << s.attempted << ',' << s.accepted << '\n';
            by_time[k].push_back(Configuration{s.energies, init.params});
        }
        if (r != 0) continue;
        auto ss = out.open("snapshots.csv", "snapshots");
        ss << "t,index,energy\n";
        for (const auto& s : tr.snapshots)
            for (std::size_t i = 0; i < s.energies.size(); ++i) ss << s.time << ',' << i << ',' << s.energies[i] << '\n';
        if (!opt.tracked_ids.empty()) {
            auto ts = out.open("tags.csv", "tags");
            ts << "t,id,energy\n";
            for (std::size_t k = 0; k < tr.tagged.size(); ++k)
                for (std::size_t q = 0; q < opt.tracked_ids.size(); ++q)
                    ts << tr.snapshots[k].time << ',' << opt.tracked_ids[q] << ',' << tr.tagged[k][q] << '\n';
        }
        if (opt.lowest_k > 0) {
            auto ls = out.open("lowest.csv", "ranked");
            ls << "t,rank,energy\n";
            for (std::size_t k = 0; k < tr.lowest.size(); ++k)
                for (std::size_t q = 0; q < tr.lowest[k].size(); ++q)
                    ls << tr.snapshots[k].time << ',' << q << ',' << tr.lowest[k][q] << '\n';
        }
        auto sc = out.open("scatter.csv", "scatter");
        sc << "x,x_star\n";
        for (const auto& [a, b] : tr.scatter) sc << a << ',' << b << '\n';
        if (o.record_events) {
            auto es = out.open("events.csv", "events");
            es << "t,i,j,x_i,x_j,x_i_star,x_j_star,accepted\n";
            for (const auto& e : tr.events)
                es << e.time << ',' << e.i << ',' << e.j << ',' << e.xi << ',' << e.xj << ',' << e.xi_star << ','
                   << e.xj_star << ',' << (e.accepted ? 1 : 0) << '\n';
        }
    }
    auto hs = out.open("histograms.csv", "histogram-series");
    hs << "t,bin_left,bin_right,mean_density,std_error\n";
    double top = 0.0;
    for (const auto& ens : by_time)
        for (const auto& cfg : ens) top = std::max(top, cfg.energies.back());
    for (std::size_t k = 0; k < by_time.size(); ++k) {
        const Histogram h = empirical_histogram(by_time[k], c.bin_width, top);
        for (Eigen::Index b = 0; b < h.bins(); ++b)
            hs << times[k] << ',' << h.edges(b) << ',' << h.edges(b + 1) << ',' << h.mean_density(b) << ','
               << h.std_error(b) << '\n';
    }
}

void run_solve(const RunConfig& c, ArtifactWriter& out) {
    const DensityTable g = target_density(c);
    const KineticTrajectory tr =
        solve(g, c.alpha, c.t_end, c.dt, c.snapshot_dt, c.kinetic_points, c.kinetic_xmax);
    auto ss = out.open("kinetic_snapshots.csv", "kinetic-snapshots");
    ss << "t,x,g\n";
    for (const auto& s : tr.snapshots)
        for (Eigen::Index k = 0; k < s.size(); ++k) ss << s.time << ',' << s.x(k) << ',' << s.g(k) << '\n';
    auto ds = out.open("kinetic_diagnostics.csv", "kinetic-diagnostics");
    ds << "t,mass,energy,entropy,q_sup,tilt\n";
    for (const auto& d : tr.diagnostics)
        ds << d.time << ',' << d.mass << ',' << d.energy << ',' << d.entropy << ',' << d.q_sup << ',' << d.tilt << '\n';
}

void run_analyze(const RunConfig& c, ArtifactWriter& out) {
    std::vector<Configuration> ens;
    for (const auto& p : c.inputs) {
        std::ifstream is(p);
        if (!is) throw ConfigError("input: cannot open " + p);
        try {
            ens.push_back(read_configuration_csv(is));
        } catch (const ModelError& e) {
            throw ConfigError("input " + p + ": " + e.what());
        }
    }
    std::optional<DensityTable> ref;
    if (!is_configuration_target(c.target)) {
        RunConfig rc = c;
        rc.alpha = ens.front().params.alpha();
        ref = target_density(rc);
    }
    RunConfig gc = c;
    gc.alpha = ens.front().params.alpha();
    const Histogram h = empirical_histogram(ens, c.bin_width);
    write_histogram(out, h, ref);
    auto ds = out.open("density.csv", "density");
    ds << "x,density\n";
    for (Eigen::Index b = 0; b < h.bins(); ++b) ds << h.center(b) << ',' << h.mean_density(b) << '\n';
    write_gaps(out, gc, ens, ref);
}

}  // namespace

RunResult run_experiment(const RunConfig& c) {
    validate_config(c);
    ArtifactWriter out(c.output_dir, header_for(c));
    if (c.command == "sample")
        run_sample(c, out);
    else if (c.command == "simulate")
        run_simulate(c, out);
    else if (c.command == "solve")
        run_solve(c, out);
    else
        run_analyze(c, out);
    return RunResult{out.finish()};
}

}  // namespace kac
