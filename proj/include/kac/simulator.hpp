#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kac/model.hpp"
#include "kac/ordered_index.hpp"
#include "kac/rng.hpp"

namespace kac {

struct JumpRecord {
    double time = 0.0;
    int i = -1, j = -1;
    double xi = 0.0, xj = 0.0;            // energies before
    double xi_star = 0.0, xj_star = 0.0;  // proposal
    bool accepted = false;
};

struct SimCounters {
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
};

// Uniform reservoir of accepted (energy before, energy after) pairs.
class ScatterReservoir {
public:
    ScatterReservoir(std::size_t capacity, RngStream rng) : capacity_(capacity), rng_(std::move(rng)) {}
    void offer(double before, double after);
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }
    std::uint64_t seen() const { return seen_; }

private:
    std::size_t capacity_;
    RngStream rng_;
    std::uint64_t seen_ = 0;
    std::vector<std::pair<double, double>> samples_;
};

// Particle ids are the ranks in the initial configuration.
class SimState {
public:
    SimState(const Configuration& initial, RngStream rng, std::size_t scatter_capacity = 0);

    const ModelParams& params() const { return params_; }
    double time() const { return time_; }
    const SimCounters& counters() const { return counters_; }
    const OrderedIndex& index() const { return index_; }
    const ScatterReservoir& scatter() const { return scatter_; }
    double energy(int id) const { return index_.key(id); }
    const std::vector<double>& energies_by_id() const { return index_.keys_by_id(); }

    // Steps (1)-(3): advance the clock by Exp(n), pick a pair, draw the split.
    JumpRecord propose();
    // Same clock and pair, but the wrapped update (x_i + xi*xbar) mod (x_i + x_j).
    JumpRecord propose_mod_variant();
    bool admissible(const JumpRecord& r) const;
    // Applies the record if admissible; sets r.accepted.
    bool commit(JumpRecord& r);

    JumpRecord step();
    JumpRecord step_mod_variant();

    // Moves the clock back to t; used when an event falls past a run horizon.
    void truncate_time(double t);

    Configuration configuration() const;
    double total_energy() const;

private:
    void draw_pair(JumpRecord& r);

    ModelParams params_;
    OrderedIndex index_;
    double time_ = 0.0;
    RngStream rng_;
    SimCounters counters_;
    ScatterReservoir scatter_;
};

// Splits the total s into (small, large) with small + large == s exactly; needs small <= s/2.
std::pair<double, double> split_exact(double s, double small);

struct RunOptions {
    double t_end = 1.0;
    double snapshot_dt = 0.0;  // 0: only the initial and final snapshots
    std::vector<int> tracked_ids;
    int lowest_k = 0;
    bool mod_variant = false;
    bool record_events = false;
    std::size_t event_limit = 1000000;
};

struct Snapshot {
    double time = 0.0;
    std::vector<double> energies;  // sorted
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<std::vector<double>> tagged;      // per snapshot, energy of each tracked id
    std::vector<std::vector<double>> lowest;      // per snapshot, the lowest_k energies
    std::vector<JumpRecord> events;
    std::vector<std::pair<double, double>> scatter;
    SimCounters counters;
};

Trajectory run(SimState& state, const RunOptions& opt);

}  // namespace kac
