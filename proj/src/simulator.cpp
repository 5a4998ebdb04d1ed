#include "kac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kac {

void ScatterReservoir::offer(double before, double after) {
    ++seen_;
    if (capacity_ == 0) return;
    if (samples_.size() < capacity_) {
        samples_.emplace_back(before, after);
        return;
    }
    const std::uint64_t k = rng_.below(seen_);
    if (k < capacity_) samples_[k] = {before, after};
}

std::pair<double, double> split_exact(double s, double small) {
    const double large = s - small;
    // large >= s/2, so s - large is exact and the two parts add back to s.
    return {s - large, large};
}

SimState::SimState(const Configuration& initial, RngStream rng, std::size_t scatter_capacity)
    : params_(initial.params),
      index_(initial.energies),
      rng_(std::move(rng)),
      scatter_(scatter_capacity, RngStream(rng_.seed(), rng_.stream() ^ 0x5ca77e5ca77eULL)) {
    if (static_cast<int>(initial.size()) != params_.n())
        throw std::invalid_argument("initial configuration size does not match n");
    if (!validate(initial).ok()) throw std::invalid_argument("initial configuration is not admissible");
}

void SimState::draw_pair(JumpRecord& r) {
    const auto n = static_cast<std::uint64_t>(params_.n());
    time_ += rng_.exponential() / static_cast<double>(n);
    r.time = time_;
    r.i = static_cast<int>(rng_.below(n));
    auto j = static_cast<int>(rng_.below(n - 1));
    if (j >= r.i) ++j;
    r.j = j;
    r.xi = index_.key(r.i);
    r.xj = index_.key(r.j);
}

JumpRecord SimState::propose() {
    JumpRecord r;
    draw_pair(r);
    const double xi = 2.0 * rng_.uniform() - 1.0;
    const double s = r.xi + r.xj;
    const auto [lo, hi] = split_exact(s, 0.5 * s * (1.0 - std::abs(xi)));
    // (x_i*, x_j*) = (xbar(1-xi), xbar(1+xi))
    if (xi >= 0.0) {
        r.xi_star = lo;
        r.xj_star = hi;
    } else {
        r.xi_star = hi;
        r.xj_star = lo;
    }
    return r;
}

JumpRecord SimState::propose_mod_variant() {
    JumpRecord r;
    draw_pair(r);
    const double xi = 2.0 * rng_.uniform() - 1.0;
    const double s = r.xi + r.xj;
    double a = r.xi + xi * 0.5 * s;
    if (a < 0.0) a += s;
    if (a >= s) a -= s;
    a = std::clamp(a, 0.0, s);
    const bool i_small = a <= 0.5 * s;
    const auto [lo, hi] = split_exact(s, i_small ? a : s - a);
    r.xi_star = i_small ? lo : hi;
    r.xj_star = i_small ? hi : lo;
    return r;
}

bool SimState::admissible(const JumpRecord& r) const {
    const double e = params_.min_gap() - kExclusionTol;
    if (std::abs(r.xi_star - r.xj_star) < e) return false;
    for (double x : {r.xi_star, r.xj_star}) {
        const auto [below, above] = index_.neighbor_keys(x, r.i, r.j);
        if (x - below < e || above - x < e) return false;
    }
    return true;
}

bool SimState::commit(JumpRecord& r) {
    ++counters_.attempted;
    r.accepted = admissible(r);
    if (!r.accepted) return false;
    index_.erase(r.i);
    index_.erase(r.j);
    index_.insert(r.i, r.xi_star);
    index_.insert(r.j, r.xj_star);
    ++counters_.accepted;
    scatter_.offer(r.xi, r.xi_star);
    scatter_.offer(r.xj, r.xj_star);
    return true;
}

JumpRecord SimState::step() {
    JumpRecord r = propose();
    commit(r);
    return r;
}

JumpRecord SimState::step_mod_variant() {
    JumpRecord r = propose_mod_variant();
    commit(r);
    return r;
}

void SimState::truncate_time(double t) {
    if (t > time_) throw std::invalid_argument("truncate_time cannot move the clock forward");
    time_ = t;
}

Configuration SimState::configuration() const { return Configuration{index_.sorted_keys(), params_}; }

double SimState::total_energy() const { return neumaier_sum(index_.keys_by_id()); }

Trajectory run(SimState& state, const RunOptions& opt) {
    if (!(opt.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (opt.snapshot_dt < 0.0) throw std::invalid_argument("snapshot_dt must be nonnegative");
    Trajectory tr;
    const double t0 = state.time();
    const double t_end = t0 + opt.t_end;
    auto snap = [&](double t) {
        Snapshot s;
        s.time = t;
        s.energies = state.index().sorted_keys();
        s.attempted = state.counters().attempted;
        s.accepted = state.counters().accepted;
        if (!opt.tracked_ids.empty()) {
            std::vector<double> tag;
            for (int id : opt.tracked_ids) tag.push_back(state.energy(id));
            tr.tagged.push_back(std::move(tag));
        }
        if (opt.lowest_k > 0) {
            const auto k = std::min<std::size_t>(opt.lowest_k, s.energies.size());
            tr.lowest.emplace_back(s.energies.begin(), s.energies.begin() + static_cast<std::ptrdiff_t>(k));
        }
        tr.snapshots.push_back(std::move(s));
    };
    for (int id : opt.tracked_ids)
        if (id < 0 || id >= state.params().n()) throw std::invalid_argument("tracked id out of range");

    snap(t0);
    std::int64_t next_k = 1;
    auto next_time = [&]() { return opt.snapshot_dt > 0.0 ? t0 + next_k * opt.snapshot_dt : t_end; };
    for (;;) {
        JumpRecord r = opt.mod_variant ? state.propose_mod_variant() : state.propose();
        while (next_time() <= r.time && next_time() < t_end - 1e-12 * std::max(1.0, t_end)) {
            snap(next_time());
            ++next_k;
        }
        if (r.time > t_end) {
            state.truncate_time(t_end);
            break;
        }
        state.commit(r);
        if (opt.record_events && tr.events.size() < opt.event_limit) tr.events.push_back(r);
    }
    snap(t_end);
    tr.scatter = state.scatter().samples();
    tr.counters = state.counters();
    return tr;
}

}  // namespace kac
