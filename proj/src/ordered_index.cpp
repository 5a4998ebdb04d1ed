#include "kac/ordered_index.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kac {

namespace {

// Number of a[0..m) that are <= x. A flat count has no dependent loads and vectorizes.
inline int count_le(const double* a, int m, double x) {
    int c = 0;
    for (int i = 0; i < m; ++i) c += a[i] <= x;
    return c;
}

}  // namespace

OrderedIndex::OrderedIndex(const std::vector<double>& keys, int fanout) : fanout_(fanout) {
    if (fanout < 4) throw std::invalid_argument("fanout must be at least 4");
    const int n = static_cast<int>(keys.size());
    key_ = keys;
    leaf_of_.assign(keys.size(), kNil);
    size_ = n;
    std::vector<int> ids(keys.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return keys[a] < keys[b]; });

    const int fill = std::max(2, fanout_ * 3 / 4);
    const int nleaves = std::max(1, (n + fill - 1) / fill);
    std::vector<int> nodes;
    std::vector<double> mins;
    int pos = 0;
    for (int l = 0; l < nleaves; ++l) {
        const int take = n / nleaves + (l < n % nleaves ? 1 : 0);
        const int lf = new_leaf();
        for (int k = 0; k < take; ++k) {
            const int id = ids[pos++];
            lkeys(lf)[k] = keys[id];
            lids(lf)[k] = id;
            leaf_of_[id] = lf;
        }
        leaf_[lf].count = take;
        if (!nodes.empty()) {
            leaf_[nodes.back()].next = lf;
            leaf_[lf].prev = nodes.back();
        }
        nodes.push_back(lf);
        mins.push_back(take > 0 ? lkeys(lf)[0] : 0.0);
    }
    int level = 0;
    while (nodes.size() > 1) {
        const int m = static_cast<int>(nodes.size());
        const int groups = (m + fill - 1) / fill;
        std::vector<int> up;
        std::vector<double> up_min;
        int p = 0;
        for (int g = 0; g < groups; ++g) {
            const int take = m / groups + (g < m % groups ? 1 : 0);
            const int nd = new_inner();
            for (int k = 0; k < take; ++k) {
                kids(nd)[k] = nodes[p + k];
                if (k > 0) seps(nd)[k - 1] = mins[p + k];
                set_parent(nodes[p + k], level, nd);
            }
            inner_[nd].count = take;
            up.push_back(nd);
            up_min.push_back(mins[p]);
            p += take;
        }
        nodes = std::move(up);
        mins = std::move(up_min);
        ++level;
    }
    root_ = nodes.front();
    levels_ = level;
}

int OrderedIndex::new_leaf() {
    if (!free_leaf_.empty()) {
        const int lf = free_leaf_.back();
        free_leaf_.pop_back();
        leaf_[lf] = Meta{};
        return lf;
    }
    leaf_.emplace_back();
    lkey_.resize(leaf_.size() * fanout_);
    lid_.resize(leaf_.size() * fanout_);
    return static_cast<int>(leaf_.size()) - 1;
}

int OrderedIndex::new_inner() {
    if (!free_inner_.empty()) {
        const int nd = free_inner_.back();
        free_inner_.pop_back();
        inner_[nd] = Meta{};
        return nd;
    }
    inner_.emplace_back();
    ikey_.resize(inner_.size() * fanout_);
    ichild_.resize(inner_.size() * fanout_);
    return static_cast<int>(inner_.size()) - 1;
}

void OrderedIndex::set_parent(int node, int level, int parent) {
    (level == 0 ? leaf_[node] : inner_[node]).parent = parent;
}

int OrderedIndex::leaf_for(double x) const {
    int nd = root_;
    for (int l = levels_; l > 0; --l) nd = kids(nd)[count_le(seps(nd), inner_[nd].count - 1, x)];
    return nd;
}

int OrderedIndex::slot_of(int id) const {
    const int lf = leaf_of_[id];
    const std::int32_t* ids = lids(lf);
    return static_cast<int>(std::find(ids, ids + leaf_[lf].count, id) - ids);
}

int OrderedIndex::child_slot(int parent, int child) const {
    const std::int32_t* ch = kids(parent);
    return static_cast<int>(std::find(ch, ch + inner_[parent].count, child) - ch);
}

void OrderedIndex::insert(int id, double key) {
    if (id < 0) throw std::invalid_argument("negative id");
    if (id >= capacity()) {
        key_.resize(id + 1);
        leaf_of_.resize(id + 1, kNil);
    }
    if (leaf_of_[id] != kNil) throw std::invalid_argument("id already present in index");
    key_[id] = key;
    int lf = leaf_for(key);
    int c = leaf_[lf].count;
    int pos = count_le(lkeys(lf), c, key);
    if (c == fanout_) {
        const int right = new_leaf();
        const int mid = fanout_ / 2;
        std::copy(lkeys(lf) + mid, lkeys(lf) + c, lkeys(right));
        std::copy(lids(lf) + mid, lids(lf) + c, lids(right));
        leaf_[lf].count = mid;
        leaf_[right].count = c - mid;
        for (int k = 0; k < c - mid; ++k) leaf_of_[lids(right)[k]] = right;
        const int after = leaf_[lf].next;
        leaf_[right].next = after;
        leaf_[right].prev = lf;
        if (after != kNil) leaf_[after].prev = right;
        leaf_[lf].next = right;
        insert_into_parent(lf, 0, lkeys(right)[0], right);
        if (pos > mid) {
            lf = right;
            pos -= mid;
        }
        c = leaf_[lf].count;
    }
    std::copy_backward(lkeys(lf) + pos, lkeys(lf) + c, lkeys(lf) + c + 1);
    std::copy_backward(lids(lf) + pos, lids(lf) + c, lids(lf) + c + 1);
    lkeys(lf)[pos] = key;
    lids(lf)[pos] = id;
    leaf_[lf].count = c + 1;
    leaf_of_[id] = lf;
    ++size_;
}

void OrderedIndex::insert_into_parent(int left, int level, double sep, int right) {
    const int parent = (level == 0 ? leaf_[left] : inner_[left]).parent;
    if (parent == kNil) {
        const int r = new_inner();
        kids(r)[0] = left;
        kids(r)[1] = right;
        seps(r)[0] = sep;
        inner_[r].count = 2;
        set_parent(left, level, r);
        set_parent(right, level, r);
        root_ = r;
        ++levels_;
        return;
    }
    const int slot = child_slot(parent, left);
    const int c = inner_[parent].count;
    if (c < fanout_) {
        std::copy_backward(kids(parent) + slot + 1, kids(parent) + c, kids(parent) + c + 1);
        std::copy_backward(seps(parent) + slot, seps(parent) + c - 1, seps(parent) + c);
        kids(parent)[slot + 1] = right;
        seps(parent)[slot] = sep;
        inner_[parent].count = c + 1;
        set_parent(right, level, parent);
        return;
    }
    std::vector<int> ch(kids(parent), kids(parent) + c);
    std::vector<double> sp(seps(parent), seps(parent) + c - 1);
    ch.insert(ch.begin() + slot + 1, right);
    sp.insert(sp.begin() + slot, sep);
    const int total = c + 1, lc = total / 2;
    const int sib = new_inner();
    std::copy(ch.begin(), ch.begin() + lc, kids(parent));
    std::copy(sp.begin(), sp.begin() + lc - 1, seps(parent));
    std::copy(ch.begin() + lc, ch.end(), kids(sib));
    std::copy(sp.begin() + lc, sp.end(), seps(sib));
    inner_[parent].count = lc;
    inner_[sib].count = total - lc;
    for (int k = 0; k < lc; ++k) set_parent(ch[k], level, parent);
    for (int k = lc; k < total; ++k) set_parent(ch[k], level, sib);
    insert_into_parent(parent, level + 1, sp[lc - 1], sib);
}

void OrderedIndex::erase(int id) {
    if (!contains(id)) throw std::invalid_argument("id not present in index");
    const int lf = leaf_of_[id];
    const int c = leaf_[lf].count;
    const int s = slot_of(id);
    std::copy(lkeys(lf) + s + 1, lkeys(lf) + c, lkeys(lf) + s);
    std::copy(lids(lf) + s + 1, lids(lf) + c, lids(lf) + s);
    leaf_[lf].count = c - 1;
    leaf_of_[id] = kNil;
    --size_;
    if (levels_ > 0 && c - 1 < min_fill()) fix_leaf(lf);
}

void OrderedIndex::fix_leaf(int lf) {
    const int p = leaf_[lf].parent;
    const int slot = child_slot(p, lf);
    const int rslot = slot > 0 ? slot : 1;
    const int L = kids(p)[rslot - 1], R = kids(p)[rslot];
    const int lc = leaf_[L].count, rc = leaf_[R].count;
    if (lc + rc <= fanout_) {
        std::copy(lkeys(R), lkeys(R) + rc, lkeys(L) + lc);
        std::copy(lids(R), lids(R) + rc, lids(L) + lc);
        for (int k = lc; k < lc + rc; ++k) leaf_of_[lids(L)[k]] = L;
        leaf_[L].count = lc + rc;
        const int after = leaf_[R].next;
        leaf_[L].next = after;
        if (after != kNil) leaf_[after].prev = L;
        leaf_[R] = Meta{};
        free_leaf_.push_back(R);
        remove_child(p, rslot, 0);
        return;
    }
    const int want = (lc + rc) / 2;
    if (lc < want) {
        const int t = want - lc;
        std::copy(lkeys(R), lkeys(R) + t, lkeys(L) + lc);
        std::copy(lids(R), lids(R) + t, lids(L) + lc);
        std::copy(lkeys(R) + t, lkeys(R) + rc, lkeys(R));
        std::copy(lids(R) + t, lids(R) + rc, lids(R));
        for (int k = lc; k < want; ++k) leaf_of_[lids(L)[k]] = L;
        leaf_[L].count = want;
        leaf_[R].count = rc - t;
    } else {
        const int t = lc - want;
        std::copy_backward(lkeys(R), lkeys(R) + rc, lkeys(R) + rc + t);
        std::copy_backward(lids(R), lids(R) + rc, lids(R) + rc + t);
        std::copy(lkeys(L) + want, lkeys(L) + lc, lkeys(R));
        std::copy(lids(L) + want, lids(L) + lc, lids(R));
        for (int k = 0; k < t; ++k) leaf_of_[lids(R)[k]] = R;
        leaf_[L].count = want;
        leaf_[R].count = rc + t;
    }
    seps(p)[rslot - 1] = lkeys(R)[0];
}

void OrderedIndex::remove_child(int p, int slot, int level) {
    const int c = inner_[p].count;
    std::copy(kids(p) + slot + 1, kids(p) + c, kids(p) + slot);
    std::copy(seps(p) + slot, seps(p) + c - 1, seps(p) + slot - 1);
    inner_[p].count = c - 1;
    if (p == root_) {
        if (c - 1 == 1) {
            root_ = kids(p)[0];
            set_parent(root_, level, kNil);
            inner_[p] = Meta{};
            free_inner_.push_back(p);
            --levels_;
        }
        return;
    }
    if (c - 1 < std::max(2, min_fill())) fix_inner(p, level + 1);
}

void OrderedIndex::fix_inner(int node, int level) {
    const int p = inner_[node].parent;
    const int slot = child_slot(p, node);
    const int rslot = slot > 0 ? slot : 1;
    const int L = kids(p)[rslot - 1], R = kids(p)[rslot];
    const int lc = inner_[L].count, rc = inner_[R].count;
    double& sep = seps(p)[rslot - 1];
    if (lc + rc <= fanout_) {
        seps(L)[lc - 1] = sep;
        std::copy(seps(R), seps(R) + rc - 1, seps(L) + lc);
        std::copy(kids(R), kids(R) + rc, kids(L) + lc);
        for (int k = lc; k < lc + rc; ++k) set_parent(kids(L)[k], level - 1, L);
        inner_[L].count = lc + rc;
        inner_[R] = Meta{};
        free_inner_.push_back(R);
        remove_child(p, rslot, level);
        return;
    }
    const int want = (lc + rc) / 2;
    // Rotate one child at a time through the parent separator.
    while (inner_[L].count < want) {
        const int l = inner_[L].count, r = inner_[R].count;
        seps(L)[l - 1] = sep;
        kids(L)[l] = kids(R)[0];
        set_parent(kids(R)[0], level - 1, L);
        sep = seps(R)[0];
        std::copy(kids(R) + 1, kids(R) + r, kids(R));
        std::copy(seps(R) + 1, seps(R) + r - 1, seps(R));
        inner_[L].count = l + 1;
        inner_[R].count = r - 1;
    }
    while (inner_[L].count > want) {
        const int l = inner_[L].count, r = inner_[R].count;
        std::copy_backward(kids(R), kids(R) + r, kids(R) + r + 1);
        std::copy_backward(seps(R), seps(R) + r - 1, seps(R) + r);
        kids(R)[0] = kids(L)[l - 1];
        seps(R)[0] = sep;
        sep = seps(L)[l - 2];
        set_parent(kids(R)[0], level - 1, R);
        inner_[L].count = l - 1;
        inner_[R].count = r + 1;
    }
}

int OrderedIndex::first() const {
    int nd = root_;
    for (int l = levels_; l > 0; --l) nd = kids(nd)[0];
    return leaf_[nd].count > 0 ? lids(nd)[0] : kNil;
}

int OrderedIndex::last() const {
    int nd = root_;
    for (int l = levels_; l > 0; --l) nd = kids(nd)[inner_[nd].count - 1];
    return leaf_[nd].count > 0 ? lids(nd)[leaf_[nd].count - 1] : kNil;
}

int OrderedIndex::next(int id) const {
    const int lf = leaf_of_[id];
    const int s = slot_of(id);
    if (s + 1 < leaf_[lf].count) return lids(lf)[s + 1];
    const int after = leaf_[lf].next;
    return after == kNil ? kNil : lids(after)[0];
}

int OrderedIndex::prev(int id) const {
    const int lf = leaf_of_[id];
    const int s = slot_of(id);
    if (s > 0) return lids(lf)[s - 1];
    const int before = leaf_[lf].prev;
    return before == kNil ? kNil : lids(before)[leaf_[before].count - 1];
}

std::pair<OrderedIndex::Slot, OrderedIndex::Slot> OrderedIndex::find_neighbors(double x, int skip1,
                                                                              int skip2) const {
    return find_neighbors_in(leaf_for(x), x, skip1, skip2);
}

std::pair<OrderedIndex::Slot, OrderedIndex::Slot> OrderedIndex::find_neighbors_in(int lf, double x, int skip1,
                                                                                 int skip2) const {
    const int pos = count_le(lkeys(lf), leaf_[lf].count, x);
    auto wanted = [&](int id) { return id != skip1 && id != skip2; };
    Slot succ;
    for (int l = lf, p = pos; l != kNil && succ.leaf == kNil; l = leaf_[l].next, p = 0)
        for (; p < leaf_[l].count; ++p)
            if (wanted(lids(l)[p])) {
                succ = {l, p};
                break;
            }
    Slot pred;
    for (int l = lf, p = pos - 1; l != kNil && pred.leaf == kNil;) {
        for (; p >= 0; --p)
            if (wanted(lids(l)[p])) {
                pred = {l, p};
                break;
            }
        l = leaf_[l].prev;
        if (l != kNil) p = leaf_[l].count - 1;
    }
    return {pred, succ};
}

std::pair<int, int> OrderedIndex::neighbors(double x, int skip1, int skip2) const {
    const auto [p, s] = find_neighbors(x, skip1, skip2);
    return {p.leaf == kNil ? kNil : lids(p.leaf)[p.pos], s.leaf == kNil ? kNil : lids(s.leaf)[s.pos]};
}

std::pair<double, double> OrderedIndex::neighbor_keys(double x, int skip1, int skip2) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto [p, s] = find_neighbors(x, skip1, skip2);
    return {p.leaf == kNil ? -inf : lkeys(p.leaf)[p.pos], s.leaf == kNil ? inf : lkeys(s.leaf)[s.pos]};
}

std::vector<int> OrderedIndex::sorted_ids() const {
    std::vector<int> out;
    out.reserve(size_);
    int nd = root_;
    for (int l = levels_; l > 0; --l) nd = kids(nd)[0];
    for (; nd != kNil; nd = leaf_[nd].next) out.insert(out.end(), lids(nd), lids(nd) + leaf_[nd].count);
    return out;
}

std::vector<double> OrderedIndex::sorted_keys() const {
    std::vector<double> out;
    out.reserve(size_);
    int nd = root_;
    for (int l = levels_; l > 0; --l) nd = kids(nd)[0];
    for (; nd != kNil; nd = leaf_[nd].next) out.insert(out.end(), lkeys(nd), lkeys(nd) + leaf_[nd].count);
    return out;
}

bool OrderedIndex::check_invariants(std::string* why) const {
    std::string msg;
    std::vector<int> leaves;
    int total = 0;
    const double inf = std::numeric_limits<double>::infinity();
    // Depth-first walk carrying the separator bounds each subtree must respect.
    std::function<bool(int, int, int, double, double)> walk = [&](int nd, int level, int parent, double lo,
                                                                  double hi) {
        const auto tag = std::to_string(nd);
        if (level == 0) {
            const Meta& m = leaf_[nd];
            if (m.parent != parent) return msg = "broken parent link at leaf " + tag, false;
            if (m.count > fanout_ || (nd != root_ && m.count < min_fill()))
                return msg = "leaf fill out of bounds at " + tag, false;
            for (int k = 0; k < m.count; ++k) {
                const double x = lkeys(nd)[k];
                const int id = lids(nd)[k];
                if (x < lo || x > hi) return msg = "key outside separator bounds in leaf " + tag, false;
                if (k > 0 && x < lkeys(nd)[k - 1]) return msg = "leaf not sorted at " + tag, false;
                if (id < 0 || id >= capacity() || leaf_of_[id] != nd || key_[id] != x)
                    return msg = "id map inconsistent for id " + std::to_string(id), false;
            }
            total += m.count;
            leaves.push_back(nd);
            return true;
        }
        const Meta& m = inner_[nd];
        if (m.parent != parent) return msg = "broken parent link at inner " + tag, false;
        if (m.count > fanout_ || m.count < (nd == root_ ? 2 : std::max(2, min_fill())))
            return msg = "inner fill out of bounds at " + tag, false;
        for (int k = 0; k + 1 < m.count; ++k) {
            const double s = seps(nd)[k];
            if (s < lo || s > hi || (k > 0 && s < seps(nd)[k - 1]))
                return msg = "separators out of order at " + tag, false;
        }
        for (int k = 0; k < m.count; ++k) {
            const double clo = k == 0 ? lo : seps(nd)[k - 1];
            const double chi = k + 1 == m.count ? hi : seps(nd)[k];
            if (!walk(kids(nd)[k], level - 1, nd, clo, chi)) return false;
        }
        return true;
    };
    auto fail = [&]() {
        if (why) *why = msg;
        return false;
    };
    if (!walk(root_, levels_, kNil, -inf, inf)) return fail();
    if (total != size_) return msg = "size mismatch", fail();
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const int want_prev = k == 0 ? kNil : leaves[k - 1];
        const int want_next = k + 1 == leaves.size() ? kNil : leaves[k + 1];
        if (leaf_[leaves[k]].prev != want_prev || leaf_[leaves[k]].next != want_next)
            return msg = "leaf chain broken at " + std::to_string(leaves[k]), fail();
    }
    const auto present = std::count_if(leaf_of_.begin(), leaf_of_.end(), [](std::int32_t l) { return l != kNil; });
    if (present != size_) return msg = "stale id map entries", fail();
    return true;
}

}  // namespace kac
