#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kac {

// B+ tree over particle ids keyed by energy. Leaves hold up to `fanout` (key, id)
// pairs in contiguous arrays and are chained in key order; an id -> leaf map makes
// erase independent of key ties. Equal keys are ordered by insertion.
class OrderedIndex {
public:
    static constexpr std::int32_t kNil = -1;
    static constexpr int kDefaultFanout = 32;

    OrderedIndex() : OrderedIndex(std::vector<double>{}) {}
    explicit OrderedIndex(const std::vector<double>& keys, int fanout = kDefaultFanout);

    int size() const { return size_; }
    int capacity() const { return static_cast<int>(key_.size()); }
    bool contains(int id) const { return id >= 0 && id < capacity() && leaf_of_[id] != kNil; }
    double key(int id) const { return key_[id]; }
    const std::vector<double>& keys_by_id() const { return key_; }

    void insert(int id, double key);
    void erase(int id);

    // Largest key <= x and smallest key > x, ignoring ids skip1 and skip2 (kNil if none).
    std::pair<int, int> neighbors(double x, int skip1 = kNil, int skip2 = kNil) const;
    // Keys of the same two neighbors, -inf / +inf when absent. Reads only the leaves.
    std::pair<double, double> neighbor_keys(double x, int skip1 = kNil, int skip2 = kNil) const;

    int first() const;
    int last() const;
    int next(int id) const;
    int prev(int id) const;

    std::vector<double> sorted_keys() const;
    std::vector<int> sorted_ids() const;
    // Levels including the leaves.
    int height() const { return levels_ + 1; }

    // Links, fill bounds, separator bounds, ordering, id map and size.
    bool check_invariants(std::string* why = nullptr) const;

private:
    struct Meta {
        std::int32_t count = 0;  // entries in a leaf, children in an inner node
        std::int32_t parent = kNil;
        std::int32_t prev = kNil;  // leaf chain only
        std::int32_t next = kNil;
    };

    double* lkeys(int leaf) { return &lkey_[static_cast<std::size_t>(leaf) * fanout_]; }
    const double* lkeys(int leaf) const { return &lkey_[static_cast<std::size_t>(leaf) * fanout_]; }
    std::int32_t* lids(int leaf) { return &lid_[static_cast<std::size_t>(leaf) * fanout_]; }
    const std::int32_t* lids(int leaf) const { return &lid_[static_cast<std::size_t>(leaf) * fanout_]; }
    double* seps(int node) { return &ikey_[static_cast<std::size_t>(node) * fanout_]; }
    const double* seps(int node) const { return &ikey_[static_cast<std::size_t>(node) * fanout_]; }
    std::int32_t* kids(int node) { return &ichild_[static_cast<std::size_t>(node) * fanout_]; }
    const std::int32_t* kids(int node) const { return &ichild_[static_cast<std::size_t>(node) * fanout_]; }

    struct Slot {
        int leaf = kNil, pos = 0;
    };
    std::pair<Slot, Slot> find_neighbors(double x, int skip1, int skip2) const;
    std::pair<Slot, Slot> find_neighbors_in(int leaf, double x, int skip1, int skip2) const;

    int new_leaf();
    int new_inner();
    int min_fill() const { return fanout_ / 4 > 0 ? fanout_ / 4 : 1; }
    int leaf_for(double x) const;
    int slot_of(int id) const;
    int child_slot(int parent, int child) const;
    void set_parent(int node, int level, int parent);
    void insert_into_parent(int left, int level, double sep, int right);
    void fix_leaf(int leaf);
    void fix_inner(int node, int level);
    void remove_child(int parent, int slot, int level);

    int fanout_;
    int levels_ = 0;  // inner levels above the leaves
    int root_ = kNil;
    int size_ = 0;

    std::vector<double> lkey_;
    std::vector<std::int32_t> lid_;
    std::vector<Meta> leaf_;
    std::vector<double> ikey_;  // fanout - 1 separators used per node
    std::vector<std::int32_t> ichild_;
    std::vector<Meta> inner_;
    std::vector<std::int32_t> free_leaf_, free_inner_;

    std::vector<double> key_;
    std::vector<std::int32_t> leaf_of_;
};

}  // namespace kac
