#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "cccn/coding.hpp"
#include "cccn/errors.hpp"

namespace cccn {

enum class ItemKind { plain, coded };

struct StoredItem {
  std::uint64_t content_id = 0;
  ItemKind kind = ItemKind::plain;
  int segment = -1;      // plain entries
  CodedSymbol symbol;    // coded entries
  long hit_count = 0;
  double last_access = 0.0;
  std::uint64_t seq = 0;  // admission order, final tie-break
  bool privileged = false;
};

struct LookupResult {
  std::vector<int> plain_hits;
  std::vector<CodedSymbol> coded_hits;
  std::vector<int> missing;
};

// Two-partition LFRU store. New entries land in the unprivileged partition
// (20% of capacity); a re-hit promotes to privileged, demoting the
// privileged LRU victim when full. Unprivileged eviction takes the least
// frequently used entry, ties by least recent, then admission order.
// Privileged eviction is plain LRU. One entry costs one segment slot.
class ContentStore {
 public:
  explicit ContentStore(long capacity_segments, const Field* field = nullptr)
      : capacity_(capacity_segments), field_(field) {
    unpriv_capacity_ = std::lround(0.2 * static_cast<double>(capacity_));
    if (capacity_ >= 1 && unpriv_capacity_ < 1) unpriv_capacity_ = 1;
    if (unpriv_capacity_ > capacity_) unpriv_capacity_ = capacity_;
    priv_capacity_ = capacity_ - unpriv_capacity_;
  }

  long capacity() const { return capacity_; }
  long unprivileged_capacity() const { return unpriv_capacity_; }
  long privileged_capacity() const { return priv_capacity_; }
  long size() const { return static_cast<long>(items_.size()); }

  LookupResult lookup(std::uint64_t content, const std::vector<int>& wanted, double now) {
    LookupResult r;
    auto idx = by_content_.find(content);
    for (int seg : wanted) {
      bool hit = false;
      if (idx != by_content_.end()) {
        auto it = idx->second.plain.find(seg);
        if (it != idx->second.plain.end()) {
          touch(it->second, now);
          r.plain_hits.push_back(seg);
          hit = true;
        }
      }
      if (!hit) r.missing.push_back(seg);
    }
    if (idx != by_content_.end())
      for (std::uint64_t seq : std::vector<std::uint64_t>(idx->second.coded.begin(),
                                                          idx->second.coded.end())) {
        auto it = items_.find(seq);
        touch(seq, now);
        r.coded_hits.push_back(it->second.symbol);
      }
    return r;
  }

  bool contains_encoded(std::uint64_t content) const {
    auto idx = by_content_.find(content);
    return idx != by_content_.end() && !idx->second.coded.empty();
  }

  bool contains_plain(std::uint64_t content, int segment) const {
    auto idx = by_content_.find(content);
    return idx != by_content_.end() && idx->second.plain.count(segment) > 0;
  }

  std::vector<int> plain_segments(std::uint64_t content) const {
    std::vector<int> out;
    auto idx = by_content_.find(content);
    if (idx != by_content_.end())
      for (auto& [seg, seq] : idx->second.plain) out.push_back(seg);
    return out;
  }

  // Admission; returns whatever was evicted to make room. Re-inserting a
  // present plain entry counts as a hit. A coded symbol is admitted only if
  // innovative against the coded entries already held for its generation.
  std::vector<StoredItem> insert(const StoredItem& incoming, double now) {
    std::vector<StoredItem> evicted;
    if (capacity_ < 1) return evicted;
    if (incoming.kind == ItemKind::plain) {
      auto idx = by_content_.find(incoming.content_id);
      if (idx != by_content_.end()) {
        auto it = idx->second.plain.find(incoming.segment);
        if (it != idx->second.plain.end()) {
          touch(it->second, now);
          return evicted;
        }
      }
    } else {
      if (!field_) return evicted;  // coded admission needs field context
      EchelonBasis basis(incoming.symbol.generation_size);
      auto idx = by_content_.find(incoming.content_id);
      if (idx != by_content_.end())
        for (std::uint64_t seq : idx->second.coded)
          basis.add(*field_, items_.at(seq).symbol.coding_vector, {});
      if (!basis.would_be_innovative(*field_, incoming.symbol.coding_vector))
        return evicted;
    }
    StoredItem item = incoming;
    item.seq = next_seq_++;
    item.privileged = false;
    item.last_access = now;
    if (unpriv_size() >= unpriv_capacity_) evict_unprivileged(evicted);
    admit(std::move(item));
    return evicted;
  }

  // Trace audits and tests.
  std::vector<const StoredItem*> all_items() const {
    std::vector<const StoredItem*> out;
    for (auto& [seq, item] : items_) out.push_back(&item);
    std::sort(out.begin(), out.end(),
              [](const StoredItem* a, const StoredItem* b) { return a->seq < b->seq; });
    return out;
  }

  long unpriv_size() const { return static_cast<long>(unpriv_order_.size()); }
  long priv_size() const { return static_cast<long>(priv_order_.size()); }

 private:
  struct ContentIndex {
    std::map<int, std::uint64_t> plain;  // segment -> seq
    std::set<std::uint64_t> coded;       // seqs
  };

  // (hit_count, last_access, seq): least frequent, then least recent.
  using UnprivKey = std::tuple<long, double, std::uint64_t>;
  // (last_access, seq): least recent.
  using PrivKey = std::pair<double, std::uint64_t>;

  void touch(std::uint64_t seq, double now) {
    StoredItem& item = items_.at(seq);
    if (item.privileged) {
      priv_order_.erase({item.last_access, seq});
      item.hit_count += 1;
      item.last_access = now;
      priv_order_.insert({item.last_access, seq});
    } else {
      unpriv_order_.erase({item.hit_count, item.last_access, seq});
      item.hit_count += 1;
      item.last_access = now;
      promote(seq);
    }
  }

  void promote(std::uint64_t seq) {
    StoredItem& item = items_.at(seq);
    if (priv_capacity_ < 1) {  // degenerate split: stay unprivileged
      unpriv_order_.insert({item.hit_count, item.last_access, seq});
      return;
    }
    if (static_cast<long>(priv_order_.size()) >= priv_capacity_) demote_lru();
    item.privileged = true;
    priv_order_.insert({item.last_access, seq});
  }

  // Called while the promoted entry's unprivileged slot is still free, so
  // the demoted victim always fits without a cascade eviction.
  void demote_lru() {
    auto victim = *priv_order_.begin();
    priv_order_.erase(priv_order_.begin());
    StoredItem& item = items_.at(victim.second);
    item.privileged = false;
    unpriv_order_.insert({item.hit_count, item.last_access, victim.second});
  }

  void evict_unprivileged(std::vector<StoredItem>& evicted) {
    if (unpriv_order_.empty()) return;
    auto victim = *unpriv_order_.begin();
    std::uint64_t seq = std::get<2>(victim);
    unpriv_order_.erase(unpriv_order_.begin());
    auto it = items_.find(seq);
    forget(it->second);
    evicted.push_back(std::move(it->second));
    items_.erase(it);
  }

  void admit(StoredItem item) {
    std::uint64_t seq = item.seq;
    ContentIndex& idx = by_content_[item.content_id];
    if (item.kind == ItemKind::plain)
      idx.plain[item.segment] = seq;
    else
      idx.coded.insert(seq);
    unpriv_order_.insert({item.hit_count, item.last_access, seq});
    items_.emplace(seq, std::move(item));
  }

  void forget(const StoredItem& item) {
    auto idx = by_content_.find(item.content_id);
    if (idx == by_content_.end()) return;
    if (item.kind == ItemKind::plain)
      idx->second.plain.erase(item.segment);
    else
      idx->second.coded.erase(item.seq);
    if (idx->second.plain.empty() && idx->second.coded.empty()) by_content_.erase(idx);
  }

  long capacity_, unpriv_capacity_, priv_capacity_;
  const Field* field_;
  std::uint64_t next_seq_ = 0;
  std::unordered_map<std::uint64_t, StoredItem> items_;  // seq -> item
  std::unordered_map<std::uint64_t, ContentIndex> by_content_;
  std::set<UnprivKey> unpriv_order_;
  std::set<PrivKey> priv_order_;
};

}  // namespace cccn
