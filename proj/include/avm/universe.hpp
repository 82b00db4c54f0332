#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/error.hpp"

namespace avm {

struct NameId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(NameId, NameId) = default;
};

struct Entry {
  NameId key;
  Elem value;
  friend constexpr auto operator<=>(const Entry&, const Entry&) = default;
};

// A name is a finite map from names to algebra elements. Entries are kept
// sorted by key; an entry valued bottom is distinct from an absent key.
struct Name {
  std::vector<Entry> entries;
  std::uint32_t rank = 1;

  std::optional<Elem> value_at(NameId k) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), k,
                               [](const Entry& e, NameId id) { return e.key < id; });
    if (it == entries.end() || it->key != k) return std::nullopt;
    return it->value;
  }
};

// Hereditarily finite set, kept normalised (members sorted, no repeats).
class HFSet {
 public:
  HFSet() = default;
  explicit HFSet(std::vector<HFSet> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  const std::vector<HFSet>& members() const noexcept { return members_; }

  friend bool operator==(const HFSet& a, const HFSet& b) { return a.members_ == b.members_; }
  friend bool operator<(const HFSet& a, const HFSet& b) {
    return std::lexicographical_compare(a.members_.begin(), a.members_.end(), b.members_.begin(),
                                        b.members_.end());
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) s += ",";
      s += members_[i].to_string();
    }
    return s + "}";
  }

  static HFSet von_neumann(unsigned n) {
    std::vector<HFSet> ms;
    for (unsigned k = 0; k < n; ++k) ms.push_back(von_neumann(k));
    return HFSet(std::move(ms));
  }

  static HFSet parse(std::string_view text) {
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) ++pos;
    };
    auto parse_set = [&](auto&& self) -> HFSet {
      skip();
      if (pos >= text.size() || text[pos] != '{') throw ParseError("expected '{'", pos);
      ++pos;
      std::vector<HFSet> ms;
      skip();
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        return HFSet{};
      }
      for (;;) {
        ms.push_back(self(self));
        skip();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == '}') {
          ++pos;
          break;
        }
        throw ParseError("expected ',' or '}'", pos);
      }
      return HFSet(std::move(ms));
    };
    HFSet out = parse_set(parse_set);
    skip();
    if (pos != text.size()) throw ParseError("trailing input after set", pos);
    return out;
  }

 private:
  std::vector<HFSet> members_;
};

struct BuildOptions {
  unsigned rank_bound = 2;
  std::optional<std::vector<Elem>> value_restriction;
  std::optional<std::size_t> domain_cap;
  std::size_t budget = 100000;
};

// Interned store of names. Insertion is serialised internally and lookups
// of already published ids never block, so a universe can be shared by
// evaluation threads while witnesses are being added.
class Universe {
 public:
  explicit Universe(Algebra algebra)
      : algebra_(std::move(algebra)), chunks_(max_chunks) {
    insert_name({});
    enumerated_ = 1;
    rank_sizes_ = {1};
  }

  Universe(const Universe&) = delete;
  Universe& operator=(const Universe&) = delete;

  static std::shared_ptr<Universe> build(Algebra algebra, const BuildOptions& opt = {}) {
    auto u = std::make_shared<Universe>(std::move(algebra));
    u->enumerate(opt);
    return u;
  }

  const Algebra& algebra() const noexcept { return algebra_; }
  std::size_t size() const noexcept { return size_.load(std::memory_order_acquire); }

  // Names produced by enumeration, as opposed to later insertions.
  std::size_t enumerated_size() const noexcept { return enumerated_; }
  unsigned rank_bound() const noexcept { return rank_bound_; }

  // Cumulative |V_1|, ..., |V_rank_bound|.
  const std::vector<std::size_t>& rank_sizes() const noexcept { return rank_sizes_; }

  NameId empty_name() const noexcept { return NameId{0}; }

  const Name& name(NameId id) const {
    if (id.value >= size()) throw InputError("unknown name constant #" + std::to_string(id.value));
    return chunks_[id.value >> chunk_bits][id.value & chunk_mask];
  }

  bool contains(NameId id) const noexcept { return id.value < size(); }

  std::vector<NameId> enumerated_ids() const {
    std::vector<NameId> out(enumerated_);
    for (std::size_t i = 0; i < enumerated_; ++i) out[i] = NameId{static_cast<std::uint32_t>(i)};
    return out;
  }

  std::vector<NameId> ids_up_to_rank(unsigned rank) const {
    std::vector<NameId> out;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      NameId id{static_cast<std::uint32_t>(i)};
      if (name(id).rank <= rank) out.push_back(id);
    }
    return out;
  }

  std::optional<NameId> find(std::vector<Entry> entries) const {
    normalise(entries);
    std::lock_guard lock(mutex_);
    auto it = index_.find(entries);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Interns a name: equal entry maps always yield the same id.
  NameId insert_name(std::vector<Entry> entries) {
    normalise(entries);
    std::uint32_t rank = 1;
    for (const Entry& e : entries) {
      if (!contains(e.key)) throw InputError("dangling reference to #" + std::to_string(e.key.value));
      algebra_.require(e.value);
      rank = std::max(rank, name(e.key).rank + 1);
    }
    std::lock_guard lock(mutex_);
    auto it = index_.find(entries);
    if (it != index_.end()) return it->second;
    const std::size_t id = size_.load(std::memory_order_relaxed);
    if (id >= max_chunks * chunk_size) throw ResourceError("universe capacity exhausted");
    auto& chunk = chunks_[id >> chunk_bits];
    if (!chunk) chunk = std::make_unique<Name[]>(chunk_size);
    chunk[id & chunk_mask] = Name{entries, rank};
    NameId nid{static_cast<std::uint32_t>(id)};
    index_.emplace(std::move(entries), nid);
    size_.store(id + 1, std::memory_order_release);
    return nid;
  }

  // x-check: the name whose entries are the checks of the members, valued top.
  NameId check_name(const HFSet& x) {
    std::vector<Entry> entries;
    for (const HFSet& m : x.members()) entries.push_back(Entry{check_name(m), algebra_.top()});
    return insert_name(std::move(entries));
  }

  std::string format(NameId id) const {
    const Name& n = name(id);
    std::string s = "{";
    for (std::size_t i = 0; i < n.entries.size(); ++i) {
      if (i) s += ", ";
      s += "#" + std::to_string(n.entries[i].key.value) + ": " + algebra_.name_of(n.entries[i].value);
    }
    return s + "}";
  }

  // Names outside the enumerated part are spelled out structurally, so the
  // rendering does not depend on insertion order.
  std::string describe(NameId id) const {
    if (id.value < enumerated_) return "#" + std::to_string(id.value);
    const Name& n = name(id);
    std::string s = "{";
    for (std::size_t i = 0; i < n.entries.size(); ++i) {
      if (i) s += ", ";
      s += describe(n.entries[i].key) + ": " + algebra_.name_of(n.entries[i].value);
    }
    return s + "}";
  }

  // Parses "{#0: half, #1: one}" against this universe's algebra.
  std::vector<Entry> parse_entries(std::string_view text) const {
    std::vector<Entry> out;
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    auto expect = [&](char c) {
      skip();
      if (pos >= text.size() || text[pos] != c) throw ParseError(std::string("expected '") + c + "'", pos);
      ++pos;
    };
    expect('{');
    skip();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
    } else {
      for (;;) {
        expect('#');
        std::size_t start = pos;
        std::uint64_t v = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
          if (v > 0xFFFFFFFFULL) throw ParseError("name constant too large", start);
          ++pos;
        }
        if (pos == start) throw ParseError("expected a name number", pos);
        if (v >= size()) throw InputError("unknown name constant #" + std::to_string(v));
        expect(':');
        skip();
        start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != '}' && text[pos] != ' ') ++pos;
        if (pos == start) throw ParseError("expected an element identifier", pos);
        Elem e = algebra_.element(text.substr(start, pos - start));
        out.push_back(Entry{NameId{static_cast<std::uint32_t>(v)}, e});
        skip();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        expect('}');
        break;
      }
    }
    skip();
    if (pos != text.size()) throw ParseError("trailing input after name literal", pos);
    return out;
  }

  NameId insert_literal(std::string_view text) { return insert_name(parse_entries(text)); }

  // Number of maps from subsets of an m-element set (of size at most cap)
  // into v values, saturating at a large bound.
  static double count_maps(std::size_t m, std::size_t v, std::optional<std::size_t> cap) {
    const std::size_t kmax = cap ? std::min(*cap, m) : m;
    if (!cap) return std::pow(static_cast<double>(v + 1), static_cast<double>(m));
    double total = 0, binom = 1;
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (k > 0) binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
      total += binom * std::pow(static_cast<double>(v), static_cast<double>(k));
    }
    return total;
  }

 private:
  static constexpr std::size_t chunk_bits = 12;
  static constexpr std::size_t chunk_size = std::size_t{1} << chunk_bits;
  static constexpr std::size_t chunk_mask = chunk_size - 1;
  static constexpr std::size_t max_chunks = 4096;

  static void normalise(std::vector<Entry>& entries) {
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].key == entries[i - 1].key) {
        throw InputError("name lists #" + std::to_string(entries[i].key.value) + " more than once");
      }
    }
  }

  void enumerate(const BuildOptions& opt) {
    if (opt.rank_bound < 1) throw InputError("rank bound must be at least 1");
    std::vector<Elem> values = opt.value_restriction ? *opt.value_restriction : algebra_.elements();
    for (Elem e : values) algebra_.require(e);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    for (unsigned n = 2; n <= opt.rank_bound; ++n) {
      const std::size_t prev = size();
      const double predicted = count_maps(prev, values.size(), opt.domain_cap);
      if (predicted > static_cast<double>(opt.budget)) {
        std::ostringstream msg;
        msg << "rank " << n << " would hold about " << std::setprecision(4) << predicted
            << " names, over the budget of " << opt.budget;
        throw ResourceError(msg.str());
      }
      std::vector<Entry> current;
      const std::size_t cap = opt.domain_cap ? *opt.domain_cap : prev;
      auto rec = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
        if (pos == prev || remaining == 0) {
          insert_name(current);
          return;
        }
        self(self, pos + 1, remaining);
        for (Elem v : values) {
          current.push_back(Entry{NameId{static_cast<std::uint32_t>(pos)}, v});
          self(self, pos + 1, remaining - 1);
          current.pop_back();
        }
      };
      rec(rec, 0, cap);
      rank_sizes_.push_back(size());
      rank_bound_ = n;
      enumerated_ = size();
    }
  }

  Algebra algebra_;
  std::vector<std::unique_ptr<Name[]>> chunks_;
  std::atomic<std::size_t> size_{0};
  mutable std::mutex mutex_;
  std::map<std::vector<Entry>, NameId> index_;
  std::size_t enumerated_ = 0;
  unsigned rank_bound_ = 1;
  std::vector<std::size_t> rank_sizes_;
};

inline std::shared_ptr<Universe> build_universe(const Algebra& algebra, const BuildOptions& opt = {}) {
  return Universe::build(algebra, opt);
}

}  // namespace avm
