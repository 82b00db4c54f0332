#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avm/error.hpp"

namespace avm {

// Opaque element handle. The index carries no order information; the
// lattice order is always read off the meet table.
struct Elem {
  std::uint8_t index = 0;
  friend constexpr auto operator<=>(Elem, Elem) = default;
};

inline constexpr std::size_t max_carrier = 64;

enum class BinaryOp { meet, join, imp };

class Algebra {
 public:
  using Table = std::vector<Elem>;

  Algebra() = default;

  Algebra(std::string name, std::vector<std::string> element_names, Table meet,
          Table join, std::optional<Table> imp,
          std::optional<std::vector<Elem>> star, Elem top, Elem bottom)
      : name_(std::move(name)),
        names_(std::move(element_names)),
        meet_(std::move(meet)),
        join_(std::move(join)),
        imp_(std::move(imp)),
        star_(std::move(star)),
        top_(top),
        bottom_(bottom) {
    const std::size_t n = names_.size();
    if (n == 0 || n > max_carrier) {
      throw InputError("carrier size must be between 1 and 64, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (names_[i].empty()) throw InputError("empty element identifier");
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw InputError("duplicate element identifier '" + names_[i] + "'");
      }
    }
    validate_table(meet_, "meet");
    validate_table(join_, "join");
    if (imp_) validate_table(*imp_, "imp");
    if (star_) {
      if (star_->size() != n) throw InputError("star table must have one entry per element");
      for (Elem e : *star_) require(e);
    }
    require(top_);
    require(bottom_);
    all_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) all_.push_back(Elem{static_cast<std::uint8_t>(i)});
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<Elem>& elements() const noexcept { return all_; }
  const std::vector<std::string>& element_names() const noexcept { return names_; }

  const std::string& name_of(Elem a) const {
    require(a);
    return names_[a.index];
  }

  std::optional<Elem> find(std::string_view id) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == id) return Elem{static_cast<std::uint8_t>(i)};
    }
    return std::nullopt;
  }

  Elem element(std::string_view id) const {
    if (auto e = find(id)) return *e;
    throw InputError("unknown element identifier '" + std::string(id) + "' in algebra " + name_);
  }

  void require(Elem a) const {
    if (a.index >= names_.size()) {
      throw InputError("element index " + std::to_string(a.index) + " outside carrier of " + name_);
    }
  }

  Elem top() const noexcept { return top_; }
  Elem bottom() const noexcept { return bottom_; }
  bool has_imp() const noexcept { return imp_.has_value(); }
  bool has_star() const noexcept { return star_.has_value(); }

  Elem meet(Elem a, Elem b) const noexcept { return meet_[a.index * size() + b.index]; }
  Elem join(Elem a, Elem b) const noexcept { return join_[a.index * size() + b.index]; }

  Elem imp(Elem a, Elem b) const {
    if (!imp_) throw CapabilityError("algebra " + name_ + " has no implication table");
    return (*imp_)[a.index * size() + b.index];
  }

  Elem star(Elem a) const {
    if (!star_) throw CapabilityError("algebra " + name_ + " has no star operation");
    return (*star_)[a.index];
  }

  Elem apply(BinaryOp op, Elem a, Elem b) const {
    require(a);
    require(b);
    switch (op) {
      case BinaryOp::meet: return meet(a, b);
      case BinaryOp::join: return join(a, b);
      case BinaryOp::imp: return imp(a, b);
    }
    return bottom_;
  }

  bool leq(Elem a, Elem b) const noexcept { return meet(a, b) == a; }

  Elem big_meet(std::span<const Elem> xs) const noexcept {
    Elem acc = top_;
    for (Elem x : xs) acc = meet(acc, x);
    return acc;
  }

  Elem big_join(std::span<const Elem> xs) const noexcept {
    Elem acc = bottom_;
    for (Elem x : xs) acc = join(acc, x);
    return acc;
  }

  // Subsets of the carrier as bitmasks over element indices.
  Elem big_meet_mask(std::uint64_t mask) const noexcept {
    Elem acc = top_;
    for (Elem x : all_) {
      if (mask >> x.index & 1U) acc = meet(acc, x);
    }
    return acc;
  }

  Elem big_join_mask(std::uint64_t mask) const noexcept {
    Elem acc = bottom_;
    for (Elem x : all_) {
      if (mask >> x.index & 1U) acc = join(acc, x);
    }
    return acc;
  }

  const Table& meet_table() const noexcept { return meet_; }
  const Table& join_table() const noexcept { return join_; }
  const std::optional<Table>& imp_table() const noexcept { return imp_; }
  const std::optional<std::vector<Elem>>& star_table() const noexcept { return star_; }

  Algebra with_operations(std::string name, std::optional<Table> imp,
                          std::optional<std::vector<Elem>> star) const {
    return Algebra(std::move(name), names_, meet_, join_, std::move(imp), std::move(star), top_, bottom_);
  }

  friend bool operator==(const Algebra&, const Algebra&) = default;

 private:
  void validate_table(const Table& t, const char* what) const {
    if (t.size() != size() * size()) {
      throw InputError(std::string(what) + " table must have " + std::to_string(size() * size()) + " entries");
    }
    for (Elem e : t) require(e);
  }

  std::string name_;
  std::vector<std::string> names_;
  Table meet_;
  Table join_;
  std::optional<Table> imp_;
  std::optional<std::vector<Elem>> star_;
  Elem top_{};
  Elem bottom_{};
  std::vector<Elem> all_;
};

class DesignatedSet {
 public:
  DesignatedSet() = default;
  explicit DesignatedSet(std::uint64_t mask) : mask_(mask) {}

  static DesignatedSet of(std::span<const Elem> members) {
    std::uint64_t m = 0;
    for (Elem e : members) m |= std::uint64_t{1} << e.index;
    return DesignatedSet(m);
  }
  static DesignatedSet of(std::initializer_list<Elem> members) {
    return of(std::span<const Elem>(members.begin(), members.size()));
  }

  bool contains(Elem a) const noexcept { return (mask_ >> a.index & 1U) != 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
  std::uint64_t mask() const noexcept { return mask_; }

  std::vector<Elem> members() const {
    std::vector<Elem> out;
    for (unsigned i = 0; i < 64; ++i) {
      if (mask_ >> i & 1U) out.push_back(Elem{static_cast<std::uint8_t>(i)});
    }
    return out;
  }

  friend bool operator==(DesignatedSet, DesignatedSet) = default;

 private:
  std::uint64_t mask_ = 0;
};

inline std::string format_designated(const Algebra& alg, const DesignatedSet& d) {
  std::string out = "{";
  bool first = true;
  for (Elem e : alg.elements()) {
    if (!d.contains(e)) continue;
    if (!first) out += ",";
    out += alg.name_of(e);
    first = false;
  }
  return out + "}";
}

// An algebra paired with its designated set. When the star was derived
// from the designated set, changing the set re-derives the star.
struct DesignatedAlgebra {
  Algebra algebra;
  DesignatedSet designated;
  bool star_follows_designated = false;
};

// ---------------------------------------------------------------------------
// Reports

struct LawVerdict {
  std::string law;
  bool holds = true;
  std::vector<Elem> witness;
};

class AlgebraReport {
 public:
  void add(std::string law, bool holds, std::vector<Elem> witness = {}) {
    if (holds != witness.empty()) {
      throw InvariantError("verdict '" + law + "' must carry a witness exactly when it fails");
    }
    for (auto& v : verdicts_) {
      if (v.law == law) {
        v = LawVerdict{std::move(law), holds, std::move(witness)};
        return;
      }
    }
    verdicts_.push_back(LawVerdict{std::move(law), holds, std::move(witness)});
  }

  const LawVerdict* find(std::string_view law) const {
    for (const auto& v : verdicts_) {
      if (v.law == law) return &v;
    }
    return nullptr;
  }

  bool holds(std::string_view law) const {
    const LawVerdict* v = find(law);
    if (!v) throw InputError("report has no verdict named '" + std::string(law) + "'");
    return v->holds;
  }

  const std::vector<LawVerdict>& verdicts() const noexcept { return verdicts_; }

  void merge(const AlgebraReport& other) {
    for (const auto& v : other.verdicts_) add(v.law, v.holds, v.witness);
    if (other.atom) atom = other.atom;
    if (other.coatom) coatom = other.coatom;
  }

  std::optional<Elem> atom;
  std::optional<Elem> coatom;

 private:
  std::vector<LawVerdict> verdicts_;
};

namespace detail {

inline std::vector<Elem> first_failure(const AlgebraReport& r, std::initializer_list<const char*> laws) {
  for (const char* law : laws) {
    const LawVerdict* v = r.find(law);
    if (v && !v->holds) return v->witness;
  }
  return {};
}

inline std::vector<Elem> mask_elements(const Algebra& alg, std::uint64_t mask) {
  std::vector<Elem> out;
  for (Elem e : alg.elements()) {
    if (mask >> e.index & 1U) out.push_back(e);
  }
  return out;
}

inline std::uint64_t full_mask(const Algebra& alg) {
  return alg.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << alg.size()) - 1;
}

inline std::uint64_t bit(Elem e) { return std::uint64_t{1} << e.index; }

}  // namespace detail

inline constexpr std::size_t subset_search_cap = 12;

// ---------------------------------------------------------------------------
// Law checks

inline AlgebraReport check_lattice(const Algebra& alg) {
  AlgebraReport r;
  const auto& E = alg.elements();
  auto binary = [&](const char* law, auto&& pred) {
    for (Elem a : E) {
      for (Elem b : E) {
        if (!pred(a, b)) {
          r.add(law, false, {a, b});
          return;
        }
      }
    }
    r.add(law, true);
  };
  auto ternary = [&](const char* law, auto&& pred) {
    for (Elem a : E) {
      for (Elem b : E) {
        for (Elem c : E) {
          if (!pred(a, b, c)) {
            r.add(law, false, {a, b, c});
            return;
          }
        }
      }
    }
    r.add(law, true);
  };
  auto unary = [&](const char* law, auto&& pred) {
    for (Elem a : E) {
      if (!pred(a)) {
        r.add(law, false, {a});
        return;
      }
    }
    r.add(law, true);
  };

  binary("meet-commutative", [&](Elem a, Elem b) { return alg.meet(a, b) == alg.meet(b, a); });
  binary("join-commutative", [&](Elem a, Elem b) { return alg.join(a, b) == alg.join(b, a); });
  ternary("meet-associative", [&](Elem a, Elem b, Elem c) {
    return alg.meet(alg.meet(a, b), c) == alg.meet(a, alg.meet(b, c));
  });
  ternary("join-associative", [&](Elem a, Elem b, Elem c) {
    return alg.join(alg.join(a, b), c) == alg.join(a, alg.join(b, c));
  });
  unary("meet-idempotent", [&](Elem a) { return alg.meet(a, a) == a; });
  unary("join-idempotent", [&](Elem a) { return alg.join(a, a) == a; });
  binary("absorption-meet-join", [&](Elem a, Elem b) { return alg.meet(a, alg.join(a, b)) == a; });
  binary("absorption-join-meet", [&](Elem a, Elem b) { return alg.join(a, alg.meet(a, b)) == a; });
  ternary("distributive-meet-over-join", [&](Elem a, Elem b, Elem c) {
    return alg.meet(a, alg.join(b, c)) == alg.join(alg.meet(a, b), alg.meet(a, c));
  });
  ternary("distributive-join-over-meet", [&](Elem a, Elem b, Elem c) {
    return alg.join(a, alg.meet(b, c)) == alg.meet(alg.join(a, b), alg.join(a, c));
  });
  unary("top-is-maximum", [&](Elem a) { return alg.leq(a, alg.top()); });
  unary("bottom-is-minimum", [&](Elem a) { return alg.leq(alg.bottom(), a); });

  auto lattice_fail = detail::first_failure(
      r, {"meet-commutative", "join-commutative", "meet-associative", "join-associative", "meet-idempotent",
          "join-idempotent", "absorption-meet-join", "absorption-join-meet"});
  r.add("lattice", lattice_fail.empty(), lattice_fail);
  auto dist_fail = lattice_fail.empty()
                       ? detail::first_failure(r, {"distributive-meet-over-join", "distributive-join-over-meet"})
                       : lattice_fail;
  r.add("distributive", dist_fail.empty(), dist_fail);
  auto bound_fail = detail::first_failure(r, {"top-is-maximum", "bottom-is-minimum"});
  r.add("bounded", bound_fail.empty(), bound_fail);
  return r;
}

inline AlgebraReport check_drim(const Algebra& alg) {
  if (!alg.has_imp()) throw CapabilityError("drim check needs an implication table");
  AlgebraReport r;
  const auto& E = alg.elements();
  auto ternary = [&](const char* law, auto&& pred) {
    for (Elem x : E) {
      for (Elem y : E) {
        for (Elem z : E) {
          if (!pred(x, y, z)) {
            r.add(law, false, {x, y, z});
            return;
          }
        }
      }
    }
    r.add(law, true);
  };
  ternary("drim-p1", [&](Elem x, Elem y, Elem z) {
    return !alg.leq(alg.meet(x, y), z) || alg.leq(x, alg.imp(y, z));
  });
  ternary("drim-p2", [&](Elem x, Elem y, Elem z) {
    return !alg.leq(y, z) || alg.leq(alg.imp(x, y), alg.imp(x, z));
  });
  ternary("drim-p3", [&](Elem x, Elem y, Elem z) {
    return !alg.leq(y, z) || alg.leq(alg.imp(z, x), alg.imp(y, x));
  });
  ternary("drim-p4", [&](Elem x, Elem y, Elem z) {
    return alg.imp(alg.meet(x, y), z) == alg.imp(x, alg.imp(y, z));
  });
  auto fail = detail::first_failure(r, {"drim-p1", "drim-p2", "drim-p3", "drim-p4"});
  r.add("drim", fail.empty(), fail);
  return r;
}

// a => b is bottom exactly when a is not bottom and b is bottom.
inline Algebra::Table cobounded_implication(const Algebra& alg) {
  Algebra::Table t(alg.size() * alg.size());
  for (Elem a : alg.elements()) {
    for (Elem b : alg.elements()) {
      t[a.index * alg.size() + b.index] = (a != alg.bottom() && b == alg.bottom()) ? alg.bottom() : alg.top();
    }
  }
  return t;
}

inline std::vector<Elem> designated_star(const Algebra& alg, const DesignatedSet& d) {
  std::vector<Elem> s(alg.size());
  for (Elem a : alg.elements()) {
    if (a == alg.top()) {
      s[a.index] = alg.bottom();
    } else if (d.contains(a)) {
      s[a.index] = a;
    } else {
      s[a.index] = alg.top();
    }
  }
  return s;
}

// Fixes every element other than the bounds, which are swapped.
inline std::vector<Elem> t_algebra_star(const Algebra& alg) {
  std::vector<Elem> s(alg.size());
  for (Elem a : alg.elements()) {
    if (a == alg.top()) {
      s[a.index] = alg.bottom();
    } else if (a == alg.bottom()) {
      s[a.index] = alg.top();
    } else {
      s[a.index] = a;
    }
  }
  return s;
}

inline std::vector<Elem> atoms(const Algebra& alg) {
  std::vector<Elem> out;
  for (Elem a : alg.elements()) {
    if (a == alg.bottom()) continue;
    bool minimal = true;
    for (Elem x : alg.elements()) {
      if (x != alg.bottom() && x != a && alg.leq(x, a)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(a);
  }
  return out;
}

inline std::vector<Elem> coatoms(const Algebra& alg) {
  std::vector<Elem> out;
  for (Elem a : alg.elements()) {
    if (a == alg.top()) continue;
    bool maximal = true;
    for (Elem x : alg.elements()) {
      if (x != alg.top() && x != a && alg.leq(a, x)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(a);
  }
  return out;
}

namespace detail {

// Smallest subset S with big_join(S) == top although top is not in S.
inline std::optional<std::uint64_t> join_reaches_top(const Algebra& alg) {
  const std::size_t n = alg.size();
  const std::uint64_t top_bit = bit(alg.top());
  for (unsigned k = 0; k <= n; ++k) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      if (static_cast<unsigned>(std::popcount(m)) != k || (m & top_bit)) continue;
      if (alg.big_join_mask(m) == alg.top()) return m;
    }
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> meet_reaches_bottom(const Algebra& alg) {
  const std::size_t n = alg.size();
  const std::uint64_t bottom_bit = bit(alg.bottom());
  for (unsigned k = 0; k <= n; ++k) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      if (static_cast<unsigned>(std::popcount(m)) != k || (m & bottom_bit)) continue;
      if (alg.big_meet_mask(m) == alg.bottom()) return m;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline AlgebraReport check_cobounded(const Algebra& alg) {
  AlgebraReport r = check_lattice(alg);
  const std::uint64_t all = detail::full_mask(alg);
  const std::uint64_t no_top = all & ~detail::bit(alg.top());
  const std::uint64_t no_bottom = all & ~detail::bit(alg.bottom());

  const bool join_closed = alg.big_join_mask(no_top) != alg.top();
  r.add("cobounded-join-closed-form", join_closed,
        join_closed ? std::vector<Elem>{} : detail::mask_elements(alg, no_top));
  const bool meet_closed = alg.big_meet_mask(no_bottom) != alg.bottom();
  r.add("cobounded-meet-closed-form", meet_closed,
        meet_closed ? std::vector<Elem>{} : detail::mask_elements(alg, no_bottom));

  bool join_ok = join_closed;
  bool meet_ok = meet_closed;
  std::vector<Elem> join_witness = join_closed ? std::vector<Elem>{} : detail::mask_elements(alg, no_top);
  std::vector<Elem> meet_witness = meet_closed ? std::vector<Elem>{} : detail::mask_elements(alg, no_bottom);
  if (alg.size() <= subset_search_cap) {
    auto j = detail::join_reaches_top(alg);
    join_witness = j ? detail::mask_elements(alg, *j) : std::vector<Elem>{};
    join_ok = !j;
    // The empty subset joins to bottom; in a one-element carrier that is top.
    if (j && join_witness.empty()) join_witness = {alg.top()};
    r.add("cobounded-join-subset", join_ok, join_witness);
    auto m = detail::meet_reaches_bottom(alg);
    meet_witness = m ? detail::mask_elements(alg, *m) : std::vector<Elem>{};
    meet_ok = !m;
    if (m && meet_witness.empty()) meet_witness = {alg.bottom()};
    r.add("cobounded-meet-subset", meet_ok, meet_witness);
  }

  if (alg.has_imp()) {
    const auto expected = cobounded_implication(alg);
    std::vector<Elem> bad;
    for (Elem a : alg.elements()) {
      for (Elem b : alg.elements()) {
        if (bad.empty() && alg.imp(a, b) != expected[a.index * alg.size() + b.index]) bad = {a, b};
      }
    }
    r.add("cobounded-implication", bad.empty(), bad);
  } else {
    r.add("cobounded-implication", false, {alg.top(), alg.bottom()});
  }

  const auto at = atoms(alg);
  const auto co = coatoms(alg);
  r.add("unique-atom", at.size() == 1, at.size() == 1 ? std::vector<Elem>{} : (at.empty() ? std::vector<Elem>{alg.bottom()} : at));
  r.add("unique-coatom", co.size() == 1, co.size() == 1 ? std::vector<Elem>{} : (co.empty() ? std::vector<Elem>{alg.top()} : co));
  if (join_ok && co.size() == 1) r.coatom = co.front();
  if (meet_ok && at.size() == 1) r.atom = at.front();

  std::vector<Elem> fail = detail::first_failure(r, {"distributive", "bounded"});
  if (fail.empty() && !join_ok) fail = join_witness;
  if (fail.empty() && !meet_ok) fail = meet_witness;
  if (fail.empty()) fail = detail::first_failure(r, {"cobounded-implication"});
  r.add("cobounded", fail.empty(), fail);
  return r;
}

inline bool is_filter_mask(const Algebra& alg, std::uint64_t m) {
  auto in = [&](Elem e) { return (m >> e.index & 1U) != 0; };
  if (!in(alg.top()) || in(alg.bottom())) return false;
  for (Elem a : alg.elements()) {
    if (!in(a)) continue;
    for (Elem b : alg.elements()) {
      if (alg.leq(a, b) && !in(b)) return false;
      if (in(b) && !in(alg.meet(a, b))) return false;
    }
  }
  return true;
}

inline AlgebraReport check_boolean(const Algebra& alg) {
  AlgebraReport r;
  auto lat = check_lattice(alg);
  std::vector<Elem> fail = detail::first_failure(lat, {"distributive", "bounded"});
  if (fail.empty() && (!alg.has_star() || !alg.has_imp())) fail = {alg.top()};
  if (fail.empty()) {
    for (Elem a : alg.elements()) {
      if (alg.meet(a, alg.star(a)) != alg.bottom() || alg.join(a, alg.star(a)) != alg.top()) {
        fail = {a};
        break;
      }
      for (Elem b : alg.elements()) {
        if (alg.imp(a, b) != alg.join(alg.star(a), b)) {
          fail = {a, b};
          break;
        }
      }
      if (!fail.empty()) break;
    }
  }
  r.add("boolean", fail.empty(), fail);
  return r;
}

inline AlgebraReport check_filter(const Algebra& alg, const DesignatedSet& d) {
  AlgebraReport r;
  auto in = [&](Elem e) { return d.contains(e); };
  for (Elem e : d.members()) {
    if (e.index >= alg.size()) throw InputError("designated set mentions an element outside the carrier");
  }
  r.add("filter-contains-top", in(alg.top()), in(alg.top()) ? std::vector<Elem>{} : std::vector<Elem>{alg.top()});
  r.add("filter-excludes-bottom", !in(alg.bottom()),
        in(alg.bottom()) ? std::vector<Elem>{alg.bottom()} : std::vector<Elem>{});
  std::vector<Elem> up, closed;
  for (Elem a : alg.elements()) {
    if (!in(a)) continue;
    for (Elem b : alg.elements()) {
      if (up.empty() && alg.leq(a, b) && !in(b)) up = {a, b};
      if (closed.empty() && in(b) && !in(alg.meet(a, b))) closed = {a, b};
    }
  }
  r.add("filter-upward-closed", up.empty(), up);
  r.add("filter-meet-closed", closed.empty(), closed);
  auto filter_fail = detail::first_failure(
      r, {"filter-contains-top", "filter-excludes-bottom", "filter-upward-closed", "filter-meet-closed"});
  r.add("filter", filter_fail.empty(), filter_fail);

  std::vector<Elem> ultra_fail = filter_fail;
  if (ultra_fail.empty()) {
    if (alg.size() <= subset_search_cap) {
      const std::uint64_t rest = detail::full_mask(alg) & ~d.mask();
      // Enumerate the proper supersets of D that are themselves filters.
      for (std::uint64_t sub = rest; sub != 0; sub = (sub - 1) & rest) {
        if (is_filter_mask(alg, d.mask() | sub)) {
          ultra_fail = detail::mask_elements(alg, sub);
          break;
        }
      }
    } else {
      for (Elem a : alg.elements()) {
        if (in(a) || a == alg.bottom()) continue;
        bool proper = true;
        for (Elem x : d.members()) {
          if (alg.meet(x, a) == alg.bottom()) {
            proper = false;
            break;
          }
        }
        if (proper) {
          ultra_fail = {a};
          break;
        }
      }
    }
  }
  r.add("ultrafilter", ultra_fail.empty(), ultra_fail);

  if (alg.has_star()) {
    const auto expected = designated_star(alg, d);
    std::vector<Elem> bad;
    for (Elem a : alg.elements()) {
      if (alg.star(a) != expected[a.index]) {
        bad = {a};
        break;
      }
    }
    r.add("designated-star", bad.empty(), bad);
  } else {
    r.add("designated-star", false, {alg.top()});
  }

  auto cob = check_cobounded(alg);
  std::vector<Elem> dc_fail = detail::first_failure(cob, {"cobounded"});
  if (dc_fail.empty()) dc_fail = detail::first_failure(r, {"filter", "designated-star"});
  r.add("designated-cobounded", dc_fail.empty(), dc_fail);
  std::vector<Elem> udc_fail = dc_fail.empty() ? ultra_fail : dc_fail;
  r.add("ultra-designated-cobounded", udc_fail.empty(), udc_fail);
  if (udc_fail.empty()) {
    std::vector<Elem> outside;
    for (Elem a : alg.elements()) {
      if (!in(a) && a != alg.bottom()) outside.push_back(a);
    }
    r.add("complement-is-bottom", outside.empty(), outside);
  }
  return r;
}

inline AlgebraReport full_report(const Algebra& alg, const DesignatedSet& d) {
  AlgebraReport r = check_cobounded(alg);
  if (alg.has_imp()) r.merge(check_drim(alg));
  r.merge(check_boolean(alg));
  r.merge(check_filter(alg, d));
  return r;
}

// Summary flags used to decide which theorem checks apply.
struct AlgebraProfile {
  bool lattice = false;
  bool cobounded = false;
  bool designated_cobounded = false;
  bool ultra_designated_cobounded = false;
  bool boolean = false;
  std::optional<Elem> coatom;
};

inline AlgebraProfile profile(const Algebra& alg, const DesignatedSet& d) {
  AlgebraProfile p;
  auto cob = check_cobounded(alg);
  auto fil = check_filter(alg, d);
  p.lattice = cob.holds("lattice");
  p.cobounded = cob.holds("cobounded");
  p.designated_cobounded = fil.holds("designated-cobounded");
  p.ultra_designated_cobounded = fil.holds("ultra-designated-cobounded");
  p.boolean = check_boolean(alg).holds("boolean");
  p.coatom = cob.coatom;
  return p;
}

// ---------------------------------------------------------------------------
// Constructors

inline DesignatedAlgebra ps3() {
  // Index order: zero, half, one.
  const Elem z{0}, h{1}, o{2};
  Algebra::Table meet = {z, z, z, z, h, h, z, h, o};
  Algebra::Table join = {z, h, o, h, h, o, o, o, o};
  Algebra::Table imp = {o, o, o, z, o, o, z, o, o};
  std::vector<Elem> star = {o, h, z};
  Algebra alg("ps3", {"zero", "half", "one"}, meet, join, imp, star, o, z);
  return DesignatedAlgebra{std::move(alg), DesignatedSet::of({h, o}), true};
}

inline const Algebra& ps3_algebra() {
  static const Algebra instance = ps3().algebra;
  return instance;
}

namespace ps3v {
inline constexpr Elem zero{0};
inline constexpr Elem half{1};
inline constexpr Elem one{2};
}  // namespace ps3v

// Powerset of `atoms` points. Elements are named by their atom letters.
inline DesignatedAlgebra boolean_algebra(unsigned atom_count) {
  if (atom_count > 6) throw InputError("boolean algebras are limited to 6 atoms");
  const std::size_t n = std::size_t{1} << atom_count;
  const std::uint64_t full = n - 1;
  std::vector<std::string> names(n);
  for (std::size_t m = 0; m < n; ++m) {
    if (m == 0) {
      names[m] = "zero";
    } else if (m == full) {
      names[m] = "one";
    } else {
      for (unsigned i = 0; i < atom_count; ++i) {
        if (m >> i & 1U) names[m] += static_cast<char>('a' + i);
      }
    }
  }
  Algebra::Table meet(n * n), join(n * n), imp(n * n);
  std::vector<Elem> star(n);
  auto e = [](std::uint64_t m) { return Elem{static_cast<std::uint8_t>(m)}; };
  for (std::uint64_t a = 0; a < n; ++a) {
    star[a] = e(full & ~a);
    for (std::uint64_t b = 0; b < n; ++b) {
      meet[a * n + b] = e(a & b);
      join[a * n + b] = e(a | b);
      imp[a * n + b] = e((full & ~a) | b);
    }
  }
  Algebra alg("bool" + std::to_string(n), std::move(names), meet, join, imp, star, e(full), e(0));
  return DesignatedAlgebra{std::move(alg), DesignatedSet::of({e(full)}), false};
}

enum class StarVariant { designated, t_algebra };

inline std::string chain_element_name(std::size_t i, std::size_t k) {
  if (i == 0) return "zero";
  if (i + 1 == k) return "one";
  std::string s;
  std::size_t v = i - 1;
  do {
    s.insert(s.begin(), static_cast<char>('a' + v % 26));
    v = v / 26;
  } while (v-- > 0);
  return s;
}

// k-element chain with the cobounded implication. The default designated
// set is every element except bottom.
inline DesignatedAlgebra chain_algebra(std::size_t k, std::optional<DesignatedSet> designated = std::nullopt,
                                       StarVariant variant = StarVariant::designated) {
  if (k < 2 || k > max_carrier) throw InputError("chain length must be between 2 and 64");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back(chain_element_name(i, k));
  Algebra::Table meet(k * k), join(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      meet[a * k + b] = Elem{static_cast<std::uint8_t>(std::min(a, b))};
      join[a * k + b] = Elem{static_cast<std::uint8_t>(std::max(a, b))};
    }
  }
  const Elem top{static_cast<std::uint8_t>(k - 1)};
  const Elem bottom{0};
  Algebra lattice("chain" + std::to_string(k), std::move(names), meet, join, std::nullopt, std::nullopt, top, bottom);
  DesignatedSet d = designated ? *designated : DesignatedSet(detail::full_mask(lattice) & ~std::uint64_t{1});
  auto fil = check_filter(lattice, d);
  if (!fil.holds("filter")) throw InputError("designated set is not a filter of " + lattice.name());
  auto imp = cobounded_implication(lattice);
  auto star = variant == StarVariant::designated ? designated_star(lattice, d) : t_algebra_star(lattice);
  Algebra alg = lattice.with_operations(lattice.name(), std::move(imp), std::move(star));
  return DesignatedAlgebra{std::move(alg), d, variant == StarVariant::designated};
}

// Install the cobounded implication and the designated star on a lattice.
inline DesignatedAlgebra designated_cobounded(const Algebra& lattice, const DesignatedSet& d,
                                              std::string name = {}) {
  auto fil = check_filter(lattice, d);
  if (!fil.holds("filter")) {
    throw InputError("designated set " + format_designated(lattice, d) + " is not a filter of " + lattice.name());
  }
  Algebra alg = lattice.with_operations(name.empty() ? lattice.name() : std::move(name),
                                        cobounded_implication(lattice), designated_star(lattice, d));
  return DesignatedAlgebra{std::move(alg), d, true};
}

// Adjoin a fresh top above and a fresh bottom below a bounded lattice.
inline DesignatedAlgebra stretch(const Algebra& base, std::optional<DesignatedSet> designated = std::nullopt) {
  auto lat = check_lattice(base);
  if (!lat.holds("lattice") || !lat.holds("bounded")) {
    throw InputError("stretch needs a bounded lattice, " + base.name() + " is not one");
  }
  const std::size_t m = base.size();
  const std::size_t n = m + 2;
  if (n > max_carrier) throw InputError("stretched carrier exceeds 64 elements");
  std::vector<std::string> names;
  names.push_back("zero");
  for (const auto& s : base.element_names()) names.push_back(s + "'");
  names.push_back("one");
  const Elem bottom{0};
  const Elem top{static_cast<std::uint8_t>(n - 1)};
  auto lift = [](Elem a) { return Elem{static_cast<std::uint8_t>(a.index + 1)}; };
  Algebra::Table meet(n * n), join(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      Elem ea{static_cast<std::uint8_t>(a)}, eb{static_cast<std::uint8_t>(b)};
      Elem mt, jn;
      if (ea == bottom || eb == bottom) {
        mt = bottom;
      } else if (ea == top) {
        mt = eb;
      } else if (eb == top) {
        mt = ea;
      } else {
        mt = lift(base.meet(Elem{static_cast<std::uint8_t>(a - 1)}, Elem{static_cast<std::uint8_t>(b - 1)}));
      }
      if (ea == top || eb == top) {
        jn = top;
      } else if (ea == bottom) {
        jn = eb;
      } else if (eb == bottom) {
        jn = ea;
      } else {
        jn = lift(base.join(Elem{static_cast<std::uint8_t>(a - 1)}, Elem{static_cast<std::uint8_t>(b - 1)}));
      }
      meet[a * n + b] = mt;
      join[a * n + b] = jn;
    }
  }
  Algebra lattice("stretch-" + base.name(), std::move(names), meet, join, std::nullopt, std::nullopt, top, bottom);
  DesignatedSet d = designated ? *designated : DesignatedSet(detail::full_mask(lattice) & ~std::uint64_t{1});
  return designated_cobounded(lattice, d);
}

// Replace the designated set, re-deriving the star where it depends on it.
inline DesignatedAlgebra with_designated(const DesignatedAlgebra& base, const DesignatedSet& d) {
  if (base.star_follows_designated) return designated_cobounded(base.algebra, d, base.algebra.name());
  auto fil = check_filter(base.algebra, d);
  if (!fil.holds("filter")) {
    throw InputError("designated set " + format_designated(base.algebra, d) + " is not a filter of " +
                     base.algebra.name());
  }
  return DesignatedAlgebra{base.algebra, d, false};
}

// ---------------------------------------------------------------------------
// Collapse onto the three-element algebra

class Collapse {
 public:
  explicit Collapse(const Algebra& alg) : alg_(&alg) {
    const std::uint64_t all = detail::full_mask(alg);
    const bool lattice = check_lattice(alg).holds("distributive");
    if (!lattice || alg.size() < 2 || alg.big_join_mask(all & ~detail::bit(alg.top())) == alg.top() ||
        alg.big_meet_mask(all & ~detail::bit(alg.bottom())) == alg.bottom()) {
      throw CapabilityError("collapse map needs a cobounded algebra, " + alg.name() + " is not one");
    }
    for (Elem a : alg.elements()) {
      if (a != alg.top() && a != alg.bottom()) {
        intermediate_ = a;
        break;
      }
    }
    if (auto co = coatoms(alg); co.size() == 1 && co.front() != alg.bottom()) intermediate_ = co.front();
  }

  Elem operator()(Elem a) const {
    alg_->require(a);
    if (a == alg_->top()) return ps3v::one;
    if (a == alg_->bottom()) return ps3v::zero;
    return ps3v::half;
  }

  // Right inverse: one -> top, half -> a fixed intermediate, zero -> bottom.
  Elem section(Elem v) const {
    if (v == ps3v::one) return alg_->top();
    if (v == ps3v::zero) return alg_->bottom();
    if (!intermediate_) throw CapabilityError(alg_->name() + " has no intermediate element");
    return *intermediate_;
  }

  const Algebra& algebra() const noexcept { return *alg_; }

 private:
  const Algebra* alg_;
  std::optional<Elem> intermediate_;
};

inline Elem collapse_f(const Algebra& alg, Elem a) { return Collapse(alg)(a); }

}  // namespace avm
