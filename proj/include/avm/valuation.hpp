#pragma once

#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/error.hpp"
#include "avm/formula.hpp"
#include "avm/universe.hpp"

namespace avm {

enum class Assignment : std::uint8_t { ba = 0, pa = 1 };
enum class Relation : std::uint8_t { eq = 0, mem = 1 };

inline const char* assignment_name(Assignment a) { return a == Assignment::ba ? "ba" : "pa"; }

// Grow-only memo of atomic values keyed by (assignment, relation, u, v).
// Ids below the dense bound live in flat atomic tables allocated on first
// use; larger ids go to sharded hash maps. Writers race benignly: every
// writer for a key stores the same value.
class AtomicMemo {
 public:
  explicit AtomicMemo(std::size_t dense_names) : dense_(dense_names <= max_dense ? dense_names : 0) {}

  AtomicMemo(const AtomicMemo&) = delete;
  AtomicMemo& operator=(const AtomicMemo&) = delete;

  std::optional<Elem> get(Assignment a, Relation r, NameId u, NameId v) const {
    if (u.value < dense_ && v.value < dense_) {
      const auto* t = table(a, r);
      if (!t) return std::nullopt;
      const std::uint8_t x = t[u.value * dense_ + v.value].load(std::memory_order_acquire);
      if (x == unknown) return std::nullopt;
      return Elem{x};
    }
    const std::uint64_t k = key(a, r, u, v);
    const Shard& s = shards_[k % shard_count];
    std::shared_lock lock(s.mutex);
    auto it = s.map.find(k);
    if (it == s.map.end()) return std::nullopt;
    return Elem{it->second};
  }

  void put(Assignment a, Relation r, NameId u, NameId v, Elem value) {
    if (u.value < dense_ && v.value < dense_) {
      ensure_table(a, r)[u.value * dense_ + v.value].store(value.index, std::memory_order_release);
      return;
    }
    const std::uint64_t k = key(a, r, u, v);
    Shard& s = shards_[k % shard_count];
    std::unique_lock lock(s.mutex);
    s.map.emplace(k, value.index);
  }

  std::size_t dense_bound() const noexcept { return dense_; }

 private:
  static constexpr std::uint8_t unknown = 0xFF;
  static constexpr std::size_t max_dense = 4096;
  static constexpr std::size_t shard_count = 16;

  struct Shard {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, std::uint8_t> map;
  };

  static std::uint64_t key(Assignment a, Relation r, NameId u, NameId v) {
    return (std::uint64_t{static_cast<std::uint8_t>(a)} << 63) | (std::uint64_t{static_cast<std::uint8_t>(r)} << 62) |
           (std::uint64_t{u.value} << 31) | std::uint64_t{v.value};
  }

  static std::size_t slot(Assignment a, Relation r) {
    return static_cast<std::size_t>(a) * 2 + static_cast<std::size_t>(r);
  }

  const std::atomic<std::uint8_t>* table(Assignment a, Relation r) const {
    return tables_[slot(a, r)].load(std::memory_order_acquire);
  }

  std::atomic<std::uint8_t>* ensure_table(Assignment a, Relation r) {
    const std::size_t i = slot(a, r);
    std::call_once(once_[i], [&] {
      const std::size_t n = dense_ * dense_;
      storage_[i] = std::make_unique<std::atomic<std::uint8_t>[]>(n);
      for (std::size_t k = 0; k < n; ++k) storage_[i][k].store(unknown, std::memory_order_relaxed);
      tables_[i].store(storage_[i].get(), std::memory_order_release);
    });
    return tables_[i].load(std::memory_order_acquire);
  }

  std::size_t dense_;
  std::array<std::unique_ptr<std::atomic<std::uint8_t>[]>, 4> storage_;
  std::array<std::atomic<std::atomic<std::uint8_t>*>, 4> tables_{};
  std::array<std::once_flag, 4> once_;
  std::array<Shard, shard_count> shards_;
};

struct BqResult {
  Elem lhs;
  Elem rhs;
  bool holds() const noexcept { return lhs == rhs; }
};

using Env = std::map<std::string, NameId>;

// Evaluation over a bounded universe. Quantifiers range over `domain`, which
// defaults to the names enumerated when the universe was built; names added
// later may still appear as constants.
class EvalContext {
 public:
  EvalContext(std::shared_ptr<Universe> universe, DesignatedSet designated, Assignment assignment,
              std::shared_ptr<AtomicMemo> memo = nullptr, std::optional<std::vector<NameId>> domain = std::nullopt)
      : universe_(std::move(universe)),
        designated_(designated),
        assignment_(assignment),
        memo_(memo ? std::move(memo) : std::make_shared<AtomicMemo>(universe_->size())),
        domain_(std::make_shared<const std::vector<NameId>>(domain ? std::move(*domain)
                                                                   : universe_->enumerated_ids())) {
    const Algebra& alg = universe_->algebra();
    for (Elem e : designated_.members()) alg.require(e);
    bottom_imp_top_ = alg.has_imp();
    if (alg.has_imp()) {
      for (Elem b : alg.elements()) {
        if (alg.imp(alg.bottom(), b) != alg.top()) bottom_imp_top_ = false;
      }
    }
  }

  const Algebra& algebra() const noexcept { return universe_->algebra(); }
  Universe& universe() const noexcept { return *universe_; }
  const std::shared_ptr<Universe>& universe_ptr() const noexcept { return universe_; }
  const std::shared_ptr<AtomicMemo>& memo() const noexcept { return memo_; }
  const DesignatedSet& designated() const noexcept { return designated_; }
  Assignment assignment() const noexcept { return assignment_; }
  const std::vector<NameId>& domain() const noexcept { return *domain_; }
  unsigned rank_bound() const noexcept { return universe_->rank_bound(); }

  bool designated_value(Elem a) const noexcept { return designated_.contains(a); }

  // Same universe, memo and domain; only the assignment differs.
  EvalContext with_assignment(Assignment a) const {
    EvalContext c = *this;
    c.assignment_ = a;
    return c;
  }

  EvalContext with_domain(std::vector<NameId> domain) const {
    EvalContext c = *this;
    c.domain_ = std::make_shared<const std::vector<NameId>>(std::move(domain));
    return c;
  }

  Elem eval_atomic(Relation r, NameId u, NameId v) const {
    universe_->name(u);
    universe_->name(v);
    if (assignment_ == Assignment::pa && !algebra().has_star()) {
      throw CapabilityError("the paraconsistent assignment needs a star on " + algebra().name());
    }
    if (!algebra().has_imp()) throw CapabilityError("evaluation needs an implication on " + algebra().name());
    return r == Relation::eq ? eq_impl(u, v) : mem_impl(u, v);
  }

  Elem equal(NameId u, NameId v) const { return eval_atomic(Relation::eq, u, v); }
  Elem member(NameId u, NameId v) const { return eval_atomic(Relation::mem, u, v); }

  Elem eval(const Formula& f, const Env& env = {}) const {
    Bindings b;
    for (const auto& [k, v] : env) {
      universe_->name(v);
      b.emplace_back(k, v);
    }
    return eval_rec(f, b);
  }

  bool is_valid(const Formula& f, const Env& env = {}) const { return designated_value(eval(f, env)); }

  // Bounded-quantifier identity for a formula with one free variable.
  BqResult check_bq(NameId u, const Formula& phi, const std::string& var) const {
    Formula bounded = Formula::forall(var, Formula::imp(Formula::member(Term::variable(var), Term::constant(u)), phi));
    const Elem lhs = eval(bounded);
    Elem rhs = algebra().top();
    for (const Entry& e : universe_->name(u).entries) {
      rhs = algebra().meet(rhs, algebra().imp(e.value, eval(phi, Env{{var, e.key}})));
    }
    return BqResult{lhs, rhs};
  }

 private:
  using Bindings = std::vector<std::pair<std::string, NameId>>;

  NameId resolve(const Term& t, const Bindings& b) const {
    if (!t.is_var) {
      universe_->name(t.name);
      return t.name;
    }
    for (auto it = b.rbegin(); it != b.rend(); ++it) {
      if (it->first == t.var) return it->second;
    }
    throw InputError("unbound variable '" + t.var + "'");
  }

  Elem eval_rec(const Formula& f, Bindings& b) const {
    const Algebra& A = algebra();
    const Node& n = f.node();
    switch (n.kind) {
      case Kind::eq: return eval_atomic(Relation::eq, resolve(n.lhs, b), resolve(n.rhs, b));
      case Kind::mem: return eval_atomic(Relation::mem, resolve(n.lhs, b), resolve(n.rhs, b));
      case Kind::top: return A.top();
      case Kind::bot: return A.bottom();
      case Kind::neg: return A.star(eval_rec(n.a, b));
      case Kind::conj: {
        const Elem l = eval_rec(n.a, b);
        if (l == A.bottom()) return l;
        return A.meet(l, eval_rec(n.b, b));
      }
      case Kind::disj: {
        const Elem l = eval_rec(n.a, b);
        if (l == A.top()) return l;
        return A.join(l, eval_rec(n.b, b));
      }
      case Kind::imp: {
        const Elem l = eval_rec(n.a, b);
        if (l == A.bottom() && bottom_imp_top_) return A.top();
        return A.imp(l, eval_rec(n.b, b));
      }
      case Kind::forall:
      case Kind::exists: {
        const bool universal = n.kind == Kind::forall;
        Elem acc = universal ? A.top() : A.bottom();
        const Elem absorbing = universal ? A.bottom() : A.top();
        b.emplace_back(n.var, NameId{});
        for (NameId d : *domain_) {
          b.back().second = d;
          const Elem v = eval_rec(n.a, b);
          acc = universal ? A.meet(acc, v) : A.join(acc, v);
          if (acc == absorbing) break;
        }
        b.pop_back();
        return acc;
      }
    }
    return A.bottom();
  }

  // Recursion descends in rank: each call on (u, v) only asks about pairs
  // whose rank sum is strictly smaller.
  Elem eq_impl(NameId u, NameId v) const {
    if (auto m = memo_->get(assignment_, Relation::eq, u, v)) return *m;
    const Algebra& A = algebra();
    const bool pa = assignment_ == Assignment::pa;
    Elem acc = A.top();
    auto side = [&](NameId from, NameId to) {
      for (const Entry& e : universe_->name(from).entries) {
        if (acc == A.bottom()) return;
        const Elem m = mem_impl(e.key, to);
        acc = A.meet(acc, A.imp(e.value, m));
        if (pa) acc = A.meet(acc, A.imp(A.star(m), A.star(e.value)));
      }
    };
    side(u, v);
    side(v, u);
    memo_->put(assignment_, Relation::eq, u, v, acc);
    return acc;
  }

  Elem mem_impl(NameId u, NameId v) const {
    if (auto m = memo_->get(assignment_, Relation::mem, u, v)) return *m;
    const Algebra& A = algebra();
    Elem acc = A.bottom();
    for (const Entry& e : universe_->name(v).entries) {
      if (acc == A.top()) break;
      if (e.value == A.bottom()) continue;
      acc = A.join(acc, A.meet(e.value, eq_impl(e.key, u)));
    }
    memo_->put(assignment_, Relation::mem, u, v, acc);
    return acc;
  }

  std::shared_ptr<Universe> universe_;
  DesignatedSet designated_;
  Assignment assignment_;
  std::shared_ptr<AtomicMemo> memo_;
  std::shared_ptr<const std::vector<NameId>> domain_;
  bool bottom_imp_top_ = false;
};

}  // namespace avm
