#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "avm/battery.hpp"
#include "avm/check_result.hpp"
#include "avm/theorems.hpp"
#include "avm/valuation.hpp"

namespace avm {

struct ClassId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(ClassId, ClassId) = default;
};

// Domain names modulo PA equality. Each class is represented by its lowest
// name id; the four relations are read off the representatives.
class QuotientModel {
 public:
  QuotientModel(EvalContext ctx, std::vector<std::vector<NameId>> classes)
      : ctx_(std::move(ctx)), classes_(std::move(classes)) {
    const std::size_t k = classes_.size();
    for (std::uint32_t c = 0; c < k; ++c) {
      for (NameId id : classes_[c]) class_of_.emplace(id.value, ClassId{c});
    }
    eq_.resize(k * k);
    neq_.resize(k * k);
    mem_.resize(k * k);
    nmem_.resize(k * k);
    const Algebra& A = ctx_.algebra();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const Elem e = ctx_.equal(rep(i), rep(j));
        const Elem m = ctx_.member(rep(i), rep(j));
        eq_[i * k + j] = ctx_.designated_value(e);
        neq_[i * k + j] = ctx_.designated_value(A.star(e));
        mem_[i * k + j] = ctx_.designated_value(m);
        nmem_[i * k + j] = ctx_.designated_value(A.star(m));
      }
    }
  }

  const EvalContext& context() const noexcept { return ctx_; }
  std::size_t class_count() const noexcept { return classes_.size(); }
  const std::vector<NameId>& members(ClassId c) const { return classes_.at(c.value); }
  NameId representative(ClassId c) const { return classes_.at(c.value).front(); }

  ClassId class_of(NameId id) const {
    auto it = class_of_.find(id.value);
    if (it == class_of_.end()) throw InputError("name #" + std::to_string(id.value) + " is outside the quotient");
    return it->second;
  }

  bool eq(ClassId a, ClassId b) const { return eq_[idx(a, b)]; }
  bool neq(ClassId a, ClassId b) const { return neq_[idx(a, b)]; }
  bool mem(ClassId a, ClassId b) const { return mem_[idx(a, b)]; }
  bool nmem(ClassId a, ClassId b) const { return nmem_[idx(a, b)]; }

  // Arguments bind the free variables in order of first occurrence.
  bool satisfies(const Formula& f, const std::vector<ClassId>& args) const {
    const auto vars = free_variables(f);
    if (vars.size() != args.size()) {
      throw InputError("arity mismatch: formula has " + std::to_string(vars.size()) + " free variable(s), got " +
                       std::to_string(args.size()) + " argument(s)");
    }
    Env env;
    for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = representative(args[i]);
    return ctx_.is_valid(f, env);
  }

  bool satisfies(const Formula& f, const std::vector<std::pair<std::string, ClassId>>& binding) const {
    Env env;
    for (const auto& [v, c] : binding) env[v] = representative(c);
    for (const auto& v : free_variables(f)) {
      if (!env.count(v)) throw InputError("arity mismatch: free variable '" + v + "' is not bound");
    }
    return ctx_.is_valid(f, env);
  }

  std::string export_text() const {
    std::ostringstream out;
    const std::size_t k = classes_.size();
    out << "# classes " << k << "\n";
    for (std::size_t c = 0; c < k; ++c) {
      out << "class [" << c << "]";
      for (NameId id : classes_[c]) out << " #" << id.value;
      out << "\n";
    }
    auto edges = [&](const char* tag, const std::vector<char>& rel) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (rel[i * k + j]) out << tag << " [" << i << "] [" << j << "]\n";
        }
      }
    };
    edges("eq", eq_);
    edges("neq", neq_);
    edges("mem", mem_);
    edges("nmem", nmem_);
    return out.str();
  }

 private:
  NameId rep(std::size_t c) const { return classes_[c].front(); }
  std::size_t idx(ClassId a, ClassId b) const {
    if (a.value >= classes_.size() || b.value >= classes_.size()) throw InputError("class index out of range");
    return a.value * classes_.size() + b.value;
  }

  EvalContext ctx_;
  std::vector<std::vector<NameId>> classes_;
  std::unordered_map<std::uint32_t, ClassId> class_of_;
  std::vector<char> eq_, neq_, mem_, nmem_;
};

inline QuotientModel build_quotient(const EvalContext& base, std::uint64_t seed = 1) {
  const EvalContext ctx = base.with_assignment(Assignment::pa);
  const Algebra& A = ctx.algebra();
  std::vector<NameId> dom = ctx.domain();
  std::sort(dom.begin(), dom.end());
  const std::size_t n = dom.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Elem e = ctx.equal(dom[i], dom[j]);
      if (e != A.top() && e != A.bottom()) {
        throw InvariantError("PA equality of #" + std::to_string(dom[i].value) + " and #" +
                             std::to_string(dom[j].value) + " is " + A.name_of(e) + ", not two-valued");
      }
      if (e == A.top()) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<NameId>> classes;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = classes.size();
      classes.emplace_back();
    }
    classes[slot[root]].push_back(dom[i]);
  }
  QuotientModel qm(ctx, classes);

  // Relations must not depend on the chosen representatives.
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<NameId>& c) {
    std::vector<NameId> out{c.front()};
    if (c.size() <= 4) return c;
    for (int i = 0; i < 3; ++i) out.push_back(c[1 + rng() % (c.size() - 1)]);
    return out;
  };
  for (std::uint32_t i = 0; i < qm.class_count(); ++i) {
    const auto ai = pick(classes[i]);
    for (std::uint32_t j = 0; j < qm.class_count(); ++j) {
      const auto bj = pick(classes[j]);
      for (NameId a : ai) {
        for (NameId b : bj) {
          const Elem m = ctx.member(a, b);
          const Elem e = ctx.equal(a, b);
          const bool same = ctx.designated_value(m) == qm.mem(ClassId{i}, ClassId{j}) &&
                            ctx.designated_value(A.star(m)) == qm.nmem(ClassId{i}, ClassId{j}) &&
                            ctx.designated_value(e) == qm.eq(ClassId{i}, ClassId{j}) &&
                            ctx.designated_value(A.star(e)) == qm.neq(ClassId{i}, ClassId{j});
          if (!same) {
            throw InvariantError("quotient relations depend on the representative: #" + std::to_string(a.value) +
                                 ", #" + std::to_string(b.value));
          }
        }
      }
    }
  }
  return qm;
}

inline std::string format_class(const QuotientModel& q, ClassId c) {
  return "[" + q.context().universe().describe(q.representative(c)) + "]";
}

inline CheckResult check_quotient_relations(const QuotientModel& q) {
  CheckResult r;
  r.check = "quotient-relations";
  r.subject = detail::subject_of(q.context());
  const std::size_t k = q.class_count();
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) {
      const ClassId a{i}, b{j};
      if (q.eq(a, b) != (i == j)) {
        r.fail("equality relation is not the identity on classes",
               {{"class_a", format_class(q, a)}, {"class_b", format_class(q, b)}});
        return r;
      }
      if (q.neq(a, b) == q.eq(a, b)) {
        r.fail("inequality relation is not the complement of equality",
               {{"class_a", format_class(q, a)}, {"class_b", format_class(q, b)}});
        return r;
      }
      if (!q.mem(a, b) && !q.nmem(a, b)) {
        r.fail("membership and non-membership leave a pair uncovered",
               {{"class_a", format_class(q, a)}, {"class_b", format_class(q, b)}});
        return r;
      }
    }
  }
  const EvalContext& ctx = q.context();
  const Algebra& A = ctx.algebra();
  if (ctx.designated().size() >= 2) {
    std::optional<Elem> a;
    for (Elem e : ctx.designated().members()) {
      if (e != A.top()) a = e;
    }
    const auto v = ctx.universe().find({Entry{ctx.universe().empty_name(), *a}});
    if (!v) {
      r.fail("the overlap witness name is missing from the domain", {{"witness", "{#0: " + A.name_of(*a) + "}"}});
      return r;
    }
    const ClassId ce = q.class_of(ctx.universe().empty_name());
    const ClassId cv = q.class_of(*v);
    if (!(q.mem(ce, cv) && q.nmem(ce, cv))) {
      r.fail("membership and non-membership do not overlap on the witness",
             {{"class_a", format_class(q, ce)}, {"class_b", format_class(q, cv)}});
      return r;
    }
    r.evidence = {{"overlap", format_class(q, ce) + " mem and nmem " + format_class(q, cv)}};
  }
  r.summary = std::to_string(k) + " classes; neq complements eq, mem and nmem cover every pair";
  return r;
}

// Satisfaction in the quotient commutes with the connectives, except that
// negation only goes one way.
inline CheckResult check_connective_theorem(const QuotientModel& q, const SuiteOptions& opt = {}) {
  CheckResult r;
  r.check = "quotient-connectives";
  r.subject = detail::subject_of(q.context());
  const std::size_t k = q.class_count();
  std::vector<NameId> reps;
  for (std::uint32_t c = 0; c < k; ++c) reps.push_back(q.representative(ClassId{c}));
  const auto params = name_sample(reps, std::min<std::size_t>(opt.sample_size, 3), opt.seed);
  const auto unary = instantiate_battery(unary_battery_templates(), params);
  const auto binary = instantiate_battery(binary_battery_templates(), params);

  std::vector<std::vector<char>> sat(unary.size(), std::vector<char>(k));
  for (std::size_t f = 0; f < unary.size(); ++f) {
    for (std::uint32_t c = 0; c < k; ++c) sat[f][c] = q.satisfies(unary[f].formula, {{"x", ClassId{c}}});
  }
  auto fail = [&](const char* clause, const std::string& phi, const std::string& psi, ClassId c) {
    r.fail(std::string("clause (") + clause + ") fails", {{"clause", clause}, {"phi", phi}, {"psi", psi}, {"class", format_class(q, c)}});
  };
  std::size_t checks = 0;
  for (std::size_t f = 0; f < unary.size(); ++f) {
    for (std::size_t g = 0; g < unary.size(); ++g) {
      const Formula& phi = unary[f].formula;
      const Formula& psi = unary[g].formula;
      for (std::uint32_t c = 0; c < k; ++c) {
        const ClassId cc{c};
        const bool a = sat[f][c], b = sat[g][c];
        checks += 3;
        if (q.satisfies(Formula::imp(phi, psi), {{"x", cc}}) != (!a || b)) {
          fail("i", unary[f].label, unary[g].label, cc);
          return r;
        }
        if (q.satisfies(Formula::conj(phi, psi), {{"x", cc}}) != (a && b)) {
          fail("ii", unary[f].label, unary[g].label, cc);
          return r;
        }
        if (q.satisfies(Formula::disj(phi, psi), {{"x", cc}}) != (a || b)) {
          fail("iii", unary[f].label, unary[g].label, cc);
          return r;
        }
      }
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      ++checks;
      if (!sat[f][c] && !q.satisfies(Formula::neg(unary[f].formula), {{"x", ClassId{c}}})) {
        fail("iv", unary[f].label, "", ClassId{c});
        return r;
      }
    }
  }
  for (const auto& inst : binary) {
    for (std::uint32_t c = 0; c < k; ++c) {
      const ClassId cc{c};
      bool all = true, any = false;
      for (std::uint32_t d = 0; d < k; ++d) {
        const bool s = q.satisfies(inst.formula, {{"x", cc}, {"y", ClassId{d}}});
        all = all && s;
        any = any || s;
      }
      checks += 2;
      if (q.satisfies(Formula::forall("y", inst.formula), {{"x", cc}}) != all) {
        fail("v", inst.label, "", cc);
        return r;
      }
      if (q.satisfies(Formula::exists("y", inst.formula), {{"x", cc}}) != any) {
        fail("vi", inst.label, "", cc);
        return r;
      }
    }
  }

  // The converse of (iv) fails: a pair can satisfy both x in y and ~(x in y).
  const Formula m = parse_formula("x in y");
  for (std::uint32_t i = 0; i < k && r.evidence.empty(); ++i) {
    for (std::uint32_t j = 0; j < k && r.evidence.empty(); ++j) {
      if (q.satisfies(m, {ClassId{i}, ClassId{j}}) && q.satisfies(Formula::neg(m), {ClassId{i}, ClassId{j}})) {
        r.evidence = {{"converse-iv-formula", "x in y"},
                      {"x", format_class(q, ClassId{i})},
                      {"y", format_class(q, ClassId{j})}};
      }
    }
  }
  r.notes.push_back(detail::bounded_note(q.context()));
  r.summary = std::to_string(checks) + " clause instances hold over " + std::to_string(k) + " classes";
  return r;
}

}  // namespace avm
