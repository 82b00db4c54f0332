#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/battery.hpp"
#include "avm/check_result.hpp"
#include "avm/formula.hpp"
#include "avm/universe.hpp"
#include "avm/valuation.hpp"

namespace avm {

struct SuiteOptions {
  std::size_t sample_size = 6;
  std::size_t powerset_domain_cap = 3;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string subject_of(const EvalContext& ctx) {
  return ctx.algebra().name() + " D=" + format_designated(ctx.algebra(), ctx.designated()) + ", bounded at rank " +
         std::to_string(ctx.rank_bound()) + " (" + std::to_string(ctx.domain().size()) + " names)";
}

inline std::string bounded_note(const EvalContext& ctx) {
  return "quantifiers bounded at rank " + std::to_string(ctx.rank_bound());
}

inline const std::string& vname(const EvalContext& ctx, Elem e) { return ctx.algebra().name_of(e); }

inline std::string nm(const EvalContext& ctx, NameId id) { return ctx.universe().describe(id); }

inline std::optional<CheckResult> require_profile(const std::string& check, const EvalContext& ctx, bool need_ultra,
                                                  AlgebraProfile& out) {
  out = profile(ctx.algebra(), ctx.designated());
  const bool ok = need_ultra ? out.ultra_designated_cobounded : out.designated_cobounded;
  if (!ok) {
    return CheckResult::skipped(check, subject_of(ctx),
                                need_ultra ? "needs an ultra-designated cobounded algebra"
                                           : "needs a designated cobounded algebra");
  }
  return std::nullopt;
}

inline CheckResult start(const std::string& check, const EvalContext& ctx) {
  CheckResult r;
  r.check = check;
  r.subject = subject_of(ctx);
  return r;
}

// Formula text with parameters replaced by name constants.
inline Formula with_constants(const std::string& text, std::initializer_list<std::pair<const char*, NameId>> subs) {
  Formula f = parse_formula(text);
  for (const auto& [v, id] : subs) f = substitute(f, v, id);
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------

// PA equality is two-valued and matches its combinatorial description in
// terms of designated and top-valued entries.
inline CheckResult check_equality_characterization(const EvalContext& base, const SuiteOptions& = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("equality-characterization", base, true, prof)) return *s;
  CheckResult r = detail::start("equality-characterization", base);
  const EvalContext ctx = base.with_assignment(Assignment::pa);
  const Algebra& A = ctx.algebra();
  auto D = [&](Elem e) { return ctx.designated_value(e); };
  auto side = [&](NameId a, NameId b) {
    const Name& na = ctx.universe().name(a);
    const Name& nb = ctx.universe().name(b);
    for (const Entry& x : na.entries) {
      if (D(x.value)) {
        bool found = false;
        for (const Entry& y : nb.entries) {
          if (D(y.value) && D(ctx.equal(x.key, y.key))) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      if (x.value == A.top()) {
        bool found = false;
        for (const Entry& y : nb.entries) {
          if (y.value == A.top() && D(ctx.equal(x.key, y.key))) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
    }
    return true;
  };
  std::size_t pairs = 0;
  for (NameId u : ctx.domain()) {
    for (NameId v : ctx.domain()) {
      ++pairs;
      const Elem e = ctx.equal(u, v);
      if (e != A.top() && e != A.bottom()) {
        r.fail("PA equality took an intermediate value",
               {{"u", detail::nm(ctx, u)}, {"v", detail::nm(ctx, v)}, {"eq_pa", detail::vname(ctx, e)}});
        return r;
      }
      const bool cond = side(u, v) && side(v, u);
      if (cond != D(e)) {
        r.fail("characterization disagrees with PA equality",
               {{"u", detail::nm(ctx, u)},
                {"v", detail::nm(ctx, v)},
                {"eq_pa", detail::vname(ctx, e)},
                {"condition", cond ? "holds" : "fails"}});
        return r;
      }
    }
  }
  r.summary = std::to_string(pairs) + " pairs: PA equality two-valued and characterized";
  return r;
}

// The PA assignment refutes plain extensionality on a name pair that the BA
// assignment identifies, while the barred variant stays valid.
inline CheckResult check_extensionality_contrast(const EvalContext& base, const SuiteOptions& = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("extensionality-contrast", base, false, prof)) return *s;
  if (base.algebra().size() < 3) {
    return CheckResult::skipped("extensionality-contrast", detail::subject_of(base), "needs at least 3 elements");
  }
  CheckResult r = detail::start("extensionality-contrast", base);
  const EvalContext pa = base.with_assignment(Assignment::pa);
  const EvalContext ba = base.with_assignment(Assignment::ba);
  const Algebra& A = pa.algebra();
  Elem a = prof.coatom ? *prof.coatom : A.top();
  if (a == A.top() || a == A.bottom()) {
    for (Elem e : A.elements()) {
      if (e != A.top() && e != A.bottom()) {
        a = e;
        break;
      }
    }
  }
  Universe& U = pa.universe();
  const NameId w = U.empty_name();
  const NameId u = U.insert_name({Entry{w, a}});
  const NameId v = U.insert_name({Entry{w, A.top()}});
  const Formula ante = detail::with_constants("forall z. (z in u <-> z in v)", {{"u", u}, {"v", v}});
  const Formula bar_ante = detail::with_constants(
      "forall z. ((z in u <-> z in v) /\\ (~(z in u) <-> ~(z in v)))", {{"u", u}, {"v", v}});
  const Formula ext = Formula::imp(ante, Formula::equal(Term::constant(u), Term::constant(v)));

  const Elem eq_pa = pa.equal(u, v);
  const Elem eq_ba = ba.equal(u, v);
  const Elem ante_pa = pa.eval(ante);
  const Elem ext_pa = pa.eval(ext);
  const Elem ext_ba = ba.eval(ext);
  const Elem bar_ante_pa = pa.eval(bar_ante);
  const Elem extbar_pa = pa.eval(instantiate_axiom(Axiom::extensionality_bar));

  r.evidence = {{"u", U.format(u)},
                {"v", U.format(v)},
                {"eq_pa", detail::vname(pa, eq_pa)},
                {"eq_ba", detail::vname(pa, eq_ba)},
                {"ext_antecedent_pa", detail::vname(pa, ante_pa)},
                {"ext_instance_pa", detail::vname(pa, ext_pa)},
                {"ext_instance_ba", detail::vname(pa, ext_ba)},
                {"extbar_antecedent_pa", detail::vname(pa, bar_ante_pa)},
                {"extbar_sentence_pa", detail::vname(pa, extbar_pa)}};
  r.notes.push_back(detail::bounded_note(pa));
  const bool ok = eq_pa == A.bottom() && eq_ba == A.top() && pa.designated_value(ante_pa) &&
                  !pa.designated_value(ext_pa) && pa.designated_value(ext_ba) && !pa.designated_value(bar_ante_pa) &&
                  pa.designated_value(extbar_pa);
  if (!ok) {
    r.fail("contrast values differ from the expected pattern", r.evidence);
    return r;
  }
  r.summary = "PA separates u and v (eq=" + detail::vname(pa, eq_pa) + "), BA identifies them (eq=" +
              detail::vname(pa, eq_ba) + "); barred extensionality valid";
  return r;
}

// ---------------------------------------------------------------------------
// Witness names for the barred axioms

namespace detail {

struct SubResult {
  std::size_t instances = 0;
  std::optional<KeyValues> failure;
};

inline SubResult zf_pairing(const EvalContext& ctx) {
  SubResult s;
  const Algebra& A = ctx.algebra();
  for (NameId x : ctx.domain()) {
    for (NameId y : ctx.domain()) {
      std::vector<Entry> es{Entry{x, A.top()}};
      if (y != x) es.push_back(Entry{y, A.top()});
      const NameId z = ctx.universe().insert_name(es);
      const Formula f =
          with_constants("forall w. (w in z <-> (w = x \\/ w = y))", {{"z", z}, {"x", x}, {"y", y}});
      ++s.instances;
      const Elem e = ctx.eval(f);
      if (!ctx.designated_value(e)) {
        s.failure = KeyValues{{"axiom", "pairing"}, {"x", nm(ctx, x)}, {"y", nm(ctx, y)},
                              {"witness", nm(ctx, z)}, {"formula", to_string(f)}, {"value", vname(ctx, e)}};
        return s;
      }
    }
  }
  return s;
}

inline SubResult zf_union(const EvalContext& ctx) {
  SubResult s;
  for (NameId u : ctx.domain()) {
    std::vector<NameId> keys;
    for (const Entry& y : ctx.universe().name(u).entries) {
      for (const Entry& x : ctx.universe().name(y.key).entries) keys.push_back(x.key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<Entry> es;
    for (NameId x : keys) {
      es.push_back(Entry{x, ctx.eval(with_constants("exists y. (y in u /\\ x in y)", {{"u", u}, {"x", x}}))});
    }
    const NameId v = ctx.universe().insert_name(es);
    const Formula f =
        with_constants("forall x. (x in v <-> exists y. (y in u /\\ x in y))", {{"u", u}, {"v", v}});
    ++s.instances;
    const Elem e = ctx.eval(f);
    if (!ctx.designated_value(e)) {
      s.failure = KeyValues{{"axiom", "union"}, {"x", nm(ctx, u)}, {"witness", nm(ctx, v)},
                            {"formula", to_string(f)}, {"value", vname(ctx, e)}};
      return s;
    }
  }
  return s;
}

inline SubResult zf_power_set(const EvalContext& ctx, std::size_t cap, std::size_t& skipped) {
  SubResult s;
  const Algebra& A = ctx.algebra();
  for (NameId x : ctx.domain()) {
    const auto& dom = ctx.universe().name(x).entries;
    if (dom.size() > cap) {
      ++skipped;
      continue;
    }
    // Every total map dom(x) -> A becomes a member candidate.
    std::vector<Entry> yentries;
    std::vector<std::size_t> digits(dom.size(), 0);
    for (;;) {
      std::vector<Entry> q;
      for (std::size_t i = 0; i < dom.size(); ++i) q.push_back(Entry{dom[i].key, A.elements()[digits[i]]});
      const NameId qid = ctx.universe().insert_name(q);
      yentries.push_back(
          Entry{qid, ctx.eval(with_constants("forall w. (w in q -> w in x)", {{"q", qid}, {"x", x}}))});
      std::size_t i = 0;
      while (i < digits.size() && ++digits[i] == A.size()) digits[i++] = 0;
      if (i == digits.size()) break;
    }
    const NameId y = ctx.universe().insert_name(yentries);
    const Formula f =
        with_constants("forall z. (z in y <-> forall w. (w in z -> w in x))", {{"y", y}, {"x", x}});
    ++s.instances;
    const Elem e = ctx.eval(f);
    if (!ctx.designated_value(e)) {
      s.failure = KeyValues{{"axiom", "power-set"}, {"x", nm(ctx, x)}, {"witness", nm(ctx, y)},
                            {"formula", to_string(f)}, {"value", vname(ctx, e)}};
      return s;
    }
  }
  return s;
}

inline Formula separation_body(const Formula& phi_x, NameId x_const, const Term& y_term) {
  // forall z. (z in y <-> (z in x /\ phi(z)))
  Formula phi_z = substitute(phi_x, "x", Term::variable("z"));
  return Formula::forall("z", Formula::iff(Formula::member(Term::variable("z"), y_term),
                                           Formula::conj(Formula::member(Term::variable("z"), Term::constant(x_const)),
                                                         phi_z)));
}

inline SubResult zf_separation(const EvalContext& ctx, const std::vector<BatteryInstance>& battery) {
  SubResult s;
  const Algebra& A = ctx.algebra();
  for (NameId x : ctx.domain()) {
    for (const auto& inst : battery) {
      std::vector<Entry> es;
      for (const Entry& z : ctx.universe().name(x).entries) {
        es.push_back(Entry{z.key, A.meet(z.value, ctx.eval(inst.formula, Env{{"x", z.key}}))});
      }
      const NameId y = ctx.universe().insert_name(es);
      const Formula f = separation_body(inst.formula, x, Term::constant(y));
      ++s.instances;
      const Elem e = ctx.eval(f);
      if (!ctx.designated_value(e)) {
        s.failure = KeyValues{{"axiom", "separation"}, {"phi", inst.label}, {"x", nm(ctx, x)},
                              {"witness", nm(ctx, y)}, {"formula", to_string(f)}, {"value", vname(ctx, e)}};
        return s;
      }
    }
  }
  return s;
}

inline SubResult zf_infinity(const EvalContext& ctx) {
  SubResult s;
  const Algebra& A = ctx.algebra();
  const unsigned N = ctx.rank_bound() - 1;
  std::vector<NameId> nums;
  for (unsigned n = 0; n <= N + 1; ++n) nums.push_back(ctx.universe().check_name(HFSet::von_neumann(n)));
  std::vector<Entry> es;
  for (NameId k : nums) es.push_back(Entry{k, A.top()});
  const NameId omega = ctx.universe().insert_name(es);
  auto fail = [&](const std::string& what, Elem e) {
    s.failure = KeyValues{{"axiom", "infinity"}, {"clause", what}, {"omega", nm(ctx, omega)}, {"value", vname(ctx, e)}};
  };
  ++s.instances;
  if (Elem e = ctx.eval(with_constants("forall z. ~(z in e)", {{"e", nums[0]}})); !ctx.designated_value(e)) {
    fail("empty", e);
    return s;
  }
  if (Elem e = ctx.member(nums[0], omega); !ctx.designated_value(e)) {
    fail("empty in omega", e);
    return s;
  }
  for (unsigned n = 0; n <= N; ++n) {
    ++s.instances;
    const Elem e = A.meet(ctx.member(nums[n + 1], omega), ctx.member(nums[n], nums[n + 1]));
    if (!ctx.designated_value(e)) {
      fail("successor of " + std::to_string(n), e);
      return s;
    }
  }
  return s;
}

inline SubResult zf_collection(const EvalContext& ctx, const std::vector<BatteryInstance>& battery2) {
  SubResult s;
  const Algebra& A = ctx.algebra();
  std::vector<Entry> all;
  for (NameId d : ctx.domain()) all.push_back(Entry{d, A.top()});
  const NameId v = ctx.universe().insert_name(all);
  for (NameId u : ctx.domain()) {
    for (const auto& inst : battery2) {
      const Formula ante = Formula::forall(
          "x", Formula::imp(Formula::member(Term::variable("x"), Term::constant(u)), Formula::exists("y", inst.formula)));
      const Formula cons = Formula::forall(
          "x", Formula::imp(Formula::member(Term::variable("x"), Term::constant(u)),
                            Formula::exists("y", Formula::conj(Formula::member(Term::variable("y"), Term::constant(v)),
                                                               inst.formula))));
      ++s.instances;
      const Elem e = A.imp(ctx.eval(ante), ctx.eval(cons));
      if (!ctx.designated_value(e)) {
        s.failure = KeyValues{{"axiom", "collection"}, {"phi", inst.label}, {"x", nm(ctx, u)},
                              {"formula", to_string(Formula::imp(ante, cons))}, {"value", vname(ctx, e)}};
        return s;
      }
    }
  }
  return s;
}

inline SubResult zf_foundation(const EvalContext& ctx, const std::vector<BatteryInstance>& battery) {
  SubResult s;
  for (const auto& inst : battery) {
    const Formula f = instantiate_axiom(Axiom::foundation, SchemaParameter{inst.formula, {"x"}});
    ++s.instances;
    const Elem e = ctx.eval(f);
    if (!ctx.designated_value(e)) {
      s.failure = KeyValues{{"axiom", "foundation"}, {"phi", inst.label}, {"formula", to_string(f)},
                            {"value", vname(ctx, e)}};
      return s;
    }
  }
  return s;
}

}  // namespace detail

// Candidate Separation counterexample under BA for phi(z) := ~exists y. y in z.
// Scans domain names and singletons {t: top}; returns the first x whose
// instance is not designated.
inline std::optional<KeyValues> find_ba_separation_failure(const EvalContext& base) {
  const EvalContext ba = base.with_assignment(Assignment::ba);
  const Algebra& A = ba.algebra();
  const Formula phi = parse_formula("~(exists y. y in x)");
  std::vector<NameId> candidates = ba.domain();
  for (NameId t : ba.domain()) candidates.push_back(ba.universe().insert_name({Entry{t, A.top()}}));
  for (NameId x : candidates) {
    const Formula f = Formula::exists("y", detail::separation_body(phi, x, Term::variable("y")));
    const Elem e = ba.eval(f);
    if (!ba.designated_value(e)) {
      return KeyValues{{"x", ba.universe().format(x)},
                       {"phi", "~(exists y. y in z)"},
                       {"formula", to_string(f)},
                       {"value_ba", A.name_of(e)}};
    }
  }
  return std::nullopt;
}

inline CheckResult check_zfbar_witnesses(const EvalContext& base, const SuiteOptions& opt = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("zfbar-witnesses", base, true, prof)) return *s;
  CheckResult r = detail::start("zfbar-witnesses", base);
  const EvalContext ctx = base.with_assignment(Assignment::pa);
  const auto sample = name_sample(ctx.domain(), opt.sample_size, opt.seed);
  const auto battery = instantiate_battery(unary_battery_templates(), sample);
  const auto battery2 = instantiate_battery(binary_battery_templates(), sample);

  std::size_t ps_skipped = 0;
  const std::vector<std::pair<const char*, std::function<detail::SubResult()>>> parts = {
      {"pairing", [&] { return detail::zf_pairing(ctx); }},
      {"union", [&] { return detail::zf_union(ctx); }},
      {"power-set", [&] { return detail::zf_power_set(ctx, opt.powerset_domain_cap, ps_skipped); }},
      {"separation", [&] { return detail::zf_separation(ctx, battery); }},
      {"infinity", [&] { return detail::zf_infinity(ctx); }},
      {"collection", [&] { return detail::zf_collection(ctx, battery2); }},
      {"foundation", [&] { return detail::zf_foundation(ctx, battery); }},
  };
  std::size_t total = 0;
  for (const auto& [label, run] : parts) {
    detail::SubResult s = run();
    total += s.instances;
    if (s.failure) {
      r.fail(std::string(label) + " witness not valid under PA", *s.failure);
      return r;
    }
    r.notes.push_back(std::string(label) + ": " + std::to_string(s.instances) + " instance(s) valid");
  }
  const Elem extbar = ctx.eval(instantiate_axiom(Axiom::extensionality_bar));
  if (!ctx.designated_value(extbar)) {
    r.fail("barred extensionality not valid under PA",
           {{"axiom", "extensionality-bar"}, {"value", detail::vname(ctx, extbar)}});
    return r;
  }
  r.notes.push_back("extensionality-bar: sentence valid");
  if (ps_skipped) {
    r.notes.push_back("power-set: " + std::to_string(ps_skipped) + " name(s) above the domain cap of " +
                      std::to_string(opt.powerset_domain_cap) + " not checked");
  }
  r.notes.push_back(detail::bounded_note(ctx));
  if (auto ba = find_ba_separation_failure(base)) {
    for (auto& [k, v] : *ba) r.evidence.emplace_back("ba-separation-" + k, v);
  }
  r.summary = std::to_string(total + 1) + " witness instances valid under PA";
  return r;
}

// ---------------------------------------------------------------------------
// Transfer of negation-free sentences onto the three-element algebra

// Builds u-bar in `target`, merging collided entries by join.
class CollapseTransfer {
 public:
  CollapseTransfer(const Universe& source, Universe& target)
      : source_(source), target_(target), f_(source.algebra()) {}

  NameId operator()(NameId u) {
    if (auto it = cache_.find(u.value); it != cache_.end()) return it->second;
    std::map<NameId, Elem> merged;
    const Algebra& P = target_.algebra();
    for (const Entry& e : source_.name(u).entries) {
      const NameId k = (*this)(e.key);
      const Elem v = f_(e.value);
      auto [it, fresh] = merged.emplace(k, v);
      if (!fresh) it->second = P.join(it->second, v);
    }
    std::vector<Entry> es;
    for (const auto& [k, v] : merged) es.push_back(Entry{k, v});
    const NameId out = target_.insert_name(es);
    cache_.emplace(u.value, out);
    return out;
  }

  const Collapse& collapse() const noexcept { return f_; }

 private:
  const Universe& source_;
  Universe& target_;
  Collapse f_;
  std::unordered_map<std::uint32_t, NameId> cache_;
};

namespace detail {

inline Formula map_constants(const Formula& f, CollapseTransfer& bar) {
  const Node& n = f.node();
  auto t = [&](const Term& x) { return x.is_var ? x : Term::constant(bar(x.name)); };
  switch (n.kind) {
    case Kind::eq: return Formula::equal(t(n.lhs), t(n.rhs));
    case Kind::mem: return Formula::member(t(n.lhs), t(n.rhs));
    case Kind::top:
    case Kind::bot: return f;
    case Kind::neg: return Formula::neg(map_constants(n.a, bar));
    case Kind::conj: return Formula::conj(map_constants(n.a, bar), map_constants(n.b, bar));
    case Kind::disj: return Formula::disj(map_constants(n.a, bar), map_constants(n.b, bar));
    case Kind::imp: return Formula::imp(map_constants(n.a, bar), map_constants(n.b, bar));
    case Kind::forall: return Formula::forall(n.var, map_constants(n.a, bar));
    case Kind::exists: return Formula::exists(n.var, map_constants(n.a, bar));
  }
  return f;
}

}  // namespace detail

// f(value over A) equals the value over PS3 of the collapsed sentence, for
// negation-free sentences under BA. The PS3 side is enumerated at the same
// rank bound.
inline CheckResult check_nff_transfer(const EvalContext& base, const SuiteOptions& opt = {},
                                      std::size_t budget = BuildOptions{}.budget) {
  const std::string check = "nff-transfer";
  const AlgebraProfile prof = profile(base.algebra(), base.designated());
  if (!prof.cobounded) return CheckResult::skipped(check, detail::subject_of(base), "needs a cobounded algebra");
  CheckResult r = detail::start(check, base);
  const EvalContext ctx = base.with_assignment(Assignment::ba);
  std::shared_ptr<Universe> pu;
  try {
    BuildOptions bo;
    bo.rank_bound = ctx.rank_bound();
    bo.budget = budget;
    pu = build_universe(ps3_algebra(), bo);
  } catch (const ResourceError& e) {
    return CheckResult::skipped(check, r.subject, std::string("PS3 universe exceeds budget: ") + e.what());
  }
  const EvalContext pctx(pu, ps3().designated, Assignment::ba);
  CollapseTransfer bar(ctx.universe(), *pu);
  const auto sample = name_sample(ctx.domain(), opt.sample_size, opt.seed);
  const auto sentences = instantiate_battery(nff_sentence_templates(), sample);
  std::size_t checked = 0;
  for (const auto& s : sentences) {
    if (!is_nff(s.formula)) throw InvariantError("transfer battery contains a negated sentence: " + s.label);
    const Elem lhs = ctx.eval(s.formula);
    const Formula mapped = detail::map_constants(s.formula, bar);
    const Elem rhs = pctx.eval(mapped);
    ++checked;
    if (bar.collapse()(lhs) != rhs) {
      r.fail("collapse does not commute with evaluation",
             {{"sentence", to_string(s.formula)},
              {"value_a", detail::vname(ctx, lhs)},
              {"collapsed_sentence", to_string(mapped)},
              {"value_ps3", ps3_algebra().name_of(rhs)}});
      return r;
    }
  }
  r.notes.push_back(detail::bounded_note(ctx));
  r.summary = std::to_string(checked) + " negation-free sentences transfer to PS3";
  return r;
}

// ---------------------------------------------------------------------------

inline CheckResult check_paraconsistency(const EvalContext& base, const SuiteOptions& = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("paraconsistency", base, false, prof)) return *s;
  if (base.designated().size() < 2) {
    return CheckResult::skipped("paraconsistency", detail::subject_of(base), "needs at least two designated values");
  }
  CheckResult r = detail::start("paraconsistency", base);
  const Formula phi = parse_formula("exists x. exists y. (x in y /\\ ~(x in y))");
  const Formula psi = parse_formula("~(forall x. x = x)");
  const Formula expl = Formula::imp(Formula::conj(phi, Formula::neg(phi)), psi);
  const Algebra& A = base.algebra();
  const Elem coatom = *prof.coatom;
  for (Assignment as : {Assignment::ba, Assignment::pa}) {
    const EvalContext ctx = base.with_assignment(as);
    const Elem vphi = ctx.eval(phi);
    const Elem vneg = ctx.eval(Formula::neg(phi));
    const Elem vpsi = ctx.eval(psi);
    const Elem vexp = ctx.eval(expl);
    const std::string tag = assignment_name(as);
    r.evidence.push_back({tag + "-phi", A.name_of(vphi)});
    r.evidence.push_back({tag + "-not-phi", A.name_of(vneg)});
    r.evidence.push_back({tag + "-psi", A.name_of(vpsi)});
    r.evidence.push_back({tag + "-explosion", A.name_of(vexp)});
    if (vphi != coatom || vneg != coatom || vexp != A.bottom()) {
      r.fail(std::string("explosion not refuted under ") + tag,
             {{"assignment", tag},
              {"phi", to_string(phi)},
              {"value_phi", A.name_of(vphi)},
              {"value_not_phi", A.name_of(vneg)},
              {"value_explosion", A.name_of(vexp)},
              {"coatom", A.name_of(coatom)}});
      return r;
    }
  }
  r.notes.push_back(detail::bounded_note(base));
  r.summary = "phi and ~phi both take the coatom " + A.name_of(coatom) + "; (phi /\\ ~phi) -> psi is bottom";
  return r;
}

// Reflexivity, designated members, transitivity and the two substitution
// properties of PA equality, checked over the bounded universe.
inline CheckResult check_properties_lemma(const EvalContext& base, const SuiteOptions& = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("properties-lemma", base, true, prof)) return *s;
  CheckResult r = detail::start("properties-lemma", base);
  const EvalContext ctx = base.with_assignment(Assignment::pa);
  const auto& dom = ctx.domain();
  const std::size_t n = dom.size();
  std::vector<std::uint8_t> eq(n * n), mem(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      eq[i * n + j] = ctx.designated_value(ctx.equal(dom[i], dom[j]));
      mem[i * n + j] = ctx.designated_value(ctx.member(dom[i], dom[j]));
    }
  }
  auto N = [&](std::size_t i) { return detail::nm(ctx, dom[i]); };
  for (std::size_t i = 0; i < n; ++i) {
    if (!eq[i * n + i]) {
      r.fail("(i) reflexivity fails", {{"clause", "i"}, {"u", N(i)}, {"eq_pa", detail::vname(ctx, ctx.equal(dom[i], dom[i]))}});
      return r;
    }
    for (const Entry& x : ctx.universe().name(dom[i]).entries) {
      if (ctx.designated_value(x.value) && !ctx.designated_value(ctx.member(x.key, dom[i]))) {
        r.fail("(ii) designated entry is not a designated member",
               {{"clause", "ii"}, {"u", N(i)}, {"x", detail::nm(ctx, x.key)}});
        return r;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (eq[i * n + j] && eq[j * n + k] && !eq[i * n + k]) {
          r.fail("(iii) transitivity fails", {{"clause", "iii"}, {"u", N(i)}, {"v", N(j)}, {"w", N(k)}});
          return r;
        }
        if (eq[i * n + j] && mem[j * n + k] && !mem[i * n + k]) {
          r.fail("(iv) substitution on the left of membership fails",
                 {{"clause", "iv"}, {"u", N(i)}, {"v", N(j)}, {"w", N(k)}});
          return r;
        }
        if (eq[i * n + j] && mem[k * n + j] && !mem[k * n + i]) {
          r.fail("(v) substitution on the right of membership fails",
                 {{"clause", "v"}, {"u", N(i)}, {"v", N(j)}, {"w", N(k)}});
          return r;
        }
      }
    }
  }
  r.summary = "clauses (i)-(v) hold over " + std::to_string(n) + " names";
  return r;
}

// Substitutivity of PA-equal names in the formula battery, with the BA
// contrast recorded as evidence.
inline CheckResult check_leibniz(const EvalContext& base, const SuiteOptions& opt = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("leibniz", base, true, prof)) return *s;
  CheckResult r = detail::start("leibniz", base);
  const auto& dom = base.domain();
  const std::size_t n = dom.size();
  const auto sample = name_sample(dom, opt.sample_size, opt.seed);
  const auto battery = instantiate_battery(unary_battery_templates(), sample);
  const Algebra& A = base.algebra();

  struct Violation {
    std::size_t formula, u, v;
  };
  auto sweep = [&](const EvalContext& ctx, bool classify) -> std::pair<std::size_t, std::optional<Violation>> {
    std::vector<Elem> val(battery.size() * n);
    for (std::size_t f = 0; f < battery.size(); ++f) {
      for (std::size_t i = 0; i < n; ++i) val[f * n + i] = ctx.eval(battery[f].formula, Env{{"x", dom[i]}});
    }
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!ctx.designated_value(ctx.equal(dom[i], dom[j]))) continue;
        ++pairs;
        for (std::size_t f = 0; f < battery.size(); ++f) {
          const Elem a = val[f * n + i], b = val[f * n + j];
          bool bad = ctx.designated_value(a) && !ctx.designated_value(b);
          if (classify) {
            const bool mid_a = a != A.top() && a != A.bottom();
            const bool mid_b = b != A.top() && b != A.bottom();
            bad = bad || (a == A.top() && b != A.top()) || (mid_a && !mid_b);
          }
          if (bad) return {pairs, Violation{f, i, j}};
        }
      }
    }
    return {pairs, std::nullopt};
  };

  const EvalContext pa = base.with_assignment(Assignment::pa);
  auto [pairs, bad] = sweep(pa, true);
  if (bad) {
    const Formula fu = substitute(battery[bad->formula].formula, "x", dom[bad->u]);
    const Formula fv = substitute(battery[bad->formula].formula, "x", dom[bad->v]);
    r.fail("PA-equal names are not substitutable",
           {{"assignment", "pa"},
            {"u", detail::nm(pa, dom[bad->u])},
            {"v", detail::nm(pa, dom[bad->v])},
            {"phi", battery[bad->formula].label},
            {"formula_u", to_string(fu)},
            {"formula_v", to_string(fv)},
            {"value_u", A.name_of(pa.eval(fu))},
            {"value_v", A.name_of(pa.eval(fv))}});
    return r;
  }

  // BA contrast: look for a violation with a negated formula.
  const EvalContext ba = base.with_assignment(Assignment::ba);
  std::vector<Elem> val(battery.size() * n);
  for (std::size_t f = 0; f < battery.size(); ++f) {
    for (std::size_t i = 0; i < n; ++i) val[f * n + i] = ba.eval(battery[f].formula, Env{{"x", dom[i]}});
  }
  for (std::size_t f = 0; f < battery.size() && r.evidence.empty(); ++f) {
    if (is_nff(battery[f].formula)) continue;
    for (std::size_t i = 0; i < n && r.evidence.empty(); ++i) {
      for (std::size_t j = 0; j < n && r.evidence.empty(); ++j) {
        if (!ba.designated_value(ba.equal(dom[i], dom[j]))) continue;
        if (ba.designated_value(val[f * n + i]) && !ba.designated_value(val[f * n + j])) {
          const Formula fu = substitute(battery[f].formula, "x", dom[i]);
          const Formula fv = substitute(battery[f].formula, "x", dom[j]);
          r.evidence = {{"ba-u", detail::nm(ba, dom[i])},
                        {"ba-v", detail::nm(ba, dom[j])},
                        {"ba-eq", A.name_of(ba.equal(dom[i], dom[j]))},
                        {"ba-phi", battery[f].label},
                        {"ba-formula-u", to_string(fu)},
                        {"ba-formula-v", to_string(fv)},
                        {"ba-value-u", A.name_of(val[f * n + i])},
                        {"ba-value-v", A.name_of(val[f * n + j])}};
        }
      }
    }
  }
  r.notes.push_back(detail::bounded_note(base));
  r.notes.push_back(r.evidence.empty() ? "no BA violation found in the battery" : "BA violation exhibited");
  r.summary = std::to_string(pairs) + " PA-equal pairs x " + std::to_string(battery.size()) +
              " formulas: validity and value class preserved";
  return r;
}

inline CheckResult check_bq_identity(const EvalContext& base, const SuiteOptions& opt = {}) {
  AlgebraProfile prof;
  if (auto s = detail::require_profile("bq-identity", base, true, prof)) return *s;
  CheckResult r = detail::start("bq-identity", base);
  const EvalContext ctx = base.with_assignment(Assignment::pa);
  const auto battery = instantiate_battery(unary_battery_templates(), name_sample(ctx.domain(), opt.sample_size, opt.seed));
  std::size_t checked = 0;
  for (NameId u : ctx.domain()) {
    for (const auto& inst : battery) {
      const BqResult b = ctx.check_bq(u, inst.formula, "x");
      ++checked;
      if (!b.holds()) {
        r.fail("bounded quantifier identity fails",
               {{"u", detail::nm(ctx, u)},
                {"phi", inst.label},
                {"lhs", detail::vname(ctx, b.lhs)},
                {"rhs", detail::vname(ctx, b.rhs)}});
        return r;
      }
    }
  }
  r.notes.push_back(detail::bounded_note(ctx));
  r.summary = std::to_string(checked) + " (name, formula) pairs satisfy the identity";
  return r;
}

// On Boolean algebras both assignments agree on atoms and on validity.
inline CheckResult check_boolean_coincidence(const EvalContext& base, const SuiteOptions& opt = {}) {
  if (!check_boolean(base.algebra()).holds("boolean")) {
    return CheckResult::skipped("boolean-coincidence", detail::subject_of(base), "needs a Boolean algebra");
  }
  CheckResult r = detail::start("boolean-coincidence", base);
  const EvalContext ba = base.with_assignment(Assignment::ba);
  const EvalContext pa = base.with_assignment(Assignment::pa);
  const auto& dom = base.domain();
  for (NameId u : dom) {
    for (NameId v : dom) {
      for (Relation rel : {Relation::eq, Relation::mem}) {
        const Elem a = ba.eval_atomic(rel, u, v), b = pa.eval_atomic(rel, u, v);
        if (a != b) {
          r.fail("assignments disagree on an atomic formula",
                 {{"relation", rel == Relation::eq ? "eq" : "mem"},
                  {"u", detail::nm(ba, u)},
                  {"v", detail::nm(ba, v)},
                  {"value_ba", detail::vname(ba, a)},
                  {"value_pa", detail::vname(ba, b)}});
          return r;
        }
      }
    }
  }
  const auto sample = name_sample(dom, opt.sample_size, opt.seed);
  const auto battery = instantiate_battery(unary_battery_templates(), sample);
  std::size_t sentences = 0;
  for (const auto& inst : battery) {
    for (NameId x : sample) {
      const Formula s = substitute(inst.formula, "x", x);
      ++sentences;
      if (ba.is_valid(s) != pa.is_valid(s)) {
        r.fail("assignments disagree on validity",
               {{"sentence", to_string(s)},
                {"value_ba", detail::vname(ba, ba.eval(s))},
                {"value_pa", detail::vname(ba, pa.eval(s))}});
        return r;
      }
    }
  }
  r.notes.push_back(detail::bounded_note(base));
  r.summary = std::to_string(dom.size() * dom.size()) + " pairs and " + std::to_string(sentences) +
              " sentences agree under BA and PA";
  return r;
}

}  // namespace avm
