#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/check_result.hpp"
#include "avm/error.hpp"
#include "avm/lexer.hpp"

namespace avm {

enum class PropKind { var, conj, disj, imp, neg, top, bot };

struct PropNode;

class PropFormula {
 public:
  PropFormula() = default;

  static PropFormula var(std::string name);
  static PropFormula conj(PropFormula a, PropFormula b);
  static PropFormula disj(PropFormula a, PropFormula b);
  static PropFormula imp(PropFormula a, PropFormula b);
  static PropFormula neg(PropFormula a);
  static PropFormula truth();
  static PropFormula falsity();

  const PropNode& node() const { return *node_; }
  PropKind kind() const;

  friend bool operator==(const PropFormula& a, const PropFormula& b);

 private:
  explicit PropFormula(std::shared_ptr<const PropNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const PropNode> node_;
};

struct PropNode {
  PropKind kind;
  std::string name;
  PropFormula a;
  PropFormula b;
};

inline PropKind PropFormula::kind() const { return node_->kind; }
inline PropFormula PropFormula::var(std::string name) {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::var, std::move(name), {}, {}}));
}
inline PropFormula PropFormula::conj(PropFormula a, PropFormula b) {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::conj, {}, std::move(a), std::move(b)}));
}
inline PropFormula PropFormula::disj(PropFormula a, PropFormula b) {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::disj, {}, std::move(a), std::move(b)}));
}
inline PropFormula PropFormula::imp(PropFormula a, PropFormula b) {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::imp, {}, std::move(a), std::move(b)}));
}
inline PropFormula PropFormula::neg(PropFormula a) {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::neg, {}, std::move(a), {}}));
}
inline PropFormula PropFormula::truth() {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::top, {}, {}, {}}));
}
inline PropFormula PropFormula::falsity() {
  return PropFormula(std::make_shared<const PropNode>(PropNode{PropKind::bot, {}, {}, {}}));
}

inline bool operator==(const PropFormula& x, const PropFormula& y) {
  if (x.node_ == y.node_) return true;
  const PropNode& a = *x.node_;
  const PropNode& b = *y.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case PropKind::var: return a.name == b.name;
    case PropKind::top:
    case PropKind::bot: return true;
    case PropKind::neg: return a.a == b.a;
    default: return a.a == b.a && a.b == b.b;
  }
}

inline std::string to_string(const PropFormula& f) {
  const PropNode& n = f.node();
  auto prec = [](const PropFormula& g) {
    switch (g.kind()) {
      case PropKind::imp: return 1;
      case PropKind::disj: return 2;
      case PropKind::conj: return 3;
      default: return 4;
    }
  };
  auto wrap = [](const PropFormula& g, bool paren) {
    std::string s = to_string(g);
    return paren ? "(" + s + ")" : s;
  };
  switch (n.kind) {
    case PropKind::var: return n.name;
    case PropKind::top: return "true";
    case PropKind::bot: return "false";
    case PropKind::neg: return "~" + wrap(n.a, prec(n.a) < 4);
    case PropKind::conj: return wrap(n.a, prec(n.a) < 3) + " /\\ " + wrap(n.b, prec(n.b) <= 3);
    case PropKind::disj: return wrap(n.a, prec(n.a) < 2) + " \\/ " + wrap(n.b, prec(n.b) <= 2);
    case PropKind::imp: return wrap(n.a, prec(n.a) <= 1) + " -> " + wrap(n.b, prec(n.b) < 1);
  }
  return {};
}

namespace detail {

class PropParser {
 public:
  explicit PropParser(std::string_view text) : cur_(lex::tokenize(text)) {}

  PropFormula parse_all() {
    PropFormula f = formula();
    if (!cur_.at(lex::Tok::end)) throw ParseError("unexpected '" + cur_.peek().text + "'", cur_.peek().pos);
    return f;
  }

 private:
  PropFormula formula() {
    PropFormula f = implication();
    while (cur_.accept(lex::Tok::iff)) {
      PropFormula g = implication();
      f = PropFormula::conj(PropFormula::imp(f, g), PropFormula::imp(g, f));
    }
    return f;
  }
  PropFormula implication() {
    PropFormula f = disjunction();
    if (cur_.accept(lex::Tok::arrow)) return PropFormula::imp(f, implication());
    return f;
  }
  PropFormula disjunction() {
    PropFormula f = conjunction();
    while (cur_.accept(lex::Tok::vee)) f = PropFormula::disj(f, conjunction());
    return f;
  }
  PropFormula conjunction() {
    PropFormula f = unary();
    while (cur_.accept(lex::Tok::wedge)) f = PropFormula::conj(f, unary());
    return f;
  }
  PropFormula unary() {
    if (cur_.accept(lex::Tok::tilde)) return PropFormula::neg(unary());
    if (cur_.accept(lex::Tok::lparen)) {
      PropFormula f = formula();
      cur_.expect(lex::Tok::rparen, "')'");
      return f;
    }
    if (cur_.accept(lex::Tok::kw_true)) return PropFormula::truth();
    if (cur_.accept(lex::Tok::kw_false)) return PropFormula::falsity();
    return PropFormula::var(cur_.expect(lex::Tok::ident, "a propositional variable").text);
  }

  lex::Cursor cur_;
};

inline void collect_prop_vars(const PropFormula& f, std::vector<std::string>& out) {
  const PropNode& n = f.node();
  switch (n.kind) {
    case PropKind::var:
      if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
      break;
    case PropKind::top:
    case PropKind::bot: break;
    case PropKind::neg: collect_prop_vars(n.a, out); break;
    default:
      collect_prop_vars(n.a, out);
      collect_prop_vars(n.b, out);
  }
}

}  // namespace detail

inline PropFormula parse_prop(std::string_view text) { return detail::PropParser(text).parse_all(); }

// Sorted, without repeats.
inline std::vector<std::string> prop_variables(const PropFormula& f) {
  std::vector<std::string> out;
  detail::collect_prop_vars(f, out);
  std::sort(out.begin(), out.end());
  return out;
}

using Valuation = std::map<std::string, Elem>;

inline Elem eval_prop(const Algebra& alg, const Valuation& v, const PropFormula& f) {
  const PropNode& n = f.node();
  switch (n.kind) {
    case PropKind::var: {
      auto it = v.find(n.name);
      if (it == v.end()) throw InputError("valuation does not assign '" + n.name + "'");
      alg.require(it->second);
      return it->second;
    }
    case PropKind::top: return alg.top();
    case PropKind::bot: return alg.bottom();
    case PropKind::neg: return alg.star(eval_prop(alg, v, n.a));
    case PropKind::conj: return alg.meet(eval_prop(alg, v, n.a), eval_prop(alg, v, n.b));
    case PropKind::disj: return alg.join(eval_prop(alg, v, n.a), eval_prop(alg, v, n.b));
    case PropKind::imp: return alg.imp(eval_prop(alg, v, n.a), eval_prop(alg, v, n.b));
  }
  return alg.bottom();
}

inline std::string format_valuation(const Algebra& alg, const Valuation& v) {
  std::string s;
  for (const auto& [k, e] : v) {
    if (!s.empty()) s += " ";
    s += k + "=" + alg.name_of(e);
  }
  return s;
}

struct TautologyResult {
  bool tautology = true;
  std::optional<Valuation> falsifying;
  std::size_t valuations_checked = 0;
};

inline constexpr std::size_t default_valuation_cap = 3125;

// Exhaustive over all valuations, in lexicographic order of variables and
// element indices; the first falsifying valuation is returned.
inline TautologyResult is_tautology(const Algebra& alg, const DesignatedSet& d, const PropFormula& f,
                                    std::size_t max_valuations = default_valuation_cap) {
  const auto vars = prop_variables(f);
  double count = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) count *= static_cast<double>(alg.size());
  if (count > static_cast<double>(max_valuations)) {
    throw ResourceError(std::to_string(vars.size()) + " variables over " + std::to_string(alg.size()) +
                        " elements exceed the cap of " + std::to_string(max_valuations) + " valuations");
  }
  TautologyResult r;
  std::vector<std::size_t> digits(vars.size(), 0);
  Valuation v;
  for (;;) {
    for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = alg.elements()[digits[i]];
    ++r.valuations_checked;
    if (!d.contains(eval_prop(alg, v, f))) {
      r.tautology = false;
      r.falsifying = v;
      return r;
    }
    std::size_t i = vars.size();
    while (i > 0 && ++digits[i - 1] == alg.size()) digits[--i] = 0;
    if (i == 0) break;
  }
  return r;
}

namespace detail {
inline constexpr const char* corpus_vars[] = {"p", "q", "r", "s", "t"};
}  // namespace detail

// Seeded corpus over the variables p, q, r. Draws use plain modulo on the
// 64-bit engine so the corpus is the same on every platform.
inline std::vector<PropFormula> random_prop_corpus(std::uint64_t seed, std::size_t count, std::size_t max_vars = 3,
                                                   unsigned max_depth = 4) {
  if (max_vars == 0 || max_vars > 5) throw InputError("corpus variable count must be between 1 and 5");
  std::mt19937_64 rng(seed);
  auto draw = [&](std::uint64_t n) { return rng() % n; };
  auto gen = [&](auto&& self, unsigned depth) -> PropFormula {
    const std::uint64_t pick = depth == 0 ? draw(7) % 3 : draw(9);
    switch (pick) {
      case 0:
      case 1: return PropFormula::var(detail::corpus_vars[draw(max_vars)]);
      case 2: return draw(2) ? PropFormula::truth() : PropFormula::falsity();
      case 3: return PropFormula::neg(self(self, depth - 1));
      case 4: return PropFormula::conj(self(self, depth - 1), self(self, depth - 1));
      case 5: return PropFormula::disj(self(self, depth - 1), self(self, depth - 1));
      default: return PropFormula::imp(self(self, depth - 1), self(self, depth - 1));
    }
  };
  std::vector<PropFormula> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen(gen, max_depth));
  return out;
}

inline std::string prop_subject(const Algebra& alg, const DesignatedSet& d) {
  return alg.name() + " D=" + format_designated(alg, d);
}

// Searches for a valuation refuting (p /\ ~p) -> q.
inline CheckResult check_paraconsistent(const Algebra& alg, const DesignatedSet& d) {
  const PropFormula expl = parse_prop("(p /\\ ~p) -> q");
  const AlgebraProfile prof = profile(alg, d);
  const bool guaranteed = prof.designated_cobounded && d.size() >= 2;
  CheckResult r;
  r.check = "prop-paraconsistent";
  r.subject = prop_subject(alg, d);
  const TautologyResult t = is_tautology(alg, d, expl);
  if (!guaranteed) {
    r.outcome = Outcome::skipped;
    r.summary = "precondition not met: needs a designated cobounded algebra with at least two designated values";
    r.notes.push_back(t.tautology ? "no refuting valuation: explosion is valid here"
                                  : "refuting valuation found: " + format_valuation(alg, *t.falsifying));
    return r;
  }
  // The canonical witness: p at a designated non-top value, q at bottom.
  Elem a = alg.top();
  for (Elem e : d.members()) {
    if (e != alg.top()) a = e;
  }
  const Valuation canonical{{"p", a}, {"q", alg.bottom()}};
  const Elem value = eval_prop(alg, canonical, expl);
  if (t.tautology || d.contains(value)) {
    r.fail("explosion is not refuted", {{"formula", to_string(expl)},
                                         {"valuation", format_valuation(alg, canonical)},
                                         {"value", alg.name_of(value)}});
    return r;
  }
  r.evidence = {{"valuation", format_valuation(alg, *t.falsifying)},
                {"canonical", format_valuation(alg, canonical)},
                {"value", alg.name_of(value)}};
  r.summary = "(p /\\ ~p) -> q is refuted by " + format_valuation(alg, *t.falsifying);
  return r;
}

// Tautologies over an ultra-designated cobounded algebra coincide with the
// PS3 tautologies; falsifying valuations transfer both ways.
inline CheckResult check_ps3_agreement(const Algebra& alg, const DesignatedSet& d, const std::vector<PropFormula>& corpus,
                                       std::size_t max_valuations = default_valuation_cap) {
  CheckResult r;
  r.check = "ps3-agreement";
  r.subject = prop_subject(alg, d);
  const AlgebraProfile prof = profile(alg, d);
  if (!prof.ultra_designated_cobounded || alg.size() <= 2) {
    return CheckResult::skipped(r.check, r.subject, "needs an ultra-designated cobounded algebra with more than 2 elements");
  }
  const auto P = ps3();
  const Collapse f(alg);
  std::size_t tautologies = 0;
  for (const auto& phi : corpus) {
    const TautologyResult ta = is_tautology(alg, d, phi, max_valuations);
    const TautologyResult tp = is_tautology(P.algebra, P.designated, phi, max_valuations);
    if (ta.tautology != tp.tautology) {
      r.fail("tautology verdicts differ",
             {{"formula", to_string(phi)}, {"tautology_a", ta.tautology ? "yes" : "no"},
              {"tautology_ps3", tp.tautology ? "yes" : "no"}});
      return r;
    }
    if (ta.tautology) {
      ++tautologies;
      continue;
    }
    Valuation pulled;
    for (const auto& [k, e] : *tp.falsifying) pulled[k] = f.section(e);
    if (d.contains(eval_prop(alg, pulled, phi))) {
      r.fail("pulled-back PS3 valuation does not falsify",
             {{"formula", to_string(phi)}, {"valuation", format_valuation(alg, pulled)}});
      return r;
    }
    Valuation pushed;
    for (const auto& [k, e] : *ta.falsifying) pushed[k] = f(e);
    if (P.designated.contains(eval_prop(P.algebra, pushed, phi))) {
      r.fail("collapsed valuation does not falsify in PS3",
             {{"formula", to_string(phi)}, {"valuation", format_valuation(P.algebra, pushed)}});
      return r;
    }
  }
  r.summary = std::to_string(corpus.size()) + " formulas agree (" + std::to_string(tautologies) + " tautologies)";
  return r;
}

}  // namespace avm
