#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "avm/error.hpp"
#include "avm/lexer.hpp"
#include "avm/universe.hpp"

namespace avm {

struct Term {
  bool is_var = true;
  std::string var;
  NameId name{};

  static Term variable(std::string v) { return Term{true, std::move(v), {}}; }
  static Term constant(NameId id) { return Term{false, {}, id}; }

  friend bool operator==(const Term&, const Term&) = default;
};

enum class Kind { eq, mem, conj, disj, imp, neg, top, bot, forall, exists };

struct Node;

class Formula {
 public:
  Formula() = default;

  static Formula equal(Term a, Term b);
  static Formula member(Term a, Term b);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula iff(Formula a, Formula b) { return conj(imp(a, b), imp(b, a)); }
  static Formula neg(Formula a);
  static Formula truth();
  static Formula falsity();
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);

  const Node& node() const { return *node_; }
  bool empty() const noexcept { return !node_; }
  Kind kind() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Kind kind;
  Term lhs;
  Term rhs;
  std::string var;
  Formula a;
  Formula b;
};

inline Kind Formula::kind() const { return node_->kind; }

inline Formula Formula::equal(Term a, Term b) {
  return Formula(std::make_shared<const Node>(Node{Kind::eq, std::move(a), std::move(b), {}, {}, {}}));
}
inline Formula Formula::member(Term a, Term b) {
  return Formula(std::make_shared<const Node>(Node{Kind::mem, std::move(a), std::move(b), {}, {}, {}}));
}
inline Formula Formula::conj(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{Kind::conj, {}, {}, {}, std::move(a), std::move(b)}));
}
inline Formula Formula::disj(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{Kind::disj, {}, {}, {}, std::move(a), std::move(b)}));
}
inline Formula Formula::imp(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{Kind::imp, {}, {}, {}, std::move(a), std::move(b)}));
}
inline Formula Formula::neg(Formula a) {
  return Formula(std::make_shared<const Node>(Node{Kind::neg, {}, {}, {}, std::move(a), {}}));
}
inline Formula Formula::truth() { return Formula(std::make_shared<const Node>(Node{Kind::top, {}, {}, {}, {}, {}})); }
inline Formula Formula::falsity() {
  return Formula(std::make_shared<const Node>(Node{Kind::bot, {}, {}, {}, {}, {}}));
}
inline Formula Formula::forall(std::string var, Formula body) {
  return Formula(std::make_shared<const Node>(Node{Kind::forall, {}, {}, std::move(var), std::move(body), {}}));
}
inline Formula Formula::exists(std::string var, Formula body) {
  return Formula(std::make_shared<const Node>(Node{Kind::exists, {}, {}, std::move(var), std::move(body), {}}));
}

inline bool operator==(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  const Node& a = *x.node_;
  const Node& b = *y.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::eq:
    case Kind::mem: return a.lhs == b.lhs && a.rhs == b.rhs;
    case Kind::top:
    case Kind::bot: return true;
    case Kind::neg: return a.a == b.a;
    case Kind::forall:
    case Kind::exists: return a.var == b.var && a.a == b.a;
    default: return a.a == b.a && a.b == b.b;
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(Kind k) {
  switch (k) {
    case Kind::forall:
    case Kind::exists: return 0;
    case Kind::imp: return 1;
    case Kind::disj: return 2;
    case Kind::conj: return 3;
    default: return 4;
  }
}

inline std::string term_text(const Term& t) { return t.is_var ? t.var : "#" + std::to_string(t.name.value); }

}  // namespace detail

inline std::string to_string(const Formula& f) {
  const Node& n = f.node();
  auto wrap = [](const Formula& g, bool paren) {
    std::string s = to_string(g);
    return paren ? "(" + s + ")" : s;
  };
  auto prec = [](const Formula& g) { return detail::precedence(g.kind()); };
  switch (n.kind) {
    case Kind::eq: return detail::term_text(n.lhs) + " = " + detail::term_text(n.rhs);
    case Kind::mem: return detail::term_text(n.lhs) + " in " + detail::term_text(n.rhs);
    case Kind::top: return "true";
    case Kind::bot: return "false";
    case Kind::neg: {
      const Kind c = n.a.kind();
      const bool bare = c == Kind::neg || c == Kind::top || c == Kind::bot;
      return "~" + wrap(n.a, !bare);
    }
    case Kind::conj: return wrap(n.a, prec(n.a) < 3) + " /\\ " + wrap(n.b, prec(n.b) <= 3);
    case Kind::disj: return wrap(n.a, prec(n.a) < 2) + " \\/ " + wrap(n.b, prec(n.b) <= 2);
    case Kind::imp: return wrap(n.a, prec(n.a) <= 1) + " -> " + wrap(n.b, prec(n.b) < 1);
    case Kind::forall: return "forall " + n.var + ". " + to_string(n.a);
    case Kind::exists: return "exists " + n.var + ". " + to_string(n.a);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Universe* u) : cur_(lex::tokenize(text)), universe_(u) {}

  Formula parse_all() {
    Formula f = formula();
    if (!cur_.at(lex::Tok::end)) throw ParseError("unexpected '" + cur_.peek().text + "'", cur_.peek().pos);
    return f;
  }

 private:
  Formula formula() {
    Formula f = implication();
    while (cur_.accept(lex::Tok::iff)) f = Formula::iff(f, implication());
    return f;
  }

  Formula implication() {
    Formula f = disjunction();
    if (cur_.accept(lex::Tok::arrow)) return Formula::imp(f, implication());
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (cur_.accept(lex::Tok::vee)) f = Formula::disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (cur_.accept(lex::Tok::wedge)) f = Formula::conj(f, unary());
    return f;
  }

  Formula unary() {
    if (cur_.accept(lex::Tok::tilde)) return Formula::neg(unary());
    if (cur_.at(lex::Tok::kw_forall) || cur_.at(lex::Tok::kw_exists)) {
      const bool universal = cur_.next().kind == lex::Tok::kw_forall;
      std::string var = cur_.expect(lex::Tok::ident, "a variable after the quantifier").text;
      std::optional<Term> bound;
      if (cur_.accept(lex::Tok::kw_in)) bound = term();
      cur_.expect(lex::Tok::dot, "'.' after the quantified variable");
      Formula body = formula();
      if (bound) {
        Formula guard = Formula::member(Term::variable(var), *bound);
        body = universal ? Formula::imp(guard, body) : Formula::conj(guard, body);
      }
      return universal ? Formula::forall(var, body) : Formula::exists(var, body);
    }
    return primary();
  }

  Formula primary() {
    if (cur_.accept(lex::Tok::lparen)) {
      Formula f = formula();
      cur_.expect(lex::Tok::rparen, "')'");
      return f;
    }
    if (cur_.accept(lex::Tok::kw_true)) return Formula::truth();
    if (cur_.accept(lex::Tok::kw_false)) return Formula::falsity();
    Term a = term();
    if (cur_.accept(lex::Tok::equals)) return Formula::equal(a, term());
    if (cur_.accept(lex::Tok::kw_in)) return Formula::member(a, term());
    throw ParseError("expected '=' or 'in'", cur_.peek().pos);
  }

  Term term() {
    const lex::Token& t = cur_.peek();
    if (t.kind == lex::Tok::ident) {
      cur_.next();
      return Term::variable(t.text);
    }
    if (t.kind == lex::Tok::name_const) {
      cur_.next();
      if (universe_ && t.number >= universe_->size()) {
        throw InputError("unknown name constant #" + std::to_string(t.number));
      }
      return Term::constant(NameId{static_cast<std::uint32_t>(t.number)});
    }
    throw ParseError("expected a variable or name constant", t.pos);
  }

  lex::Cursor cur_;
  const Universe* universe_;
};

}  // namespace detail

// Name constants are checked against `universe` when one is given.
inline Formula parse_formula(std::string_view text, const Universe* universe = nullptr) {
  return detail::FormulaParser(text, universe).parse_all();
}

// ---------------------------------------------------------------------------
// Structural queries

inline bool is_nff(const Formula& f) {
  const Node& n = f.node();
  switch (n.kind) {
    case Kind::neg: return false;
    case Kind::conj:
    case Kind::disj:
    case Kind::imp: return is_nff(n.a) && is_nff(n.b);
    case Kind::forall:
    case Kind::exists: return is_nff(n.a);
    default: return true;
  }
}

namespace detail {

inline void collect_free(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  const Node& n = f.node();
  auto note = [&](const Term& t) {
    if (!t.is_var) return;
    if (std::find(bound.begin(), bound.end(), t.var) != bound.end()) return;
    if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
  };
  switch (n.kind) {
    case Kind::eq:
    case Kind::mem:
      note(n.lhs);
      note(n.rhs);
      break;
    case Kind::top:
    case Kind::bot: break;
    case Kind::neg: collect_free(n.a, bound, out); break;
    case Kind::forall:
    case Kind::exists:
      bound.push_back(n.var);
      collect_free(n.a, bound, out);
      bound.pop_back();
      break;
    default:
      collect_free(n.a, bound, out);
      collect_free(n.b, bound, out);
  }
}

inline void collect_vars(const Formula& f, std::set<std::string>& out) {
  const Node& n = f.node();
  switch (n.kind) {
    case Kind::eq:
    case Kind::mem:
      if (n.lhs.is_var) out.insert(n.lhs.var);
      if (n.rhs.is_var) out.insert(n.rhs.var);
      break;
    case Kind::top:
    case Kind::bot: break;
    case Kind::neg: collect_vars(n.a, out); break;
    case Kind::forall:
    case Kind::exists:
      out.insert(n.var);
      collect_vars(n.a, out);
      break;
    default:
      collect_vars(n.a, out);
      collect_vars(n.b, out);
  }
}

inline std::string fresh_variable(const std::string& base, const std::set<std::string>& taken) {
  for (unsigned i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

}  // namespace detail

// Free variables in order of first occurrence.
inline std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound, out;
  detail::collect_free(f, bound, out);
  return out;
}

inline bool is_sentence(const Formula& f) { return free_variables(f).empty(); }

// Capture-avoiding replacement of the free occurrences of `var`.
inline Formula substitute(const Formula& f, const std::string& var, const Term& replacement) {
  const Node& n = f.node();
  auto sub_term = [&](const Term& t) { return (t.is_var && t.var == var) ? replacement : t; };
  switch (n.kind) {
    case Kind::eq: return Formula::equal(sub_term(n.lhs), sub_term(n.rhs));
    case Kind::mem: return Formula::member(sub_term(n.lhs), sub_term(n.rhs));
    case Kind::top:
    case Kind::bot: return f;
    case Kind::neg: return Formula::neg(substitute(n.a, var, replacement));
    case Kind::conj: return Formula::conj(substitute(n.a, var, replacement), substitute(n.b, var, replacement));
    case Kind::disj: return Formula::disj(substitute(n.a, var, replacement), substitute(n.b, var, replacement));
    case Kind::imp: return Formula::imp(substitute(n.a, var, replacement), substitute(n.b, var, replacement));
    case Kind::forall:
    case Kind::exists: {
      if (n.var == var) return f;
      const auto fv = free_variables(n.a);
      if (std::find(fv.begin(), fv.end(), var) == fv.end()) return f;
      std::string binder = n.var;
      Formula body = n.a;
      if (replacement.is_var && replacement.var == binder) {
        std::set<std::string> taken;
        detail::collect_vars(n.a, taken);
        taken.insert(var);
        binder = detail::fresh_variable(n.var, taken);
        body = substitute(body, n.var, Term::variable(binder));
      }
      body = substitute(body, var, replacement);
      return n.kind == Kind::forall ? Formula::forall(binder, body) : Formula::exists(binder, body);
    }
  }
  return f;
}

inline Formula substitute(const Formula& f, const std::string& var, NameId id) {
  return substitute(f, var, Term::constant(id));
}

// ---------------------------------------------------------------------------
// Axiom schemas

enum class Axiom {
  extensionality,
  extensionality_bar,
  pairing,
  infinity,
  union_set,
  power_set,
  separation,
  collection,
  foundation,
};

inline const char* axiom_name(Axiom a) {
  switch (a) {
    case Axiom::extensionality: return "extensionality";
    case Axiom::extensionality_bar: return "extensionality-bar";
    case Axiom::pairing: return "pairing";
    case Axiom::infinity: return "infinity";
    case Axiom::union_set: return "union";
    case Axiom::power_set: return "power-set";
    case Axiom::separation: return "separation";
    case Axiom::collection: return "collection";
    case Axiom::foundation: return "foundation";
  }
  return "";
}

inline std::size_t axiom_arity(Axiom a) {
  switch (a) {
    case Axiom::separation:
    case Axiom::foundation: return 1;
    case Axiom::collection: return 2;
    default: return 0;
  }
}

// A schema parameter: a formula together with the variables that the schema
// fills in, in order.
struct SchemaParameter {
  Formula formula;
  std::vector<std::string> slots;
};

namespace detail {

inline Formula fill(const SchemaParameter& p, std::initializer_list<const char*> args) {
  Formula f = p.formula;
  // Rename slots to private placeholders first so that simultaneous
  // substitution cannot chain through a slot that equals a target.
  std::size_t i = 0;
  for (const auto& s : p.slots) f = substitute(f, s, Term::variable("__slot" + std::to_string(i++)));
  i = 0;
  for (const char* a : args) f = substitute(f, "__slot" + std::to_string(i++), Term::variable(a));
  return f;
}

inline Term V(const char* v) { return Term::variable(v); }

}  // namespace detail

inline Formula instantiate_axiom(Axiom axiom, const std::optional<SchemaParameter>& param = std::nullopt) {
  using detail::V;
  const std::size_t arity = axiom_arity(axiom);
  if ((arity == 0) != !param.has_value() || (param && param->slots.size() != arity)) {
    throw InputError(std::string("arity mismatch for the ") + axiom_name(axiom) + " schema: expected " +
                     std::to_string(arity) + " parameter slot(s)");
  }
  if (param) {
    for (const auto& v : free_variables(param->formula)) {
      if (std::find(param->slots.begin(), param->slots.end(), v) == param->slots.end()) {
        throw InputError("schema parameter has free variable '" + v + "' outside its slots");
      }
    }
  }
  switch (axiom) {
    case Axiom::extensionality:
      return parse_formula("forall x. forall y. ((forall z. (z in x <-> z in y)) -> x = y)");
    case Axiom::extensionality_bar:
      return parse_formula(
          "forall x. forall y. ((forall z. ((z in x <-> z in y) /\\ (~(z in x) <-> ~(z in y)))) -> x = y)");
    case Axiom::pairing: return parse_formula("forall x. forall y. exists z. forall w. (w in z <-> (w = x \\/ w = y))");
    case Axiom::infinity:
      return parse_formula(
          "exists x. ((exists y. ((forall z. ~(z in y)) /\\ y in x)) /\\ "
          "(forall w. (w in x -> exists u. (u in x /\\ w in u))))");
    case Axiom::union_set:
      return parse_formula("forall x. exists y. forall z. (z in y <-> exists w. (w in x /\\ z in w))");
    case Axiom::power_set:
      return parse_formula("forall x. exists y. forall z. (z in y <-> forall w. (w in z -> w in x))");
    case Axiom::separation: {
      Formula phi = detail::fill(*param, {"z"});
      Formula body = Formula::iff(Formula::member(V("z"), V("y")), Formula::conj(Formula::member(V("z"), V("x")), phi));
      return Formula::forall("x", Formula::exists("y", Formula::forall("z", body)));
    }
    case Axiom::collection: {
      Formula ante = Formula::forall(
          "y", Formula::imp(Formula::member(V("y"), V("x")), Formula::exists("z", detail::fill(*param, {"y", "z"}))));
      Formula cons = Formula::exists(
          "w", Formula::forall("v", Formula::imp(Formula::member(V("v"), V("x")),
                                                 Formula::exists("u", Formula::conj(Formula::member(V("u"), V("w")),
                                                                                    detail::fill(*param, {"v", "u"}))))));
      return Formula::forall("x", Formula::imp(ante, cons));
    }
    case Axiom::foundation: {
      Formula hyp = Formula::imp(
          Formula::forall("y", Formula::imp(Formula::member(V("y"), V("x")), detail::fill(*param, {"y"}))),
          detail::fill(*param, {"x"}));
      return Formula::imp(Formula::forall("x", hyp), Formula::forall("z", detail::fill(*param, {"z"})));
    }
  }
  return {};
}

// (x = y /\ phi(x)) -> phi(y), universally closed over x and y.
inline Formula leibniz_instance(const SchemaParameter& p) {
  using detail::V;
  if (p.slots.size() != 1) throw InputError("arity mismatch for the leibniz schema: expected 1 slot");
  Formula body = Formula::imp(Formula::conj(Formula::equal(V("x"), V("y")), detail::fill(p, {"x"})), detail::fill(p, {"y"}));
  return Formula::forall("x", Formula::forall("y", body));
}

}  // namespace avm
