#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <string>

#include "avm/algebra.hpp"
#include "avm/algebra_io.hpp"
#include "avm/prop_logic.hpp"

using namespace avm;

namespace {

// Classical truth tables over bools, written directly.
bool classical(const PropFormula& f, const std::map<std::string, bool>& v) {
  const PropNode& n = f.node();
  switch (n.kind) {
    case PropKind::var: return v.at(n.name);
    case PropKind::conj: return classical(n.a, v) && classical(n.b, v);
    case PropKind::disj: return classical(n.a, v) || classical(n.b, v);
    case PropKind::imp: return !classical(n.a, v) || classical(n.b, v);
    case PropKind::neg: return !classical(n.a, v);
    case PropKind::top: return true;
    case PropKind::bot: return false;
  }
  return false;
}

bool classical_tautology(const PropFormula& f) {
  const auto vars = prop_variables(f);
  for (std::size_t mask = 0; mask < (std::size_t{1} << vars.size()); ++mask) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = (mask >> i) & 1U;
    if (!classical(f, v)) return false;
  }
  return true;
}

// Three-valued tables on 0, 1, 2 with designated {1, 2}.
int three(const PropFormula& f, const std::map<std::string, int>& v) {
  const PropNode& n = f.node();
  switch (n.kind) {
    case PropKind::var: return v.at(n.name);
    case PropKind::conj: return std::min(three(n.a, v), three(n.b, v));
    case PropKind::disj: return std::max(three(n.a, v), three(n.b, v));
    case PropKind::imp: return (three(n.a, v) != 0 && three(n.b, v) == 0) ? 0 : 2;
    case PropKind::neg: return 2 - three(n.a, v);
    case PropKind::top: return 2;
    case PropKind::bot: return 0;
  }
  return 0;
}

DesignatedAlgebra alg(const char* name) { return *builtin_algebra(name); }

}  // namespace

TEST(Parse, ShapesAndRendering) {
  const PropFormula f = parse_prop("p /\\ ~p -> q");
  ASSERT_EQ(f.kind(), PropKind::imp);
  EXPECT_EQ(f.node().a.kind(), PropKind::conj);
  EXPECT_EQ(to_string(f), "p /\\ ~p -> q");
  EXPECT_EQ(parse_prop(to_string(f)), f);
  EXPECT_EQ(prop_variables(parse_prop("r \\/ p -> q /\\ p")), (std::vector<std::string>{"p", "q", "r"}));
  EXPECT_EQ(parse_prop("p <-> q"), parse_prop("(p -> q) /\\ (q -> p)"));
  EXPECT_THROW(parse_prop("p /\\"), ParseError);
  EXPECT_THROW(parse_prop("p in q"), ParseError);
  EXPECT_THROW(parse_prop("forall p. p"), ParseError);
}

TEST(Eval, ExcludedMiddleIsHalfAtHalf) {
  const auto P = ps3();
  const PropFormula lem = parse_prop("p \\/ ~p");
  EXPECT_EQ(eval_prop(P.algebra, {{"p", ps3v::half}}, lem), ps3v::half);
  EXPECT_EQ(eval_prop(P.algebra, {{"p", ps3v::zero}}, lem), ps3v::one);
  EXPECT_TRUE(is_tautology(P.algebra, P.designated, lem).tautology);
  EXPECT_THROW(eval_prop(P.algebra, {}, lem), InputError);
  EXPECT_EQ(format_valuation(P.algebra, {{"p", ps3v::half}, {"q", ps3v::zero}}), "p=half q=zero");
}

TEST(Eval, MatchesThreeValuedOracle) {
  const auto P = ps3();
  const auto corpus = random_prop_corpus(11, 300);
  std::mt19937_64 rng(5);
  for (const auto& f : corpus) {
    std::map<std::string, int> iv;
    Valuation v;
    for (const auto& x : prop_variables(f)) {
      iv[x] = static_cast<int>(rng() % 3);
      v[x] = Elem{static_cast<std::uint8_t>(iv[x])};
    }
    EXPECT_EQ(eval_prop(P.algebra, v, f).index, three(f, iv)) << to_string(f);
  }
}

TEST(Tautology, Explosion) {
  const PropFormula expl = parse_prop("(p /\\ ~p) -> q");
  const auto P = ps3();
  const TautologyResult r = is_tautology(P.algebra, P.designated, expl);
  EXPECT_FALSE(r.tautology);
  ASSERT_TRUE(r.falsifying);
  EXPECT_EQ(format_valuation(P.algebra, *r.falsifying), "p=half q=zero");
  const auto c4 = alg("chain4");
  EXPECT_FALSE(is_tautology(c4.algebra, c4.designated, expl).tautology);
  const auto b2 = alg("bool2");
  const TautologyResult b = is_tautology(b2.algebra, b2.designated, expl);
  EXPECT_TRUE(b.tautology);
  EXPECT_EQ(b.valuations_checked, 4U);
}

TEST(Tautology, KnownVerdicts) {
  const auto P = ps3();
  EXPECT_TRUE(is_tautology(P.algebra, P.designated, parse_prop("p -> p")).tautology);
  EXPECT_TRUE(is_tautology(P.algebra, P.designated, parse_prop("~~p -> p")).tautology);
  EXPECT_FALSE(is_tautology(P.algebra, P.designated, parse_prop("~(p /\\ ~p) -> false")).tautology);
  EXPECT_TRUE(is_tautology(P.algebra, P.designated, parse_prop("true")).tautology);
  EXPECT_FALSE(is_tautology(P.algebra, P.designated, parse_prop("false")).tautology);
}

TEST(Tautology, BooleanMatchesTruthTables) {
  const auto b2 = alg("bool2");
  for (const auto& f : random_prop_corpus(3, 500)) {
    EXPECT_EQ(is_tautology(b2.algebra, b2.designated, f).tautology, classical_tautology(f)) << to_string(f);
  }
}

TEST(Tautology, ValuationCap) {
  const auto c5 = alg("chain5");
  const PropFormula many = parse_prop("p /\\ q /\\ r /\\ s /\\ t /\\ u -> p");
  EXPECT_THROW(is_tautology(c5.algebra, c5.designated, many), ResourceError);
  EXPECT_TRUE(is_tautology(c5.algebra, c5.designated, many, 20000).tautology);
  EXPECT_NO_THROW(is_tautology(c5.algebra, c5.designated, parse_prop("p /\\ q /\\ r /\\ s /\\ t -> p")));
}

TEST(Corpus, DeterministicPerSeed) {
  const auto a = random_prop_corpus(42, 100);
  const auto b = random_prop_corpus(42, 100);
  ASSERT_EQ(a.size(), 100U);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_string(a[i]), to_string(b[i]));
  const auto c = random_prop_corpus(43, 100);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += to_string(a[i]) == to_string(c[i]);
  EXPECT_LT(same, 100U);
  for (const auto& f : a) EXPECT_LE(prop_variables(f).size(), 3U);
}

TEST(Collapse, HomomorphismOnRandomValuations) {
  for (const char* name : {"chain4", "chain5", "stretch-bool4"}) {
    const auto A = alg(name);
    const Collapse f(A.algebra);
    const auto P = ps3();
    std::mt19937_64 rng(9);
    for (const auto& phi : random_prop_corpus(17, 200)) {
      Valuation v, fv;
      for (const auto& x : prop_variables(phi)) {
        v[x] = Elem{static_cast<std::uint8_t>(rng() % A.algebra.size())};
        fv[x] = f(v[x]);
      }
      EXPECT_EQ(f(eval_prop(A.algebra, v, phi)), eval_prop(P.algebra, fv, phi)) << name << " " << to_string(phi);
    }
  }
}

TEST(Checks, ParaconsistentAndAgreement) {
  for (const char* name : {"ps3", "chain4", "chain5"}) {
    const auto A = alg(name);
    EXPECT_TRUE(check_paraconsistent(A.algebra, A.designated).passed()) << name;
  }
  const auto b2 = alg("bool2");
  const CheckResult s = check_paraconsistent(b2.algebra, b2.designated);
  EXPECT_EQ(s.outcome, Outcome::skipped);
  const auto corpus = random_prop_corpus(1, 500);
  for (const char* name : {"chain4", "chain5", "stretch-bool4"}) {
    const auto A = alg(name);
    const CheckResult r = check_ps3_agreement(A.algebra, A.designated, corpus);
    EXPECT_TRUE(r.passed()) << name << ": " << r.summary;
  }
  EXPECT_EQ(check_ps3_agreement(b2.algebra, b2.designated, corpus).outcome, Outcome::skipped);
}
