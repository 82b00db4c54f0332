#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/algebra_io.hpp"
#include "avm/formula.hpp"
#include "avm/universe.hpp"
#include "avm/valuation.hpp"

using namespace avm;

namespace {

// Truth values of the three-element algebra as 0, 1, 2 (for 0, 1/2, 1),
// operated on straight from the printed tables.
int o_meet(int a, int b) { return std::min(a, b); }
int o_join(int a, int b) { return std::max(a, b); }
int o_imp(int a, int b) { return (a != 0 && b == 0) ? 0 : 2; }
int o_star(int a) { return a == 2 ? 0 : a == 1 ? 1 : 2; }

struct Tree {
  std::vector<std::pair<Tree, int>> entries;
};

Tree to_tree(const Universe& u, NameId id) {
  Tree t;
  for (const Entry& e : u.name(id).entries) t.entries.emplace_back(to_tree(u, e.key), static_cast<int>(e.value.index));
  return t;
}

int o_mem(const Tree& u, const Tree& v, bool pa);

int o_eq(const Tree& u, const Tree& v, bool pa) {
  int acc = 2;
  for (const auto& [x, a] : u.entries) {
    const int m = o_mem(x, v, pa);
    acc = o_meet(acc, o_imp(a, m));
    if (pa) acc = o_meet(acc, o_imp(o_star(m), o_star(a)));
  }
  for (const auto& [y, b] : v.entries) {
    const int m = o_mem(y, u, pa);
    acc = o_meet(acc, o_imp(b, m));
    if (pa) acc = o_meet(acc, o_imp(o_star(m), o_star(b)));
  }
  return acc;
}

int o_mem(const Tree& u, const Tree& v, bool pa) {
  int acc = 0;
  for (const auto& [y, b] : v.entries) acc = o_join(acc, o_meet(b, o_eq(y, u, pa)));
  return acc;
}

BuildOptions rank(unsigned n) {
  BuildOptions o;
  o.rank_bound = n;
  return o;
}

EvalContext ps3_context(unsigned r, Assignment a) {
  return EvalContext(build_universe(ps3_algebra(), rank(r)), ps3().designated, a);
}

}  // namespace

TEST(Oracle, PrintedTableEncoding) {
  // Index order zero, half, one matches the library's element order.
  EXPECT_EQ(ps3v::zero.index, 0);
  EXPECT_EQ(ps3v::half.index, 1);
  EXPECT_EQ(ps3v::one.index, 2);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Elem ea{static_cast<std::uint8_t>(a)}, eb{static_cast<std::uint8_t>(b)};
      EXPECT_EQ(ps3_algebra().imp(ea, eb).index, o_imp(a, b));
    }
    EXPECT_EQ(ps3_algebra().star(Elem{static_cast<std::uint8_t>(a)}).index, o_star(a));
  }
}

TEST(Atomic, AgreesWithOracleOnRankTwoAndThree) {
  for (unsigned r : {2U, 3U}) {
    const auto u = build_universe(ps3_algebra(), rank(r));
    std::vector<Tree> trees;
    for (NameId id : u->enumerated_ids()) trees.push_back(to_tree(*u, id));
    for (Assignment as : {Assignment::ba, Assignment::pa}) {
      const EvalContext ctx(u, ps3().designated, as);
      const bool pa = as == Assignment::pa;
      std::size_t mismatches = 0;
      for (std::size_t i = 0; i < trees.size(); ++i) {
        for (std::size_t j = 0; j < trees.size(); ++j) {
          const NameId a{static_cast<std::uint32_t>(i)}, b{static_cast<std::uint32_t>(j)};
          if (ctx.equal(a, b).index != o_eq(trees[i], trees[j], pa)) ++mismatches;
          if (ctx.member(a, b).index != o_mem(trees[i], trees[j], pa)) ++mismatches;
        }
      }
      EXPECT_EQ(mismatches, 0U) << "rank " << r << " " << assignment_name(as);
    }
  }
}

TEST(Atomic, EmptyNameEqualsItself) {
  for (Assignment as : {Assignment::ba, Assignment::pa}) {
    const EvalContext ctx = ps3_context(2, as);
    const NameId e = ctx.universe().empty_name();
    EXPECT_EQ(ctx.equal(e, e), ps3v::one);
    EXPECT_TRUE(ctx.is_valid(parse_formula("#0 = #0")));
  }
}

TEST(Atomic, MembershipTakesEntryValue) {
  const EvalContext ctx = ps3_context(2, Assignment::ba);
  const NameId v = ctx.universe().insert_literal("{#0: half}");
  EXPECT_EQ(ctx.member(ctx.universe().empty_name(), v), ps3v::half);
}

TEST(Atomic, HalfAndTopEntriesSeparateAssignments) {
  const EvalContext ba = ps3_context(2, Assignment::ba);
  const EvalContext pa = ba.with_assignment(Assignment::pa);
  const NameId u = ba.universe().insert_literal("{#0: half}");
  const NameId v = ba.universe().insert_literal("{#0: one}");
  EXPECT_EQ(ba.equal(u, v), ps3v::one);
  EXPECT_EQ(pa.equal(u, v), ps3v::zero);
  EXPECT_FALSE(pa.is_valid(Formula::equal(Term::constant(u), Term::constant(v))));
  // Shared memo keeps the assignments apart.
  EXPECT_EQ(ba.memo(), pa.memo());
  EXPECT_EQ(ba.equal(u, v), ps3v::one);
}

TEST(Atomic, CheckNamesAreClassical) {
  for (Assignment as : {Assignment::ba, Assignment::pa}) {
    const EvalContext ctx = ps3_context(2, as);
    const NameId one = ctx.universe().check_name(HFSet::von_neumann(1));
    const NameId two = ctx.universe().check_name(HFSet::von_neumann(2));
    EXPECT_EQ(ctx.member(one, two), ps3v::one);
    EXPECT_EQ(ctx.member(two, one), ps3v::zero);
    EXPECT_EQ(ctx.equal(one, two), ps3v::zero);
  }
}

TEST(Eval, ConstantsAndConnectives) {
  const EvalContext ctx = ps3_context(2, Assignment::pa);
  EXPECT_EQ(ctx.eval(Formula::truth()), ps3v::one);
  EXPECT_EQ(ctx.eval(Formula::falsity()), ps3v::zero);
  EXPECT_EQ(ctx.eval(parse_formula("~(#0 in #2)")), ps3v::half);
  EXPECT_EQ(ctx.eval(parse_formula("#0 in #2 /\\ #0 in #3")), ps3v::half);
  EXPECT_EQ(ctx.eval(parse_formula("#0 in #2 \\/ #0 in #3")), ps3v::one);
  EXPECT_EQ(ctx.eval(parse_formula("#0 in #3 -> #0 in #1")), ps3v::zero);
}

TEST(Eval, ParaconsistencyWitness) {
  for (Assignment as : {Assignment::ba, Assignment::pa}) {
    const EvalContext ctx = ps3_context(2, as);
    const Formula phi = parse_formula("exists x. exists y. (x in y /\\ ~(x in y))");
    const Formula psi = parse_formula("~(forall x. x = x)");
    EXPECT_EQ(ctx.eval(phi), ps3v::half);
    EXPECT_EQ(ctx.eval(Formula::neg(phi)), ps3v::half);
    EXPECT_TRUE(ctx.is_valid(phi));
    EXPECT_TRUE(ctx.is_valid(Formula::neg(phi)));
    EXPECT_EQ(ctx.eval(psi), ps3v::zero);
    EXPECT_EQ(ctx.eval(Formula::imp(Formula::conj(phi, Formula::neg(phi)), psi)), ps3v::zero);
  }
}

TEST(Eval, QuantifiersRangeOverEnumeratedNames) {
  const EvalContext ctx = ps3_context(2, Assignment::pa);
  const NameId fresh = ctx.universe().insert_literal("{#3: one}");
  const Formula f = Formula::exists("x", Formula::equal(Term::variable("x"), Term::constant(fresh)));
  // The fresh rank-3 name is not PA-equal to any rank-2 name.
  EXPECT_EQ(ctx.eval(f), ps3v::zero);
  const EvalContext wide = ctx.with_domain({ctx.universe().empty_name(), fresh});
  EXPECT_EQ(wide.eval(f), ps3v::one);
}

TEST(Eval, EnvironmentBindsFreeVariables) {
  const EvalContext ctx = ps3_context(2, Assignment::ba);
  EXPECT_EQ(ctx.eval(parse_formula("x in y"), Env{{"x", NameId{0}}, {"y", NameId{2}}}), ps3v::half);
  EXPECT_THROW(ctx.eval(parse_formula("x in y"), Env{{"x", NameId{0}}}), InputError);
  EXPECT_THROW(ctx.eval(parse_formula("x in y"), Env{{"x", NameId{0}}, {"y", NameId{400}}}), InputError);
}

TEST(Eval, ShortCircuitMatchesFullEvaluation) {
  // Quantifier and connective short-circuits must not change values.
  const auto u = build_universe(ps3_algebra(), rank(3));
  const EvalContext ctx(u, ps3().designated, Assignment::pa);
  const auto ids = u->enumerated_ids();
  const Formula body = parse_formula("x in y /\\ ~(y = x)");
  for (NameId y : {NameId{0}, NameId{2}, NameId{17}, NameId{200}}) {
    Elem acc = ps3v::zero;
    for (NameId x : ids) acc = ps3_algebra().join(acc, ctx.eval(body, Env{{"x", x}, {"y", y}}));
    EXPECT_EQ(ctx.eval(parse_formula("exists x. (x in y /\\ ~(y = x))"), Env{{"y", y}}), acc);
  }
}

TEST(Bq, NamedExamples) {
  const EvalContext ctx = ps3_context(2, Assignment::pa);
  const NameId u = NameId{2};
  const BqResult t = ctx.check_bq(u, parse_formula("x = x"), "x");
  EXPECT_EQ(t.lhs, ps3v::one);
  EXPECT_EQ(t.rhs, ps3v::one);
  const BqResult f = ctx.check_bq(u, Formula::falsity(), "x");
  EXPECT_EQ(f.lhs, ps3v::zero);
  EXPECT_EQ(f.rhs, ps3v::zero);
  EXPECT_TRUE(f.holds());
}

TEST(Capabilities, ParaconsistentNeedsStar) {
  const Algebra& P = ps3_algebra();
  const Algebra bare = P.with_operations("nostar", P.imp_table(), std::nullopt);
  const EvalContext pa(build_universe(bare, rank(2)), ps3().designated, Assignment::pa);
  EXPECT_THROW(pa.equal(NameId{0}, NameId{1}), CapabilityError);
  const EvalContext ba = pa.with_assignment(Assignment::ba);
  EXPECT_EQ(ba.equal(NameId{2}, NameId{3}), ps3v::one);
  const Algebra noimp = P.with_operations("noimp", std::nullopt, P.star_table());
  const EvalContext c(build_universe(noimp, rank(2)), ps3().designated, Assignment::ba);
  EXPECT_THROW(c.equal(NameId{0}, NameId{1}), CapabilityError);
}

TEST(Boolean, AssignmentsCoincideOnTwoElementAlgebra) {
  const auto da = *builtin_algebra("bool2");
  const auto u = build_universe(da.algebra, rank(3));
  const EvalContext ba(u, da.designated, Assignment::ba);
  const EvalContext pa = ba.with_assignment(Assignment::pa);
  for (NameId a : u->enumerated_ids()) {
    for (NameId b : u->enumerated_ids()) {
      EXPECT_EQ(ba.equal(a, b), pa.equal(a, b));
      EXPECT_EQ(ba.member(a, b), pa.member(a, b));
    }
  }
}

TEST(Memo, DenseAndSparseAgree) {
  const auto u = build_universe(ps3_algebra(), rank(3));
  const EvalContext dense(u, ps3().designated, Assignment::pa);
  const EvalContext sparse(u, ps3().designated, Assignment::pa, std::make_shared<AtomicMemo>(0));
  EXPECT_EQ(sparse.memo()->dense_bound(), 0U);
  for (std::uint32_t i = 0; i < 256; i += 7) {
    for (std::uint32_t j = 0; j < 256; j += 5) {
      EXPECT_EQ(dense.equal(NameId{i}, NameId{j}), sparse.equal(NameId{i}, NameId{j}));
      EXPECT_EQ(dense.member(NameId{i}, NameId{j}), sparse.member(NameId{i}, NameId{j}));
    }
  }
}
