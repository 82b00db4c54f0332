#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/algebra_io.hpp"

using namespace avm;

namespace {

// Tables as printed for the three-element algebra, rows and columns in the
// order 1, 1/2, 0.
const char* const ps3_order[] = {"one", "half", "zero"};
const char* const ps3_meet[3][3] = {{"one", "half", "zero"}, {"half", "half", "zero"}, {"zero", "zero", "zero"}};
const char* const ps3_join[3][3] = {{"one", "one", "one"}, {"one", "half", "half"}, {"one", "half", "zero"}};
const char* const ps3_imp[3][3] = {{"one", "one", "zero"}, {"one", "one", "zero"}, {"one", "one", "one"}};

// A finite poset given by an explicit order predicate; least upper bounds
// and greatest lower bounds are found by brute force.
struct OrderOracle {
  std::size_t n;
  std::function<bool(std::size_t, std::size_t)> leq;

  std::size_t lub(std::uint64_t mask) const {
    std::vector<std::size_t> ups;
    for (std::size_t c = 0; c < n; ++c) {
      bool upper = true;
      for (std::size_t a = 0; a < n; ++a) {
        if ((mask >> a & 1U) && !leq(a, c)) upper = false;
      }
      if (upper) ups.push_back(c);
    }
    for (std::size_t c : ups) {
      bool least = true;
      for (std::size_t d : ups) least = least && leq(c, d);
      if (least) return c;
    }
    ADD_FAILURE() << "no least upper bound";
    return 0;
  }

  std::size_t glb(std::uint64_t mask) const {
    std::vector<std::size_t> lows;
    for (std::size_t c = 0; c < n; ++c) {
      bool lower = true;
      for (std::size_t a = 0; a < n; ++a) {
        if ((mask >> a & 1U) && !leq(c, a)) lower = false;
      }
      if (lower) lows.push_back(c);
    }
    for (std::size_t c : lows) {
      bool greatest = true;
      for (std::size_t d : lows) greatest = greatest && leq(d, c);
      if (greatest) return c;
    }
    ADD_FAILURE() << "no greatest lower bound";
    return 0;
  }

  std::size_t top() const { return glb(0); }
  std::size_t bottom() const { return lub(0); }

  // No subset avoiding top joins to top, and none avoiding bottom meets to bottom.
  bool cobounded() const {
    const std::size_t t = top(), b = bottom();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      if (!(m >> t & 1U) && lub(m) == t) return false;
      if (!(m >> b & 1U) && glb(m) == b) return false;
    }
    return true;
  }
};

OrderOracle oracle_for(const Algebra& alg) {
  // The order is recovered from the join table alone, independently of meet.
  return OrderOracle{alg.size(), [&alg](std::size_t a, std::size_t b) {
                       return alg.join(Elem{static_cast<std::uint8_t>(a)}, Elem{static_cast<std::uint8_t>(b)}) ==
                              Elem{static_cast<std::uint8_t>(b)};
                     }};
}

}  // namespace

TEST(Ps3, TablesMatchPrintedValues) {
  const auto P = ps3();
  const Algebra& A = P.algebra;
  ASSERT_EQ(A.size(), 3U);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Elem a = A.element(ps3_order[i]);
      const Elem b = A.element(ps3_order[j]);
      EXPECT_EQ(A.name_of(A.meet(a, b)), ps3_meet[i][j]) << ps3_order[i] << " meet " << ps3_order[j];
      EXPECT_EQ(A.name_of(A.join(a, b)), ps3_join[i][j]) << ps3_order[i] << " join " << ps3_order[j];
      EXPECT_EQ(A.name_of(A.imp(a, b)), ps3_imp[i][j]) << ps3_order[i] << " imp " << ps3_order[j];
    }
  }
}

TEST(Ps3, StarFollowsDesignatedRule) {
  const Algebra& A = ps3_algebra();
  EXPECT_EQ(A.star(ps3v::one), ps3v::zero);
  EXPECT_EQ(A.star(ps3v::half), ps3v::half);
  EXPECT_EQ(A.star(ps3v::zero), ps3v::one);
  EXPECT_EQ(designated_star(A, ps3().designated), *A.star_table());
}

TEST(Ps3, NamedExamples) {
  const Algebra& A = ps3_algebra();
  EXPECT_EQ(A.meet(ps3v::half, ps3v::one), ps3v::half);
  EXPECT_EQ(A.imp(ps3v::half, ps3v::zero), ps3v::zero);
  EXPECT_EQ(A.meet(A.top(), A.top()), A.top());
  const std::vector<Elem> all{ps3v::one, ps3v::half, ps3v::zero};
  EXPECT_EQ(A.big_meet(all), ps3v::zero);
  const std::vector<Elem> low{ps3v::half, ps3v::zero};
  EXPECT_EQ(A.big_join(low), ps3v::half);
  EXPECT_EQ(A.big_meet(std::span<const Elem>{}), A.top());
  EXPECT_EQ(A.big_join(std::span<const Elem>{}), A.bottom());
  EXPECT_TRUE(A.leq(ps3v::zero, ps3v::half));
  EXPECT_FALSE(A.leq(ps3v::one, ps3v::half));
}

TEST(Ps3, PassesEveryStructuralCheck) {
  const auto P = ps3();
  EXPECT_TRUE(check_lattice(P.algebra).holds("distributive"));
  EXPECT_TRUE(check_drim(P.algebra).holds("drim"));
  EXPECT_TRUE(check_cobounded(P.algebra).holds("cobounded"));
  const auto f = check_filter(P.algebra, P.designated);
  EXPECT_TRUE(f.holds("filter"));
  EXPECT_TRUE(f.holds("ultrafilter"));
  EXPECT_TRUE(f.holds("ultra-designated-cobounded"));
  const auto prof = profile(P.algebra, P.designated);
  ASSERT_TRUE(prof.coatom);
  EXPECT_EQ(*prof.coatom, ps3v::half);
}

TEST(Filters, Ps3Designations) {
  const Algebra& A = ps3_algebra();
  auto f1 = check_filter(A, DesignatedSet::of({ps3v::one}));
  EXPECT_TRUE(f1.holds("filter"));
  EXPECT_FALSE(f1.holds("ultrafilter"));
  auto f2 = check_filter(A, DesignatedSet::of({ps3v::half}));
  EXPECT_FALSE(f2.holds("filter"));
  EXPECT_THROW(with_designated(ps3(), DesignatedSet::of({ps3v::half})), InputError);
}

TEST(Lattice, BuiltinsAreDistributive) {
  for (const auto& name : builtin_algebra_names()) {
    const auto da = *builtin_algebra(name);
    const auto rep = check_lattice(da.algebra);
    EXPECT_TRUE(rep.holds("lattice")) << name;
    EXPECT_TRUE(rep.holds("distributive")) << name;
    EXPECT_TRUE(rep.holds("bounded")) << name;
  }
}

TEST(Lattice, CommutativityDefectHasWitness) {
  const Algebra& P = ps3_algebra();
  Algebra::Table join = P.join_table();
  join[ps3v::zero.index * 3 + ps3v::half.index] = ps3v::one;
  const Algebra bad("broken", P.element_names(), P.meet_table(), join, std::nullopt, std::nullopt, P.top(),
                    P.bottom());
  const auto rep = check_lattice(bad);
  const LawVerdict* v = rep.find("join-commutative");
  ASSERT_NE(v, nullptr);
  EXPECT_FALSE(v->holds);
  ASSERT_EQ(v->witness.size(), 2U);
  EXPECT_NE(bad.join(v->witness[0], v->witness[1]), bad.join(v->witness[1], v->witness[0]));
  EXPECT_FALSE(rep.holds("lattice"));
}

TEST(Cobounded, NamedVerdicts) {
  const std::map<std::string, bool> expected{{"ps3", true}, {"bool4", false}, {"bool2", true}, {"stretch-bool4", true}};
  for (const auto& [name, want] : expected) {
    EXPECT_EQ(check_cobounded(builtin_algebra(name)->algebra).holds("cobounded"), want) << name;
  }
}

TEST(Cobounded, SearchAndClosedFormAgreeWithOracle) {
  std::vector<std::string> names = builtin_algebra_names();
  names.push_back("bool8");
  names.push_back("chain2");
  for (const auto& name : names) {
    const Algebra A = builtin_algebra(name)->algebra;
    const auto rep = check_cobounded(A);
    const bool oracle = oracle_for(A).cobounded();
    EXPECT_EQ(rep.holds("cobounded-join-subset") && rep.holds("cobounded-meet-subset"), oracle) << name;
    EXPECT_EQ(rep.holds("cobounded-join-closed-form") && rep.holds("cobounded-meet-closed-form"), oracle) << name;
  }
}

TEST(Cobounded, OracleLubMatchesTables) {
  for (const auto& name : builtin_algebra_names()) {
    const Algebra A = builtin_algebra(name)->algebra;
    const OrderOracle o = oracle_for(A);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << A.size()); ++m) {
      EXPECT_EQ(A.big_join_mask(m).index, o.lub(m)) << name;
      EXPECT_EQ(A.big_meet_mask(m).index, o.glb(m)) << name;
    }
  }
}

TEST(Cobounded, ImplicationIsCollapsing) {
  for (const char* name : {"ps3", "chain4", "chain6", "stretch-bool4"}) {
    const Algebra A = builtin_algebra(name)->algebra;
    for (Elem a : A.elements()) {
      for (Elem b : A.elements()) {
        const bool low = a != A.bottom() && b == A.bottom();
        EXPECT_EQ(A.imp(a, b), low ? A.bottom() : A.top()) << name;
      }
    }
  }
}

TEST(Cobounded, Bool4WitnessIsTwoAtoms) {
  const Algebra A = builtin_algebra("bool4")->algebra;
  const auto rep = check_cobounded(A);
  const LawVerdict* v = rep.find("cobounded-join-subset");
  ASSERT_NE(v, nullptr);
  EXPECT_FALSE(v->holds);
  EXPECT_EQ(v->witness.size(), 2U);
  EXPECT_EQ(A.big_join(v->witness), A.top());
}

TEST(Drim, HoldsExhaustivelyOnBuiltins) {
  for (const char* name : {"ps3", "bool2", "bool4", "chain3", "chain4", "chain5", "chain6"}) {
    EXPECT_TRUE(check_drim(builtin_algebra(name)->algebra).holds("drim")) << name;
  }
}

TEST(Drim, ChainWithTAlgebraStar) {
  const auto da = chain_algebra(3, std::nullopt, StarVariant::t_algebra);
  EXPECT_TRUE(check_drim(da.algebra).holds("drim"));
  EXPECT_EQ(da.algebra.star(da.algebra.element("a")), da.algebra.element("a"));
}

TEST(Constructors, TwoChainIsTwoElementBoolean) {
  const Algebra c = chain_algebra(2).algebra;
  const Algebra b = boolean_algebra(1).algebra;
  ASSERT_EQ(c.size(), b.size());
  EXPECT_EQ(c.meet_table(), b.meet_table());
  EXPECT_EQ(c.join_table(), b.join_table());
  EXPECT_EQ(*c.imp_table(), *b.imp_table());
  EXPECT_EQ(*c.star_table(), *b.star_table());
  EXPECT_EQ(c.top(), b.top());
  EXPECT_EQ(c.bottom(), b.bottom());
}

TEST(Constructors, StretchOfTwoElementIsCoboundedFourChain) {
  const auto s = stretch(boolean_algebra(1).algebra);
  EXPECT_EQ(s.algebra.size(), 4U);
  EXPECT_TRUE(check_cobounded(s.algebra).holds("cobounded"));
  // Totally ordered: every pair is comparable.
  for (Elem a : s.algebra.elements()) {
    for (Elem b : s.algebra.elements()) EXPECT_TRUE(s.algebra.leq(a, b) || s.algebra.leq(b, a));
  }
}

TEST(Constructors, DesignatedCoboundedOnDiamondFails) {
  const Algebra lat = boolean_algebra(2).algebra;
  const auto da = designated_cobounded(lat, DesignatedSet::of({lat.top()}));
  EXPECT_FALSE(profile(da.algebra, da.designated).cobounded);
}

TEST(Collapse, MapsBoundsAndMiddle) {
  const Algebra A = chain_algebra(5).algebra;
  const Collapse f(A);
  EXPECT_EQ(f(A.element("b")), ps3v::half);
  EXPECT_EQ(f(A.top()), ps3v::one);
  EXPECT_EQ(f(A.bottom()), ps3v::zero);
  const Elem a = A.element("a");
  EXPECT_EQ(f(A.imp(a, A.bottom())), ps3_algebra().imp(f(a), f(A.bottom())));
  EXPECT_EQ(f(A.imp(a, A.bottom())), ps3v::zero);
  EXPECT_EQ(f(f.section(ps3v::half)), ps3v::half);
  EXPECT_THROW(Collapse(builtin_algebra("bool4")->algebra), CapabilityError);
}

TEST(Collapse, IsHomomorphismOnChains) {
  const Algebra& P = ps3_algebra();
  for (std::size_t k = 3; k <= 7; ++k) {
    const Algebra A = chain_algebra(k).algebra;
    const Collapse f(A);
    for (Elem a : A.elements()) {
      for (Elem b : A.elements()) {
        EXPECT_EQ(f(A.meet(a, b)), P.meet(f(a), f(b)));
        EXPECT_EQ(f(A.join(a, b)), P.join(f(a), f(b)));
        EXPECT_EQ(f(A.imp(a, b)), P.imp(f(a), f(b)));
      }
      EXPECT_EQ(f(A.star(a)), P.star(f(a)));
    }
  }
}

TEST(AlgebraIo, RoundTripThroughText) {
  for (const auto& name : builtin_algebra_names()) {
    const auto da = *builtin_algebra(name);
    const auto back = parse_algebra_text(write_algebra_text(da));
    EXPECT_EQ(back.algebra.element_names(), da.algebra.element_names()) << name;
    EXPECT_EQ(back.algebra.meet_table(), da.algebra.meet_table()) << name;
    EXPECT_EQ(back.algebra.join_table(), da.algebra.join_table()) << name;
    EXPECT_EQ(back.algebra.imp_table(), da.algebra.imp_table()) << name;
    EXPECT_EQ(back.algebra.star_table(), da.algebra.star_table()) << name;
    EXPECT_EQ(back.designated.mask(), da.designated.mask()) << name;
  }
}

TEST(AlgebraIo, LoadsSampleFiles) {
  const auto diamond = load_algebra(std::string(AVM_TEST_DATA) + "/diamond.alg");
  EXPECT_EQ(diamond.algebra.name(), "diamond");
  EXPECT_TRUE(check_lattice(diamond.algebra).holds("distributive"));
  // Derived operations are the collapsing implication and designated star,
  // not the Boolean complement.
  EXPECT_FALSE(check_boolean(diamond.algebra).holds("boolean"));
  EXPECT_EQ(diamond.algebra.star(diamond.algebra.element("left")), diamond.algebra.top());
  EXPECT_FALSE(check_cobounded(diamond.algebra).holds("cobounded"));
  const auto s = load_algebra(std::string(AVM_TEST_DATA) + "/stretched.alg");
  const auto prof = profile(s.algebra, s.designated);
  EXPECT_TRUE(prof.ultra_designated_cobounded);
  EXPECT_EQ(s.algebra.name_of(*prof.coatom), "m2");
}

TEST(AlgebraIo, DesignatedOverride) {
  const auto da = load_algebra("chain4", "b,one");
  EXPECT_EQ(format_designated(da.algebra, da.designated), "{b,one}");
  EXPECT_EQ(da.algebra.star(da.algebra.element("a")), da.algebra.top());
  EXPECT_THROW(load_algebra("chain4", "a"), InputError);
  EXPECT_THROW(load_algebra("chain4", "nope"), InputError);
}

TEST(AlgebraIo, RejectsMalformedInput) {
  EXPECT_THROW(load_algebra("no-such-algebra"), InputError);
  EXPECT_THROW(parse_algebra_text("elements a b\ntop b\nbottom a\n"), InputError);
  EXPECT_THROW(parse_algebra_text("elements a a\n"), InputError);
  EXPECT_THROW(parse_algebra_text("elements a b\nbogus line\n"), InputError);
}

TEST(AlgebraErrors, UnknownElementAndBadTables) {
  const Algebra& P = ps3_algebra();
  EXPECT_THROW(P.element("two"), InputError);
  EXPECT_FALSE(P.find("two"));
  EXPECT_THROW(P.require(Elem{7}), InputError);
  const Algebra lat = P.with_operations("bare", std::nullopt, std::nullopt);
  EXPECT_THROW(lat.imp(P.top(), P.top()), CapabilityError);
  EXPECT_THROW(lat.star(P.top()), CapabilityError);
  Algebra::Table short_table(4, Elem{0});
  EXPECT_THROW(Algebra("x", {"a", "b", "c"}, short_table, P.join_table(), std::nullopt, std::nullopt, Elem{0}, Elem{1}),
               InputError);
}
