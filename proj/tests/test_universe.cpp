#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "avm/algebra.hpp"
#include "avm/algebra_io.hpp"
#include "avm/universe.hpp"

using namespace avm;

namespace {

// Independent enumeration: a name is rendered canonically as the sorted list
// of "child:value" strings, and each level is every partial map from the
// previous level into the carrier.
std::vector<std::set<std::string>> oracle_levels(std::size_t carrier, unsigned rank) {
  std::vector<std::set<std::string>> levels{{"{}"}};
  for (unsigned n = 2; n <= rank; ++n) {
    const std::vector<std::string> prev(levels.back().begin(), levels.back().end());
    std::set<std::string> next;
    std::vector<std::size_t> choice(prev.size(), 0);  // 0 = absent, k = value k-1
    for (;;) {
      std::string s = "{";
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (choice[i] == 0) continue;
        s += prev[i] + ":" + std::to_string(choice[i] - 1) + ";";
      }
      next.insert(s + "}");
      std::size_t i = 0;
      while (i < choice.size() && ++choice[i] == carrier + 1) choice[i++] = 0;
      if (i == choice.size()) break;
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

std::string render(const Universe& u, NameId id) {
  std::vector<std::string> parts;
  for (const Entry& e : u.name(id).entries) parts.push_back(render(u, e.key) + ":" + std::to_string(e.value.index) + ";");
  std::sort(parts.begin(), parts.end());
  std::string s = "{";
  for (const auto& p : parts) s += p;
  return s + "}";
}

BuildOptions rank(unsigned n) {
  BuildOptions o;
  o.rank_bound = n;
  return o;
}

}  // namespace

TEST(Oracle, SingleValueCarrierDoubles) {
  const auto levels = oracle_levels(1, 4);
  EXPECT_EQ(levels[1].size(), 2U);
  EXPECT_EQ(levels[2].size(), 4U);
  EXPECT_EQ(levels[3].size(), 16U);
}

TEST(Enumeration, Ps3RankSizes) {
  const auto u = build_universe(ps3_algebra(), rank(3));
  EXPECT_EQ(u->rank_sizes(), (std::vector<std::size_t>{1, 4, 256}));
  EXPECT_EQ(u->enumerated_size(), 256U);
  EXPECT_EQ(u->rank_bound(), 3U);
  const auto levels = oracle_levels(3, 3);
  EXPECT_EQ(levels[1].size(), 4U);
  EXPECT_EQ(levels[2].size(), 256U);
}

TEST(Enumeration, TwoChainRankSizes) {
  const Algebra c2 = chain_algebra(2).algebra;
  const auto u = build_universe(c2, rank(3));
  const auto levels = oracle_levels(2, 3);
  ASSERT_EQ(u->rank_sizes().size(), levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) EXPECT_EQ(u->rank_sizes()[i], levels[i].size());
  EXPECT_EQ(u->rank_sizes(), (std::vector<std::size_t>{1, 3, 27}));
}

TEST(Enumeration, ContentMatchesOracle) {
  for (const char* name : {"ps3", "chain2", "chain4", "bool4"}) {
    const Algebra A = builtin_algebra(name)->algebra;
    const unsigned r = A.size() > 3 ? 2 : 3;
    const auto u = build_universe(A, rank(r));
    std::set<std::string> got;
    for (NameId id : u->enumerated_ids()) got.insert(render(*u, id));
    EXPECT_EQ(got.size(), u->enumerated_size()) << name;
    EXPECT_EQ(got, oracle_levels(A.size(), r).back()) << name;
  }
}

TEST(Enumeration, RankOneIsEmptyNameOnly) {
  const auto u = build_universe(ps3_algebra(), rank(1));
  EXPECT_EQ(u->enumerated_size(), 1U);
  EXPECT_TRUE(u->name(u->empty_name()).entries.empty());
  EXPECT_EQ(u->name(u->empty_name()).rank, 1U);
}

TEST(Enumeration, Ps3RankTwoOrderIsStable) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  EXPECT_EQ(u->format(NameId{1}), "{#0: zero}");
  EXPECT_EQ(u->format(NameId{2}), "{#0: half}");
  EXPECT_EQ(u->format(NameId{3}), "{#0: one}");
}

TEST(Enumeration, BudgetErrorNamesRank) {
  BuildOptions o = rank(4);
  o.budget = 1000;
  try {
    build_universe(ps3_algebra(), o);
    FAIL() << "expected a resource error";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("rank 4"), std::string::npos) << e.what();
  }
}

TEST(Enumeration, ValueRestrictionAndDomainCap) {
  BuildOptions o = rank(3);
  o.value_restriction = std::vector<Elem>{ps3v::one};
  const auto u = build_universe(ps3_algebra(), o);
  EXPECT_EQ(u->rank_sizes(), (std::vector<std::size_t>{1, 2, 4}));
  BuildOptions c = rank(3);
  c.domain_cap = 1;
  // Maps defined on at most one of the 4 rank-2 names: 1 + 4*3.
  EXPECT_EQ(build_universe(ps3_algebra(), c)->enumerated_size(), 13U);
}

TEST(Interning, SameEntriesSameId) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  EXPECT_EQ(u->insert_name({}), u->empty_name());
  const NameId a = u->insert_name({Entry{u->empty_name(), ps3v::half}});
  const NameId b = u->insert_name({Entry{u->empty_name(), ps3v::half}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, NameId{2});
}

TEST(Interning, RankIsOneMoreThanKeys) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  const NameId w = NameId{3};
  const NameId fresh = u->insert_name({Entry{w, ps3v::half}});
  EXPECT_EQ(u->name(fresh).rank, u->name(w).rank + 1);
  EXPECT_GE(fresh.value, u->enumerated_size());
  EXPECT_EQ(u->describe(fresh), "{#3: half}");
  const NameId deeper = u->insert_name({Entry{fresh, ps3v::one}});
  EXPECT_EQ(u->describe(deeper), "{{#3: half}: one}");
}

TEST(Interning, Errors) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  EXPECT_THROW(u->insert_name({Entry{NameId{99}, ps3v::one}}), InputError);
  EXPECT_THROW(u->insert_name({Entry{NameId{1}, ps3v::one}, Entry{NameId{1}, ps3v::half}}), InputError);
  EXPECT_THROW(u->insert_name({Entry{NameId{1}, Elem{9}}}), InputError);
  EXPECT_THROW(u->name(NameId{1000}), InputError);
  try {
    u->name(NameId{1000});
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown name constant"), std::string::npos);
  }
}

TEST(Literals, ParseAndInsert) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  EXPECT_EQ(u->insert_literal("{#0: half}"), NameId{2});
  EXPECT_EQ(u->insert_literal("{}"), u->empty_name());
  const NameId two = u->insert_literal("{#1: one, #3: zero}");
  EXPECT_EQ(u->format(two), "{#1: one, #3: zero}");
  EXPECT_THROW(u->insert_literal("{#0 half}"), ParseError);
  EXPECT_THROW(u->insert_literal("{#0: two}"), InputError);
  EXPECT_THROW(u->insert_literal("{#77: one}"), InputError);
  EXPECT_THROW(u->insert_literal("{#0: one} x"), ParseError);
}

TEST(HFSets, ParseAndVonNeumann) {
  EXPECT_EQ(HFSet::parse("{}"), HFSet{});
  EXPECT_EQ(HFSet::parse("{{}, {}}").members().size(), 1U);
  EXPECT_EQ(HFSet::von_neumann(2), HFSet::parse("{{},{{}}}"));
  EXPECT_EQ(HFSet::von_neumann(3).to_string(), "{{},{{}},{{},{{}}}}");
  EXPECT_THROW(HFSet::parse("{"), ParseError);
  EXPECT_THROW(HFSet::parse("{}}"), ParseError);
}

TEST(CheckNames, StructureFollowsSet) {
  const auto u = build_universe(ps3_algebra(), rank(2));
  EXPECT_EQ(u->check_name(HFSet{}), u->empty_name());
  const NameId one = u->check_name(HFSet::von_neumann(1));
  EXPECT_EQ(u->format(one), "{#0: one}");
  EXPECT_EQ(one, NameId{3});
  const NameId two = u->check_name(HFSet::von_neumann(2));
  const Name& n = u->name(two);
  ASSERT_EQ(n.entries.size(), 2U);
  EXPECT_EQ(n.entries[0].key, u->empty_name());
  EXPECT_EQ(n.entries[1].key, one);
  for (const Entry& e : n.entries) EXPECT_EQ(e.value, ps3v::one);
  EXPECT_EQ(n.value_at(one), ps3v::one);
  EXPECT_FALSE(n.value_at(NameId{1}));
}

TEST(Counting, MatchesEnumeration) {
  EXPECT_DOUBLE_EQ(Universe::count_maps(4, 3, std::nullopt), 256.0);
  EXPECT_DOUBLE_EQ(Universe::count_maps(4, 3, 1), 13.0);
  EXPECT_DOUBLE_EQ(Universe::count_maps(2, 2, std::nullopt), 9.0);
}
