#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "avm/formula.hpp"

namespace avm {

// Formula templates used by the sweeps. `x` (and `y` for binary ones) are
// the argument slots; `t` and `s` are parameters replaced by name constants.
inline const std::vector<std::string>& unary_battery_templates() {
  static const std::vector<std::string> t = {
      "x = t",
      "t in x",
      "x in t",
      "~(x in t)",
      "~(t in x)",
      "x in t -> false",
      "exists y. y in x",
      "~(exists y. y in x)",
      "forall y. (y in x -> y = y)",
      "exists y. (y in x /\\ (forall z. (z in y -> z in t)))",
  };
  return t;
}

inline const std::vector<std::string>& binary_battery_templates() {
  static const std::vector<std::string> t = {
      "x = y",
      "x in y",
      "y in x",
      "~(x in y)",
      "x in y -> false",
      "exists z. (z in y /\\ z = x)",
      "x = y \\/ ~(y in x)",
  };
  return t;
}

inline const std::vector<std::string>& nff_sentence_templates() {
  static const std::vector<std::string> t = {
      "t = s",
      "t in s",
      "exists x. x in t",
      "forall x. (x in t -> x in s)",
      "exists x. (x in t /\\ x = s)",
      "forall x. (x in t -> false)",
      "exists x. exists y. (x in y /\\ y = t)",
      "forall x. x = x",
      "exists x. exists y. x in y",
      "forall x. (x in t -> exists y. (y in s /\\ x = y))",
  };
  return t;
}

struct BatteryInstance {
  std::string label;
  Formula formula;
};

inline bool mentions(const Formula& f, const std::string& var) {
  const auto fv = free_variables(f);
  return std::find(fv.begin(), fv.end(), var) != fv.end();
}

// Replaces parameters t (and s) by every combination drawn from `params`.
inline std::vector<BatteryInstance> instantiate_battery(const std::vector<std::string>& templates,
                                                        const std::vector<NameId>& params) {
  std::vector<BatteryInstance> out;
  for (const auto& text : templates) {
    const Formula f = parse_formula(text);
    const bool has_t = mentions(f, "t");
    const bool has_s = mentions(f, "s");
    auto label = [&](std::string l, const char* var, NameId id) {
      return l + " [" + var + ":=#" + std::to_string(id.value) + "]";
    };
    if (!has_t && !has_s) {
      out.push_back({text, f});
      continue;
    }
    for (NameId t : params) {
      Formula ft = has_t ? substitute(f, "t", t) : f;
      std::string lt = has_t ? label(text, "t", t) : text;
      if (!has_s) {
        out.push_back({lt, ft});
        if (!has_t) break;
        continue;
      }
      for (NameId s : params) out.push_back({label(lt, "s", s), substitute(ft, "s", s)});
      if (!has_t) break;
    }
  }
  return out;
}

// The first `k` ids of the domain plus up to `k` seeded picks from the rest.
inline std::vector<NameId> name_sample(const std::vector<NameId>& domain, std::size_t k, std::uint64_t seed) {
  std::vector<NameId> out(domain.begin(), domain.begin() + static_cast<std::ptrdiff_t>(std::min(k, domain.size())));
  if (domain.size() > k) {
    std::vector<NameId> rest(domain.begin() + static_cast<std::ptrdiff_t>(k), domain.end());
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k && !rest.empty(); ++i) {
      const std::size_t j = static_cast<std::size_t>(rng() % rest.size());
      out.push_back(rest[j]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

}  // namespace avm
