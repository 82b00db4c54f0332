#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "avm/algebra.hpp"

namespace avm {

namespace detail {

inline bool parse_uint(std::string_view s, std::size_t& out) {
  if (s.empty() || s.size() > 6) return false;
  std::size_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  out = v;
  return true;
}

inline std::optional<unsigned> power_of_two_exponent(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) return std::nullopt;
  unsigned e = 0;
  while ((std::size_t{1} << e) != n) ++e;
  return e;
}

}  // namespace detail

inline std::vector<std::string> builtin_algebra_names() {
  return {"ps3", "bool2", "bool4", "chain3", "chain4", "chain5", "chain6", "chain7", "chain8", "stretch-bool4"};
}

// Recognises ps3, boolN (N a power of two), chainK and stretch-boolN.
inline std::optional<DesignatedAlgebra> builtin_algebra(std::string_view name) {
  std::size_t n = 0;
  if (name == "ps3") return ps3();
  if (name.starts_with("stretch-")) {
    auto base = builtin_algebra(name.substr(8));
    if (!base) return std::nullopt;
    return stretch(base->algebra);
  }
  if (name.starts_with("bool") && detail::parse_uint(name.substr(4), n)) {
    auto e = detail::power_of_two_exponent(n);
    if (!e || *e > 6) return std::nullopt;
    return boolean_algebra(*e);
  }
  if (name.starts_with("chain") && detail::parse_uint(name.substr(5), n)) {
    if (n < 2 || n > max_carrier) return std::nullopt;
    return chain_algebra(n);
  }
  return std::nullopt;
}

inline DesignatedSet parse_designated(const Algebra& alg, std::string_view text) {
  std::uint64_t m = 0;
  std::string item;
  auto flush = [&] {
    if (!item.empty()) {
      m |= std::uint64_t{1} << alg.element(item).index;
      item.clear();
    }
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '{' || c == '}' || c == '\t') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  return DesignatedSet(m);
}

// Line-oriented algebra description:
//
//   name my-algebra
//   elements zero half one
//   top one
//   bottom zero
//   meet <a> <b> <a/\b>        one line per ordered pair
//   join <a> <b> <a\/b>
//   imp  <a> <b> <a=>b>        optional; or "derive imp"
//   star <a> <a*>              optional; or "derive star"
//   designated half one
//
// '#' starts a comment. "derive imp" installs the cobounded implication and
// "derive star" the star induced by the designated set.
inline DesignatedAlgebra parse_algebra_text(std::string_view text) {
  std::string name = "custom";
  std::vector<std::string> elements;
  std::map<std::string, std::size_t> index;
  std::optional<std::string> top, bottom;
  std::vector<std::string> designated;
  std::map<std::string, std::vector<std::array<std::string, 3>>> tables;
  std::vector<std::pair<std::string, std::string>> star_entries;
  bool derive_imp = false, derive_star = false;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> InputError {
    return InputError("algebra file line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> w;
    for (std::string t; ls >> t;) w.push_back(t);
    if (w.empty()) continue;
    const std::string& key = w[0];
    if (key == "name" && w.size() == 2) {
      name = w[1];
    } else if (key == "elements" && w.size() >= 2) {
      if (!elements.empty()) throw fail("elements declared twice");
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (index.count(w[i])) throw fail("duplicate element '" + w[i] + "'");
        index[w[i]] = elements.size();
        elements.push_back(w[i]);
      }
    } else if (key == "top" && w.size() == 2) {
      top = w[1];
    } else if (key == "bottom" && w.size() == 2) {
      bottom = w[1];
    } else if (key == "designated") {
      designated.assign(w.begin() + 1, w.end());
    } else if ((key == "meet" || key == "join" || key == "imp") && w.size() == 4) {
      tables[key].push_back({w[1], w[2], w[3]});
    } else if (key == "star" && w.size() == 3) {
      star_entries.emplace_back(w[1], w[2]);
    } else if (key == "derive" && w.size() == 2 && (w[1] == "imp" || w[1] == "star")) {
      (w[1] == "imp" ? derive_imp : derive_star) = true;
    } else {
      throw fail("unrecognised directive '" + line + "'");
    }
  }
  if (elements.empty()) throw InputError("algebra file declares no elements");
  if (elements.size() > max_carrier) throw InputError("algebra file declares more than 64 elements");
  if (!top || !bottom) throw InputError("algebra file must declare top and bottom");
  const std::size_t n = elements.size();
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw InputError("unknown element identifier '" + id + "' in algebra file");
    return Elem{static_cast<std::uint8_t>(it->second)};
  };
  auto build = [&](const std::string& which) -> std::optional<Algebra::Table> {
    auto it = tables.find(which);
    if (it == tables.end()) return std::nullopt;
    Algebra::Table t(n * n);
    std::vector<bool> seen(n * n, false);
    for (const auto& [a, b, c] : it->second) {
      const std::size_t k = lookup(a).index * n + lookup(b).index;
      if (seen[k]) throw InputError(which + " table lists (" + a + ", " + b + ") twice");
      seen[k] = true;
      t[k] = lookup(c);
    }
    for (std::size_t k = 0; k < n * n; ++k) {
      if (!seen[k]) {
        throw InputError(which + " table is missing entry (" + elements[k / n] + ", " + elements[k % n] + ")");
      }
    }
    return t;
  };
  auto meet = build("meet");
  auto join = build("join");
  if (!meet || !join) throw InputError("algebra file must give total meet and join tables");
  auto imp = build("imp");
  if (imp && derive_imp) throw InputError("algebra file both lists and derives imp");
  std::optional<std::vector<Elem>> star;
  if (!star_entries.empty()) {
    if (derive_star) throw InputError("algebra file both lists and derives star");
    std::vector<Elem> s(n);
    std::vector<bool> seen(n, false);
    for (const auto& [a, b] : star_entries) {
      Elem ea = lookup(a);
      if (seen[ea.index]) throw InputError("star lists '" + a + "' twice");
      seen[ea.index] = true;
      s[ea.index] = lookup(b);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) throw InputError("star table is missing '" + elements[i] + "'");
    }
    star = std::move(s);
  }
  Algebra lattice(name, elements, *meet, *join, imp, star, lookup(*top), lookup(*bottom));
  std::vector<Elem> dmembers;
  for (const auto& id : designated) dmembers.push_back(lookup(id));
  DesignatedSet d = designated.empty() ? DesignatedSet::of({lattice.top()}) : DesignatedSet::of(dmembers);
  if (derive_imp) lattice = lattice.with_operations(name, cobounded_implication(lattice), lattice.star_table());
  if (derive_star) {
    lattice = lattice.with_operations(name, lattice.imp_table(), designated_star(lattice, d));
  }
  return DesignatedAlgebra{std::move(lattice), d, derive_star};
}

inline std::string write_algebra_text(const DesignatedAlgebra& da) {
  const Algebra& a = da.algebra;
  std::ostringstream out;
  out << "name " << a.name() << "\n";
  out << "elements";
  for (const auto& n : a.element_names()) out << ' ' << n;
  out << "\ntop " << a.name_of(a.top()) << "\nbottom " << a.name_of(a.bottom()) << "\n";
  auto table = [&](const char* key, auto&& op) {
    for (Elem x : a.elements()) {
      for (Elem y : a.elements()) out << key << ' ' << a.name_of(x) << ' ' << a.name_of(y) << ' ' << a.name_of(op(x, y)) << "\n";
    }
  };
  table("meet", [&](Elem x, Elem y) { return a.meet(x, y); });
  table("join", [&](Elem x, Elem y) { return a.join(x, y); });
  if (a.has_imp()) table("imp", [&](Elem x, Elem y) { return a.imp(x, y); });
  if (a.has_star()) {
    for (Elem x : a.elements()) out << "star " << a.name_of(x) << ' ' << a.name_of(a.star(x)) << "\n";
  }
  out << "designated";
  for (Elem e : da.designated.members()) out << ' ' << a.name_of(e);
  out << "\n";
  return out.str();
}

// Builtin name or path to an algebra file, with an optional designated override.
inline DesignatedAlgebra load_algebra(const std::string& spec, const std::string& designated = {}) {
  DesignatedAlgebra da;
  if (auto b = builtin_algebra(spec)) {
    da = std::move(*b);
  } else {
    std::ifstream f(spec);
    if (!f) throw InputError("'" + spec + "' is neither a builtin algebra nor a readable file");
    std::stringstream buf;
    buf << f.rdbuf();
    da = parse_algebra_text(buf.str());
  }
  if (!designated.empty()) da = with_designated(da, parse_designated(da.algebra, designated));
  return da;
}

}  // namespace avm
