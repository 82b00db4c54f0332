#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "avm/algebra.hpp"
#include "avm/algebra_io.hpp"
#include "avm/check_result.hpp"
#include "avm/error.hpp"
#include "avm/formula.hpp"
#include "avm/prop_logic.hpp"
#include "avm/quotient.hpp"
#include "avm/theorems.hpp"
#include "avm/universe.hpp"
#include "avm/valuation.hpp"

namespace avm::cli {

enum class Format { text, records };

struct RunConfig {
  std::string algebra = "ps3";
  std::string designated;
  unsigned rank = 2;
  std::size_t budget = BuildOptions{}.budget;
  Assignment assignment = Assignment::pa;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  Format format = Format::text;
  std::size_t corpus_size = 500;
};

struct CheckSpec {
  std::string name;
  std::string help;
  bool needs_universe = true;
  std::function<CheckResult(const RunConfig&, const DesignatedAlgebra&, const EvalContext*)> run;
};

namespace detail {

inline SuiteOptions suite_options(const RunConfig& cfg) {
  SuiteOptions o;
  o.seed = cfg.seed;
  return o;
}

inline CheckResult quotient_check(const std::string& name, const EvalContext& ctx, const RunConfig& cfg,
                                  const std::function<CheckResult(const QuotientModel&)>& body) {
  const AlgebraProfile prof = profile(ctx.algebra(), ctx.designated());
  if (!prof.ultra_designated_cobounded) {
    return CheckResult::skipped(name, avm::detail::subject_of(ctx), "needs an ultra-designated cobounded algebra");
  }
  try {
    return body(build_quotient(ctx, cfg.seed));
  } catch (const InvariantError& e) {
    CheckResult r;
    r.check = name;
    r.subject = avm::detail::subject_of(ctx);
    r.fail("quotient construction failed", {{"error", e.what()}});
    return r;
  }
}

}  // namespace detail

inline const std::vector<CheckSpec>& check_registry() {
  using SuiteFn = CheckResult (*)(const EvalContext&, const SuiteOptions&);
  auto suite = [](std::string name, std::string help, SuiteFn fn) {
    return CheckSpec{std::move(name), std::move(help), true,
                     [fn](const RunConfig& cfg, const DesignatedAlgebra&, const EvalContext* ctx) {
                       return fn(*ctx, detail::suite_options(cfg));
                     }};
  };
  static const std::vector<CheckSpec> registry = {
      suite("equality-characterization",
            "PA equality is two-valued and agrees with its description via designated and top entries",
            &check_equality_characterization),
      suite("extensionality-contrast",
            "a pair that BA identifies is separated by PA, refuting plain extensionality but not the barred form",
            &check_extensionality_contrast),
      suite("zfbar-witnesses",
            "explicit witness names for the barred ZF axioms are valid under PA; BA separation contrast recorded",
            &check_zfbar_witnesses),
      CheckSpec{"nff-transfer",
                "collapsing onto PS3 commutes with BA evaluation of negation-free sentences", true,
                [](const RunConfig& cfg, const DesignatedAlgebra&, const EvalContext* ctx) {
                  return check_nff_transfer(*ctx, detail::suite_options(cfg), cfg.budget);
                }},
      suite("paraconsistency",
            "a sentence and its negation both take the coatom while explosion takes bottom, under BA and PA",
            &check_paraconsistency),
      suite("properties-lemma",
            "reflexivity, designated members, transitivity and both membership substitutions for PA equality",
            &check_properties_lemma),
      suite("leibniz", "PA-equal names are interchangeable in the battery; a BA violation is exhibited",
            &check_leibniz),
      suite("bq-identity", "bounded universal quantification equals the meet over the name's entries under PA",
            &check_bq_identity),
      suite("boolean-coincidence", "on Boolean algebras BA and PA agree on atoms and on sentence validity",
            &check_boolean_coincidence),
      CheckSpec{"quotient-relations",
                "the quotient by PA equality: equality is the identity, neq its complement, mem and nmem overlap",
                true,
                [](const RunConfig& cfg, const DesignatedAlgebra&, const EvalContext* ctx) {
                  return detail::quotient_check("quotient-relations", *ctx, cfg,
                                                [](const QuotientModel& q) { return check_quotient_relations(q); });
                }},
      CheckSpec{"quotient-connectives",
                "satisfaction in the quotient commutes with the connectives except the converse for negation", true,
                [](const RunConfig& cfg, const DesignatedAlgebra&, const EvalContext* ctx) {
                  return detail::quotient_check("quotient-connectives", *ctx, cfg, [&](const QuotientModel& q) {
                    return check_connective_theorem(q, detail::suite_options(cfg));
                  });
                }},
      CheckSpec{"prop-paraconsistent", "(p /\\ ~p) -> q is refuted propositionally by a designated non-top value",
                false,
                [](const RunConfig&, const DesignatedAlgebra& da, const EvalContext*) {
                  return check_paraconsistent(da.algebra, da.designated);
                }},
      CheckSpec{"ps3-agreement",
                "propositional tautologies agree with PS3 on a seeded random corpus, valuations transfer both ways",
                false,
                [](const RunConfig& cfg, const DesignatedAlgebra& da, const EvalContext*) {
                  return check_ps3_agreement(da.algebra, da.designated,
                                             random_prop_corpus(cfg.seed, cfg.corpus_size));
                }},
  };
  return registry;
}

inline const CheckSpec* find_check(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

inline std::shared_ptr<Universe> build_for(const RunConfig& cfg, const DesignatedAlgebra& da,
                                           std::optional<std::size_t> domain_cap = std::nullopt) {
  BuildOptions bo;
  bo.rank_bound = cfg.rank;
  bo.budget = cfg.budget;
  bo.domain_cap = domain_cap;
  return build_universe(da.algebra, bo);
}

// Each job gets its own universe so results do not depend on scheduling.
inline CheckResult run_check(const CheckSpec& spec, const RunConfig& cfg, const DesignatedAlgebra& da) {
  if (!spec.needs_universe) return timed([&] { return spec.run(cfg, da, nullptr); });
  std::shared_ptr<Universe> u;
  try {
    u = build_for(cfg, da);
  } catch (const ResourceError& e) {
    return CheckResult::skipped(spec.name, da.algebra.name() + " D=" + format_designated(da.algebra, da.designated),
                                std::string("universe exceeds budget: ") + e.what());
  }
  const EvalContext ctx(u, da.designated, cfg.assignment);
  return timed([&] { return spec.run(cfg, da, &ctx); });
}

inline std::vector<CheckResult> run_checks(const std::vector<const CheckSpec*>& specs, const RunConfig& cfg,
                                           const DesignatedAlgebra& da) {
  std::vector<std::optional<CheckResult>> slots(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
      try {
        slots[i] = run_check(*specs[i], cfg, da);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

namespace detail {

inline void print_results(const std::vector<CheckResult>& rs, const RunConfig& cfg, std::ostream& out) {
  std::size_t pass = 0, fail = 0, skip = 0;
  for (const auto& r : rs) {
    out << (cfg.format == Format::records ? to_record(r) : to_text(r)) << "\n";
    (r.outcome == Outcome::pass ? pass : r.outcome == Outcome::fail ? fail : skip)++;
  }
  if (cfg.format == Format::text) {
    out << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
  }
}

inline int exit_code(const std::vector<CheckResult>& rs) {
  for (const auto& r : rs) {
    if (r.outcome == Outcome::fail) return 1;
  }
  return 0;
}

inline std::pair<std::string, std::string> split_binding(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("binding '" + s + "' must look like VAR=VALUE");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Algebra-valued models of set theory: build, evaluate and check"};
  app.name("avm");
  app.require_subcommand(1);

  std::string assignment = "pa";
  std::string format = "text";
  app.add_option("--algebra", cfg.algebra, "builtin algebra name or path to an algebra file")
      ->envname("AVM_ALGEBRA");
  app.add_option("--designated", cfg.designated, "comma-separated designated elements")->envname("AVM_DESIGNATED");
  app.add_option("--rank", cfg.rank, "rank bound for the universe of names")
      ->check(CLI::Range(1U, 16U))
      ->envname("AVM_RANK");
  app.add_option("--budget", cfg.budget, "maximum number of enumerated names")->envname("AVM_BUDGET");
  app.add_option("--assignment", assignment, "atomic assignment: ba or pa")
      ->check(CLI::IsMember({"ba", "pa"}))
      ->envname("AVM_ASSIGNMENT");
  app.add_option("--jobs", cfg.jobs, "checks run in parallel")->check(CLI::Range(1U, 256U))->envname("AVM_JOBS");
  app.add_option("--seed", cfg.seed, "seed for samples and random corpora")->envname("AVM_SEED");
  app.add_option("--format", format, "output format: text or records")
      ->check(CLI::IsMember({"text", "records"}))
      ->envname("AVM_FORMAT");

  auto* algebra_cmd = app.add_subcommand("algebra", "inspect the selected algebra");
  algebra_cmd->require_subcommand(1);
  auto* algebra_check = algebra_cmd->add_subcommand("check", "report lattice, drim, cobounded and filter laws");
  auto* algebra_print = algebra_cmd->add_subcommand("print", "write the algebra in the file format");

  auto* universe_cmd = app.add_subcommand("universe", "enumerate names");
  universe_cmd->require_subcommand(1);
  auto* universe_build = universe_cmd->add_subcommand("build", "enumerate names up to the rank bound");
  bool list_names = false;
  std::optional<std::size_t> domain_cap;
  universe_build->add_flag("--list", list_names, "print every enumerated name");
  universe_build->add_option("--domain-cap", domain_cap, "only keep names with at most this many entries");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a formula and print its truth value");
  std::string formula_text;
  std::vector<std::string> lets, lets_hf;
  eval_cmd->add_option("formula", formula_text, "formula text")->required();
  eval_cmd->add_option("--let", lets, "bind VAR to a name literal such as {#0: half}");
  eval_cmd->add_option("--let-check", lets_hf, "bind VAR to the check name of a hereditarily finite set such as {{}}");

  auto* check_cmd = app.add_subcommand("check", "run named checks, or all of them");
  std::vector<std::string> check_names;
  bool list_checks = false;
  check_cmd->add_option("names", check_names, "check names, or 'all'");
  check_cmd->add_flag("--list", list_checks, "list the available checks");
  check_cmd->add_option("--corpus", cfg.corpus_size, "formulas in the propositional corpus");

  auto* quotient_cmd = app.add_subcommand("quotient", "quotient of the names by PA equality");
  quotient_cmd->require_subcommand(1);
  auto* quotient_export = quotient_cmd->add_subcommand("export", "print classes and relation edges");

  auto* logic_cmd = app.add_subcommand("logic", "propositional logic over the algebra");
  logic_cmd->require_subcommand(1);
  auto* logic_taut = logic_cmd->add_subcommand("taut", "decide validity by exhausting valuations");
  std::string prop_text;
  std::size_t cap = default_valuation_cap;
  logic_taut->add_option("formula", prop_text, "propositional formula")->required();
  logic_taut->add_option("--cap", cap, "maximum number of valuations");
  auto* logic_para = logic_cmd->add_subcommand("para", "look for a refutation of (p /\\ ~p) -> q");
  auto* logic_agree = logic_cmd->add_subcommand("agree", "compare tautologies with PS3 on a random corpus");
  logic_agree->add_option("--count", cfg.corpus_size, "corpus size");

  for (CLI::App* sub : {algebra_cmd, algebra_check, algebra_print, universe_cmd, universe_build, eval_cmd, check_cmd,
                        quotient_cmd, quotient_export, logic_cmd, logic_taut, logic_para, logic_agree}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  cfg.assignment = assignment == "ba" ? Assignment::ba : Assignment::pa;
  cfg.format = format == "records" ? Format::records : Format::text;
  const bool records = cfg.format == Format::records;

  try {
    if (*check_cmd && list_checks) {
      for (const auto& c : check_registry()) out << c.name << "  " << c.help << "\n";
      return 0;
    }

    const DesignatedAlgebra da = load_algebra(cfg.algebra, cfg.designated);
    const Algebra& A = da.algebra;

    if (*algebra_check) {
      const AlgebraReport rep = full_report(A, da.designated);
      const AlgebraProfile prof = profile(A, da.designated);
      if (records) {
        nlohmann::json j;
        j["algebra"] = A.name();
        j["designated"] = format_designated(A, da.designated);
        nlohmann::json laws = nlohmann::json::array();
        for (const auto& v : rep.verdicts()) laws.push_back({v.law, v.holds});
        j["laws"] = laws;
        out << j.dump() << "\n";
      } else {
        out << A.name() << " (" << A.size() << " elements), D=" << format_designated(A, da.designated) << "\n";
        for (const auto& v : rep.verdicts()) {
          out << "  " << (v.holds ? "holds " : "FAILS ") << v.law;
          if (!v.holds && !v.witness.empty()) {
            out << " at";
            for (Elem e : v.witness) out << " " << A.name_of(e);
          }
          out << "\n";
        }
        if (prof.coatom) out << "  coatom " << A.name_of(*prof.coatom) << "\n";
      }
      return 0;
    }

    if (*algebra_print) {
      out << write_algebra_text(da);
      return 0;
    }

    if (*universe_build) {
      const auto u = build_for(cfg, da, domain_cap);
      if (records) {
        nlohmann::json j;
        j["algebra"] = A.name();
        j["rank"] = cfg.rank;
        j["rank_sizes"] = u->rank_sizes();
        j["names"] = u->enumerated_size();
        if (list_names) {
          nlohmann::json names = nlohmann::json::array();
          for (NameId id : u->enumerated_ids()) names.push_back(u->format(id));
          j["list"] = names;
        }
        out << j.dump() << "\n";
      } else {
        out << "rank sizes:";
        for (std::size_t s : u->rank_sizes()) out << " " << s;
        out << "\n" << u->enumerated_size() << " names\n";
        if (list_names) {
          for (NameId id : u->enumerated_ids()) {
            out << "#" << id.value << " rank " << u->name(id).rank << " " << u->format(id) << "\n";
          }
        }
      }
      return 0;
    }

    if (*eval_cmd) {
      const auto u = build_for(cfg, da);
      Env env;
      for (const auto& b : lets) {
        auto [var, lit] = detail::split_binding(b);
        env[var] = u->insert_literal(lit);
      }
      for (const auto& b : lets_hf) {
        auto [var, text] = detail::split_binding(b);
        env[var] = u->check_name(HFSet::parse(text));
      }
      const Formula f = parse_formula(formula_text, u.get());
      for (const auto& v : free_variables(f)) {
        if (!env.count(v)) throw InputError("free variable '" + v + "' is not bound; use --let");
      }
      const EvalContext ctx(u, da.designated, cfg.assignment);
      const Elem value = ctx.eval(f, env);
      if (records) {
        nlohmann::json j;
        j["formula"] = to_string(f);
        j["assignment"] = assignment_name(cfg.assignment);
        j["value"] = A.name_of(value);
        j["designated"] = ctx.designated_value(value);
        out << j.dump() << "\n";
      } else {
        out << A.name_of(value) << "\n";
      }
      return 0;
    }

    if (*check_cmd) {
      if (check_names.empty()) throw InputError("name a check, 'all', or use --list");
      std::vector<const CheckSpec*> specs;
      for (const auto& n : check_names) {
        if (n == "all") {
          for (const auto& c : check_registry()) specs.push_back(&c);
        } else if (const CheckSpec* c = find_check(n)) {
          specs.push_back(c);
        } else {
          throw InputError("unknown check '" + n + "'; see check --list");
        }
      }
      const auto results = run_checks(specs, cfg, da);
      detail::print_results(results, cfg, out);
      return detail::exit_code(results);
    }

    if (*quotient_export) {
      const auto u = build_for(cfg, da);
      const EvalContext ctx(u, da.designated, Assignment::pa);
      const QuotientModel q = build_quotient(ctx, cfg.seed);
      out << q.export_text();
      return 0;
    }

    if (*logic_taut) {
      const PropFormula f = parse_prop(prop_text);
      const TautologyResult t = is_tautology(A, da.designated, f, cap);
      if (records) {
        nlohmann::json j;
        j["formula"] = to_string(f);
        j["tautology"] = t.tautology;
        j["valuations"] = t.valuations_checked;
        if (t.falsifying) {
          nlohmann::json v = nlohmann::json::object();
          for (const auto& [k, e] : *t.falsifying) v[k] = A.name_of(e);
          j["falsifying"] = v;
          j["value"] = A.name_of(eval_prop(A, *t.falsifying, f));
        }
        out << j.dump() << "\n";
      } else if (t.tautology) {
        out << "tautology (" << t.valuations_checked << " valuations)\n";
      } else {
        out << "not a tautology: " << format_valuation(A, *t.falsifying) << " gives "
            << A.name_of(eval_prop(A, *t.falsifying, f)) << "\n";
      }
      return t.tautology ? 0 : 1;
    }

    if (*logic_para || *logic_agree) {
      const CheckResult r = timed([&] {
        return *logic_para ? check_paraconsistent(A, da.designated)
                           : check_ps3_agreement(A, da.designated, random_prop_corpus(cfg.seed, cfg.corpus_size));
      });
      detail::print_results({r}, cfg, out);
      return detail::exit_code({r});
    }
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 2;
}

}  // namespace avm::cli
