#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "avm/error.hpp"

namespace avm {

enum class Outcome { pass, fail, skipped };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::skipped: return "skipped";
  }
  return "";
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct CheckResult {
  std::string check;
  std::string subject;
  Outcome outcome = Outcome::pass;
  std::string summary;
  std::vector<std::string> notes;
  // Present exactly when the check failed; enough to replay the failure.
  KeyValues counterexample;
  // Exhibits produced by passing checks, such as contrast witnesses.
  KeyValues evidence;
  double wall_ms = 0;

  bool passed() const noexcept { return outcome == Outcome::pass; }

  const std::string* find_evidence(const std::string& key) const {
    for (const auto& [k, v] : evidence) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  const std::string* find_counterexample(const std::string& key) const {
    for (const auto& [k, v] : counterexample) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  void fail(std::string why, KeyValues cex) {
    if (cex.empty()) throw InvariantError("failing check " + check + " must carry a counterexample");
    if (outcome == Outcome::fail) return;
    outcome = Outcome::fail;
    summary = std::move(why);
    counterexample = std::move(cex);
  }

  static CheckResult skipped(std::string check, std::string subject, std::string unmet) {
    CheckResult r;
    r.check = std::move(check);
    r.subject = std::move(subject);
    r.outcome = Outcome::skipped;
    r.summary = "precondition not met: " + std::move(unmet);
    return r;
  }
};

// Runs `f` and stores its wall time in the returned result.
template <class F>
CheckResult timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r = std::forward<F>(f)();
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// One JSON object per line, keys sorted, timing omitted.
inline std::string to_record(const CheckResult& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["subject"] = r.subject;
  j["outcome"] = outcome_name(r.outcome);
  j["summary"] = r.summary;
  j["notes"] = r.notes;
  auto kv = [](const KeyValues& xs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [k, v] : xs) a.push_back({k, v});
    return a;
  };
  j["counterexample"] = kv(r.counterexample);
  j["evidence"] = kv(r.evidence);
  return j.dump();
}

inline std::string to_text(const CheckResult& r) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.1f ms", r.wall_ms);
  std::string s = std::string("[") + outcome_name(r.outcome) + "] " + r.check + " on " + r.subject + " (" + ms + ")";
  if (!r.summary.empty()) s += "\n  " + r.summary;
  for (const auto& n : r.notes) s += "\n  note: " + n;
  for (const auto& [k, v] : r.counterexample) s += "\n  counterexample " + k + ": " + v;
  for (const auto& [k, v] : r.evidence) s += "\n  evidence " + k + ": " + v;
  return s;
}

}  // namespace avm
