#include "protosec/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

namespace protosec {

bool CorpusReport::ok() const {
  return std::all_of(results.begin(), results.end(),
                     [](const ExpectationResult& r) { return r.matches(); });
}

namespace {

std::string_view kind_name(Expectation::Kind k) {
  switch (k) {
    case Expectation::Kind::kSecrecy:
      return "secrecy";
    case Expectation::Kind::kPreservation:
      return "preservation";
    case Expectation::Kind::kUnicity:
      return "unicity";
  }
  return "?";
}

}  // namespace

std::string CorpusReport::str() const {
  std::string out;
  for (const auto& r : results) {
    out += r.matches() ? "PASS " : "FAIL ";
    out += file + " " + std::string(kind_name(r.expected.kind)) + " " + r.expected.name;
    out += ": expected " + r.expected.outcome + ", got " + r.actual;
    out += " (" + std::to_string(r.states) + " states)\n";
    if (!r.matches() && !r.detail.empty()) out += r.detail;
  }
  return out;
}

ExpectationResult evaluate(const ProtocolFile& f, const Expectation& e) {
  ExpectationResult r{e, {}, 0, 0, {}};
  ExplorationBounds b = f.exploration_bounds();
  auto start = std::chrono::steady_clock::now();
  switch (e.kind) {
    case Expectation::Kind::kSecrecy: {
      SecrecyResult s = check_secrecy(f.protocol, f.query(e.name), b);
      r.states = s.report.states;
      switch (s.outcome) {
        case SecrecyResult::Outcome::kHoldsWithinBounds:
          r.actual = "holds";
          break;
        case SecrecyResult::Outcome::kAttack:
          r.actual = "attack";
          r.detail = render_steps(s.trace);
          break;
        case SecrecyResult::Outcome::kUnknown:
          r.actual = "unknown";
          r.detail = s.reason + "\n";
          break;
      }
      break;
    }
    case Expectation::Kind::kPreservation: {
      PreservationResult p = check_preservation(f.protocol, f.query(e.name), b);
      r.states = p.report.states;
      r.actual = std::string(outcome_name(p.global));
      r.detail = p.str();
      for (const auto& v : p.rules) {
        if (v.outcome == RuleVerdict::Outcome::kViolated && v.step) {
          r.detail += render_steps(v.trace) + "  then " + v.step->str() + "\n";
          break;
        }
      }
      break;
    }
    case Expectation::Kind::kUnicity: {
      UnicityResult u = check_unicity(f.protocol, f.shape(e.name), b);
      r.states = u.report.states;
      r.actual = !u.holds ? "fails" : u.truncated ? "unknown" : "holds";
      if (!u.holds) r.detail = render_steps(u.trace) + "  " + u.bindings->str() + "\n";
      break;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CorpusReport run_expectations(const ProtocolFile& f, const std::string& label) {
  CorpusReport report{label, {}};
  for (const auto& e : f.expectations) report.results.push_back(evaluate(f, e));
  return report;
}

std::vector<std::string> corpus_files(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".proto")
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace protosec
