// protosec: command-line front end for the protocol analyzer.
//
// Exit codes: 0 ok, 1 usage or chain not valid, 2 parse error, 3 bounds too
// small, 4 expectation mismatch, 5 attack or violation found.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "protosec/agent_chain.hpp"
#include "protosec/corpus.hpp"
#include "protosec/dsl.hpp"
#include "protosec/msg_list.hpp"
#include "protosec/preservation.hpp"

#ifndef PROTOSEC_CORPUS_DIR
#define PROTOSEC_CORPUS_DIR "corpus"
#endif

using namespace protosec;
using json = nlohmann::json;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;
constexpr int kExitBounds = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitAttack = 5;

struct BoundOptions {
  std::optional<std::size_t> max_len;
  std::optional<std::size_t> agents;
  std::optional<std::size_t> nonces;
  std::optional<std::size_t> fakes;
  std::optional<std::size_t> states;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-len", max_len, "maximum trace length");
    cmd->add_option("--agents", agents, "agents in the pool, the spy included");
    cmd->add_option("--nonces", nonces, "fresh nonces per role");
    cmd->add_option("--fakes", fakes, "fake events per trace");
    cmd->add_option("--states", states, "state budget");
  }

  void apply(ProtocolFile& f) const {
    if (max_len) f.bounds.max_len = max_len;
    if (agents) f.bounds.agents = agents;
    if (nonces) f.bounds.nonces = nonces;
    if (fakes) f.bounds.fakes = fakes;
    if (states) f.bounds.states = states;
  }
};

json step_json(const Step& s) {
  return {{"rule", s.is_fake() ? "Fake" : s.rule},
          {"event", s.event.str()},
          {"subst", s.is_fake() ? "" : s.subst.str()}};
}

void print_trace(const std::vector<Step>& steps, bool as_json) {
  if (!as_json) {
    std::cout << render_steps(steps);
    return;
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    json j = step_json(steps[i]);
    j["type"] = "step";
    j["index"] = i + 1;
    std::cout << j.dump() << "\n";
  }
}

json report_json(const ExplorationReport& r) {
  return {{"states", r.states},
          {"transitions", r.transitions},
          {"longest", r.longest},
          {"truncated", r.truncated}};
}

class CountingVisitor : public Visitor {
 public:
  explicit CountingVisitor(bool emit) : emit_(emit) {}
  bool on_state(const ExplorationState& st) override {
    if (emit_ && !st.steps().empty()) {
      json j{{"type", "trace"}, {"length", st.size()}};
      json events = json::array();
      for (const auto& s : st.steps()) events.push_back(step_json(s));
      j["steps"] = std::move(events);
      std::cout << j.dump() << "\n";
    }
    return true;
  }

 private:
  bool emit_;
};

int cmd_parse(const std::string& path) {
  ProtocolFile f = load_protocol(path);
  std::cout << print_protocol(f);
  return 0;
}

int cmd_explore(const std::string& path, const BoundOptions& opts, bool as_json, bool traces) {
  ProtocolFile f = load_protocol(path);
  opts.apply(f);
  CountingVisitor v(as_json && traces);
  ExplorationReport r = explore(f.protocol, f.exploration_bounds(), v);
  if (as_json) {
    json j = report_json(r);
    j["type"] = "report";
    j["protocol"] = f.protocol.name();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "protocol " << f.protocol.name() << "\n"
              << "states: " << r.states << "\n"
              << "transitions: " << r.transitions << "\n"
              << "longest trace: " << r.longest << "\n"
              << "complete: " << (r.truncated ? "no" : "yes") << "\n";
  }
  return 0;
}

int cmd_secrecy(const std::string& path, const std::string& query, const BoundOptions& opts,
                bool as_json) {
  ProtocolFile f = load_protocol(path);
  opts.apply(f);
  SecrecyResult r = check_secrecy(f.protocol, f.query(query), f.exploration_bounds());
  if (as_json) {
    json j{{"type", "verdict"}, {"query", query}, {"outcome", outcome_name(r.outcome)}};
    j["report"] = report_json(r.report);
    if (r.secret) j["secret"] = r.secret->str();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << outcome_name(r.outcome) << "\n";
    if (r.secret) std::cout << "secret " << r.secret->str() << " deducible after:\n";
    if (!r.reason.empty()) std::cout << r.reason << "\n";
  }
  print_trace(r.trace, as_json);
  return r.outcome == SecrecyResult::Outcome::kAttack ? kExitAttack : 0;
}

int cmd_preservation(const std::string& path, const std::string& query, const BoundOptions& opts,
                     bool as_json) {
  ProtocolFile f = load_protocol(path);
  opts.apply(f);
  PreservationResult r = check_preservation(f.protocol, f.query(query), f.exploration_bounds());
  if (as_json) {
    for (const auto& v : r.rules) {
      json j{{"type", "rule"}, {"rule", v.rule}, {"outcome", outcome_name(v.outcome)},
             {"checks", v.checks}};
      if (v.step) j["step"] = step_json(*v.step);
      std::cout << j.dump() << "\n";
    }
    json j{{"type", "verdict"}, {"query", query}, {"outcome", outcome_name(r.global)}};
    j["report"] = report_json(r.report);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << r.str();
    for (const auto& v : r.rules) {
      if (v.outcome != RuleVerdict::Outcome::kViolated) continue;
      std::cout << "rule " << v.rule << " breaks guardedness: " << v.reason << "\n"
                << render_steps(v.trace) << "  then " << v.step->str() << "\n";
    }
  }
  return r.global == RuleVerdict::Outcome::kViolated ? kExitAttack : 0;
}

int cmd_unicity(const std::string& path, const std::string& shape, const BoundOptions& opts,
                bool as_json) {
  ProtocolFile f = load_protocol(path);
  opts.apply(f);
  UnicityResult r = check_unicity(f.protocol, f.shape(shape), f.exploration_bounds());
  std::string outcome = !r.holds ? "Fails" : r.truncated ? "Unknown" : "HoldsWithinBounds";
  if (as_json) {
    json j{{"type", "verdict"}, {"shape", shape}, {"outcome", outcome},
           {"pairs", r.pairs_checked}};
    j["report"] = report_json(r.report);
    if (r.bindings) j["bindings"] = r.bindings->str();
    std::cout << j.dump() << "\n";
  } else {
    std::cout << outcome << "\n";
    if (r.bindings) std::cout << "witness " << r.bindings->str() << "\n";
  }
  print_trace(r.trace, as_json);
  return r.holds ? 0 : kExitAttack;
}

// A chain file holds one offer list in message syntax; `#` starts a comment.
int cmd_validate_chain(const std::string& path, const std::string& variant, bool owner_key,
                       const std::optional<std::string>& owner,
                       const std::optional<uint64_t>& session,
                       const std::optional<std::string>& first) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ChainVariant v = parse_variant(variant);
  Message l = parse_message(buf.str());
  if (!msglist::well_formed(l) || msglist::len(l) == 0) throw Error("not a non-empty offer list");
  auto agent = [](const std::string& text) {
    Lexer lex(text);
    return parse_agent(lex);
  };
  // Owner, session and first shop default to what the anchor says.
  std::vector<Message> items = msglist::to_vector(l);
  std::optional<ChainFields> base;
  try {
    base = chain_fields(items.back(), v, owner_key);
  } catch (const OwnerKeyRequired&) {
  } catch (const NotAChain&) {
  }
  if (!base && !(owner && session && first)) {
    if (v == ChainVariant::kP2 && !owner_key) {
      std::cout << dump_chain(l, AgentId::server(), 0, AgentId::server(), v, false);
      return kExitInvalid;
    }
    throw Error("cannot read the anchor; pass --owner, --session and --first");
  }
  AgentId a = owner ? agent(*owner) : base->owner;
  uint64_t n = session ? *session : base->ofr;
  AgentId b = first ? agent(*first) : base->next;
  std::string dump = dump_chain(l, a, n, b, v, owner_key);
  std::cout << dump;
  return dump.find("verdict: valid\n") != std::string::npos ? 0 : kExitInvalid;
}

int cmd_corpus(const std::string& dir, bool as_json) {
  bool ok = true;
  for (const auto& path : corpus_files(dir)) {
    ProtocolFile f;
    try {
      f = load_protocol(path);
    } catch (const SyntaxError& e) {
      std::cerr << path << ":" << e.what() << "\n";
      return kExitParse;
    } catch (const TypeError& e) {
      std::cerr << path << ":" << e.what() << "\n";
      return kExitParse;
    }
    bool round_trip = parse_protocol(print_protocol(f)) == f;
    std::string label = std::filesystem::path(path).filename().string();
    CorpusReport report = run_expectations(f, label);
    ok = ok && round_trip && report.ok();
    if (as_json) {
      for (const auto& r : report.results) {
        json j{{"type", "expectation"}, {"file", label}, {"name", r.expected.name},
               {"expected", r.expected.outcome}, {"actual", r.actual},
               {"states", r.states}, {"pass", r.matches()}};
        std::cout << j.dump() << "\n";
      }
      std::cout << json{{"type", "round-trip"}, {"file", label}, {"pass", round_trip}}.dump()
                << "\n";
    } else {
      std::cout << report.str();
      std::cout << (round_trip ? "PASS " : "FAIL ") << label << " round-trip\n";
    }
    std::cout.flush();
  }
  return ok ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic analyzer for security protocols"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit one JSON object per line");

  std::string file;
  std::string name;
  BoundOptions bounds;

  auto* parse = app.add_subcommand("parse", "validate and pretty-print a protocol file");
  parse->add_option("file", file)->required();

  auto* explore_cmd = app.add_subcommand("explore", "enumerate traces within bounds");
  explore_cmd->add_option("file", file)->required();
  bounds.add_to(explore_cmd);
  bool traces = false;
  explore_cmd->add_flag("--traces", traces, "with --json, print every explored trace");
  explore_cmd->add_flag("--json", as_json, "emit one JSON object per line");

  auto* secrecy = app.add_subcommand("check-secrecy", "look for a trace revealing a secret");
  secrecy->add_option("file", file)->required();
  secrecy->add_option("--query", name)->required();
  bounds.add_to(secrecy);
  secrecy->add_flag("--json", as_json, "emit one JSON object per line");

  auto* preservation = app.add_subcommand("check-preservation", "per-rule guardedness");
  preservation->add_option("file", file)->required();
  preservation->add_option("--query", name)->required();
  bounds.add_to(preservation);
  preservation->add_flag("--json", as_json, "emit one JSON object per line");

  auto* unicity = app.add_subcommand("check-unicity", "check a nonce unicity lemma");
  unicity->add_option("file", file)->required();
  unicity->add_option("--shape", name)->required();
  bounds.add_to(unicity);
  unicity->add_flag("--json", as_json, "emit one JSON object per line");

  auto* chain_cmd = app.add_subcommand("validate-chain", "check an offer list");
  std::string variant;
  bool owner_key = false;
  std::optional<std::string> owner;
  std::optional<std::string> first;
  std::optional<uint64_t> session;
  chain_cmd->add_option("--variant", variant, "p1 or p2")->required();
  chain_cmd->add_option("--owner-key", owner_key, "read with the owner's private key")
      ->required();
  chain_cmd->add_option("--owner", owner, "owner agent, e.g. \"Friend 1\"");
  chain_cmd->add_option("--session", session, "session nonce of the anchor");
  chain_cmd->add_option("--first", first, "first shop");
  chain_cmd->add_option("file", file)->required();

  auto* corpus = app.add_subcommand("corpus", "protocol corpus");
  auto* run = corpus->add_subcommand("run", "check every expectation of the corpus");
  corpus->require_subcommand(1);
  std::string dir = PROTOSEC_CORPUS_DIR;
  run->add_option("--dir", dir, "directory of .proto files");
  run->add_flag("--json", as_json, "emit one JSON object per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*parse) return cmd_parse(file);
    if (*explore_cmd) return cmd_explore(file, bounds, as_json, traces);
    if (*secrecy) return cmd_secrecy(file, name, bounds, as_json);
    if (*preservation) return cmd_preservation(file, name, bounds, as_json);
    if (*unicity) return cmd_unicity(file, name, bounds, as_json);
    if (*chain_cmd) return cmd_validate_chain(file, variant, owner_key, owner, session, first);
    if (*run) return cmd_corpus(dir, as_json);
  } catch (const SyntaxError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return kExitParse;
  } catch (const TypeError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return kExitParse;
  } catch (const DuplicateRuleName& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const BoundsTooSmall& e) {
    std::cerr << "bounds: " << e.what() << "\n";
    return kExitBounds;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
