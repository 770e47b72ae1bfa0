// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <variant>

#include "corpus_path.hpp"
#include "oracles.hpp"
#include "protosec/agent_chain.hpp"
#include "protosec/closure.hpp"
#include "protosec/corpus.hpp"
#include "protosec/guard.hpp"
#include "protosec/preservation.hpp"

#ifndef PROTOSEC_CLI
#define PROTOSEC_CLI "protosec"
#endif

using namespace protosec;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (pass) detail << "failed: " << what;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared by criteria 1 to 3.
std::vector<MessageSet> universe_sets() {
  static const std::vector<MessageSet> sets = oracle::Universe{}.sets(6000, 1);
  return sets;
}

void closure_oracle(Outcome& o) {
  std::size_t bad = 0;
  auto sets = universe_sets();
  for (const auto& h : sets) {
    auto hs = oracle::to_set(h);
    if (oracle::from_set(oracle::parts(hs)) != parts(h)) ++bad;
    if (oracle::from_set(oracle::analz(hs)) != analz(h)) ++bad;
  }
  o.detail << sets.size() << " sets, " << bad << " discrepancies";
  o.require(bad == 0, "closure differs from the oracle");
}

void decomposition(Outcome& o) {
  std::size_t bad = 0;
  auto sets = universe_sets();
  for (const auto& g : sets) {
    auto expected = oracle::from_set(oracle::analz(oracle::to_set(g)));
    if (expected != pparts(g).united(analz(kparts(g)))) ++bad;
  }
  o.detail << sets.size() << " sets, " << bad << " discrepancies";
  o.require(bad == 0, "analz G != pparts G u analz(kparts G)");
}

void guard_theorem(Outcome& o) {
  oracle::Universe u;
  std::size_t guarded = 0, leaked = 0, bad = 0;
  for (const auto& g : universe_sets()) {
    auto a = oracle::analz(oracle::to_set(g));
    for (const auto& secret : {u.nonce, u.shr_b}) {
      for (const auto& ks : u.key_sets()) {
        GuardSpec spec{Secret::from_message(secret), ks};
        if (!guard_set(spec, g)) continue;
        ++guarded;
        bool deducible = a.count(secret) != 0;
        bool key_known = false;
        for (auto k : ks) key_known = key_known || a.count(Message::key(k));
        if (!key_known && deducible) ++bad;
        Witness w = secrecy_witness(spec, g);
        if (deducible) {
          ++leaked;
          auto* k = std::get_if<SomeKey>(&w);
          if (!k || !ks.count(k->key) || !a.count(Message::key(k->key))) ++bad;
        } else if (!std::holds_alternative<SecretSafe>(w)) {
          ++bad;
        }
      }
    }
  }
  o.detail << guarded << " guarded cases (" << leaked << " with the secret deducible), " << bad
           << " counterexamples";
  o.require(bad == 0, "secrecy theorem counterexample");
  o.require(leaked > 0, "universe never exercises a deducible secret");
}

void guard_extend(Outcome& o) {
  oracle::Universe u;
  auto terms = u.terms(400, 2);
  std::vector<KeyId> pool{pri_key(u.a), pub_key(u.a), shr_key(u.b), pri_key(u.b)};
  std::mt19937 rng(29);
  std::size_t cases = 20000, premises = 0, bad = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    KeySet ks, bigger;
    for (auto k : pool) {
      unsigned r = rng() % 3;
      if (r == 0) ks.insert(k);
      if (r != 2) bigger.insert(k);
    }
    bigger.insert(ks.begin(), ks.end());
    Secret s = Secret::from_message(rng() % 2 ? u.nonce : u.shr_b);
    const Message& x = terms[rng() % terms.size()];
    if (!guard_member({s, ks}, x)) continue;
    ++premises;
    if (!guard_member({s, bigger}, x)) ++bad;
  }
  o.detail << cases << " cases, " << premises << " guarded under the smaller set, " << bad
           << " failures";
  o.require(bad == 0, "guard is not monotone in Ks");
}

void nsl(Outcome& o) {
  auto f = corpus("nsl.proto");
  auto b = f.exploration_bounds();
  o.require(b.max_trace_len == 7 && b.agent_pool.size() == 3, "bounds differ from 3 agents, length 7");
  o.require(b.nonce_pool.size() == 4, "expected 2 nonces per role");
  std::size_t states = 0;
  for (const char* q : {"NA", "NB"}) {
    auto s = check_secrecy(f.protocol, f.query(q), b);
    states = std::max(states, s.report.states);
    o.require(s.outcome == SecrecyResult::Outcome::kHoldsWithinBounds,
              std::string(q) + " secrecy " + std::string(outcome_name(s.outcome)));
    auto p = check_preservation(f.protocol, f.query(q), b);
    for (const auto& r : p.rules)
      o.require(r.outcome == RuleVerdict::Outcome::kPreserved, std::string(q) + " rule " + r.rule);
  }
  for (const char* shape : {"NA_unicity", "NB_unicity"}) {
    auto u = check_unicity(f.protocol, f.shape(shape), b);
    o.require(u.holds && !u.truncated, shape);
  }
  o.detail << "NA, NB hold and are preserved by NS1-NS3, both unicity lemmas hold (" << states
           << " states)";
}

void ns_attack(Outcome& o) {
  auto f = corpus("ns-original.proto");
  auto b = f.exploration_bounds();
  o.require(b.max_trace_len == 7, "max length is not 7");
  auto first = check_secrecy(f.protocol, f.query("NB"), b);
  auto second = check_secrecy(f.protocol, f.query("NB"), b);
  o.require(first.outcome == SecrecyResult::Outcome::kAttack, "no attack found");
  if (!o.pass) return;
  o.require(!replay_error(f.protocol, first.trace), "attack trace does not replay");
  o.require(first.trace.size() <= 7, "attack trace too long");
  o.require(render_steps(first.trace) == render_steps(second.trace), "attack trace differs between runs");
  o.require(analz(spies(trace_of(first.trace), f.protocol)).contains(first.secret->atom()),
            "secret not deducible at the end of the trace");
  o.detail << first.trace.size() << "-step attack on " << first.secret->str() << ", replayed";
}

void otway_rees(Outcome& o) {
  auto f = corpus("otway-rees.proto");
  auto b = f.exploration_bounds();
  for (const char* q : {"NA", "NB"}) {
    auto p = check_preservation(f.protocol, f.query(q), b);
    o.require(p.global == RuleVerdict::Outcome::kPreserved, std::string(q) + " not preserved");
    o.require(p.rules.size() == 4, "expected OR1-OR4");
  }
  for (const char* q : {"NA", "NB", "KAB"}) {
    auto s = check_secrecy(f.protocol, f.query(q), b);
    o.require(s.outcome == SecrecyResult::Outcome::kHoldsWithinBounds, std::string(q) + " secrecy");
  }
  o.detail << "NA and NB preserved by OR1-OR4, no secrecy attack (max length "
           << b.max_trace_len << ")";
}

void yahalom(Outcome& o) {
  auto f = corpus("yahalom.proto");
  auto b = f.exploration_bounds();
  o.require(b.max_trace_len == 8, "max length is not 8");
  const auto& kab = f.query("KAB");
  const auto& nb = f.query("NB");
  o.require(!kab.ks.trace_dependent() && kab.ks.fixed.size() == 2, "KAB guard set");
  o.require(nb.ks.trace_dependent(), "NB guard set does not depend on the trace");
  std::size_t states = 0;
  for (const auto* q : {&kab, &nb}) {
    auto s = check_secrecy(f.protocol, *q, b);
    states = s.report.states;
    o.require(s.outcome == SecrecyResult::Outcome::kHoldsWithinBounds && !s.report.truncated,
              q->name + " secrecy");
  }
  o.detail << "KAB and NB hold within length 8 (" << states << " states)";
}

void chain_resilience(Outcome& o) {
  const AgentId a = AgentId::friend_(1), b = AgentId::friend_(2), c = AgentId::friend_(3);
  std::vector<AgentId> agents{b, c, AgentId::spy()};
  std::vector<uint64_t> offers{6, 7};
  std::size_t chains = 0, checks = 0, bad = 0;
  for (auto v : {ChainVariant::kP1, ChainVariant::kP2}) {
    for (const auto& l : valid_chains(v, a, 5, b, agents, offers, 5)) {
      ++chains;
      if (!valid_member(l, a, 5, b, v, true)) ++bad;
      auto universe = mutation_universe(l, v, a, agents, offers);
      std::size_t n = msglist::len(l);
      for (std::size_t i = 1; i < n; ++i) {
        for (const auto& m : universe) {
          if (m != msglist::ith(l, i)) {
            ++checks;
            if (valid_member(msglist::repl(l, i, m), a, 5, b, v, true)) ++bad;
          }
          ++checks;
          if (valid_member(msglist::ins(l, i, m), a, 5, b, v, true)) ++bad;
        }
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (const auto& m : universe) {
          ++checks;
          Message t = msglist::cons(m, msglist::trunc(l, i + 1));
          if (valid_member(t, a, 5, b, v, true) &&
              shop(m, v, true) != shop(msglist::ith(l, i), v, true))
            ++bad;
        }
      }
    }
  }
  o.detail << chains << " valid chains, " << checks << " mutations, " << bad << " counterexamples";
  o.require(bad == 0, "resilience counterexample");
}

class ChainAudit : public Visitor {
 public:
  ChainAudit(const Protocol& p, ChainVariant v) : p_(p), v_(v) {}

  bool on_state(const ExplorationState& st) override {
    ++states;
    const MessageSet& known = st.analz().known();
    bool faked = false;
    for (const auto& s : st.steps()) {
      faked = faked || s.is_fake();
      if (s.is_fake()) continue;
      AgentId owner = s.subst.at("A").agent_id();
      if (p_.is_bad(owner)) continue;
      if (s.rule == "Req" && known.contains(s.subst.at("n"))) ++leaks;
      if (s.rule == "Prop" && !p_.is_bad(s.event.sender) && known.contains(s.subst.at("ofr")))
        ++leaks;
      if (s.rule != "Prop") continue;
      const Message& offers = s.event.body.second().second().second();
      const Step& req = st.steps().front();
      if (!faked && req.rule == "Req") {
        AgentId first = req.event.recipient;
        uint64_t n = req.subst.at("n").value();
        if (v_ == ChainVariant::kP1) {
          ++validity;
          if (!valid_member(offers, owner, n, first, v_, false)) ++invalid;
        } else {
          ++validity;
          if (!valid_member(offers, owner, n, first, v_, true)) ++invalid;
          try {
            valid_member(offers, owner, n, first, v_, false);
          } catch (const OwnerKeyRequired&) {
            ++owner_key_required;
          }
        }
      }
    }
    // Signatures of honest agents seen by the spy come from their own events.
    for (const auto& m : st.spied_parts()) {
      auto sig = signature_parts(m);
      if (!sig || !verify_signature(m) || p_.is_bad(sig->first)) continue;
      ++signatures;
      bool origin = false;
      for (const auto& s : st.steps())
        if (s.event.sender == sig->first && parts({s.event.body}).contains(m)) origin = true;
      if (!origin) ++unsigned_origin;
    }
    return true;
  }

  std::size_t states = 0, leaks = 0, signatures = 0, unsigned_origin = 0;
  std::size_t validity = 0, invalid = 0, owner_key_required = 0;

 private:
  const Protocol& p_;
  ChainVariant v_;
};

void chain_confidentiality(Outcome& o) {
  for (auto v : {ChainVariant::kP1, ChainVariant::kP2}) {
    std::string file = v == ChainVariant::kP1 ? "p1.proto" : "p2.proto";
    auto f = corpus(file);
    auto b = f.exploration_bounds();
    o.require(b.max_trace_len == 6 && b.agent_pool.size() == 4, file + " bounds");
    for (const char* q : {"n", "ofr"}) {
      auto s = check_secrecy(f.protocol, f.query(q), b);
      o.require(s.outcome == SecrecyResult::Outcome::kHoldsWithinBounds,
                file + " " + q + " " + std::string(outcome_name(s.outcome)));
    }
    ChainAudit audit(f.protocol, v);
    auto r = explore(f.protocol, b, audit);
    o.require(!r.truncated, file + " exploration truncated");
    o.require(audit.leaks == 0, file + " nonce deducible");
    o.require(audit.unsigned_origin == 0, file + " signature without a sending event");
    o.require(audit.signatures > 0, file + " no signatures observed");
    o.require(audit.validity > 0 && audit.invalid == 0, file + " honest offer list not valid");
    if (v == ChainVariant::kP2)
      o.require(audit.owner_key_required == audit.validity, "P2 check without owner key did not refuse");
    o.detail << variant_name(v) << ": " << r.states << " states, " << audit.signatures
             << " signature sightings, " << audit.validity << " offer lists checked; ";
  }
  o.detail << "P2 without owner key raises OwnerKeyRequired";
}

void round_trip_and_corpus(Outcome& o) {
  auto files = corpus_files(PROTOSEC_CORPUS_DIR);
  for (const auto& path : files) {
    auto f = load_protocol(path);
    o.require(parse_protocol(print_protocol(f)) == f, "round trip of " + path);
  }
  std::string cmd = std::string("\"") + PROTOSEC_CLI + "\" corpus run --dir \"" +
                    PROTOSEC_CORPUS_DIR + "\" > /dev/null";
  int status = std::system(cmd.c_str());
  o.require(status == 0, "corpus run exit status " + std::to_string(status));
  o.detail << files.size() << " files round-trip, corpus run exit status " << status;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
    double limit;  // seconds, 0 for none
  };
  std::vector<Criterion> all{
      {1, "closure oracle equivalence", closure_oracle, 60},
      {2, "analz decomposition", decomposition, 0},
      {3, "guard secrecy theorem", guard_theorem, 120},
      {4, "guard_extend monotonicity", guard_extend, 0},
      {5, "NSL secrecy, preservation and unicity", nsl, 300},
      {6, "original Needham-Schroeder attack", ns_attack, 0},
      {7, "Otway-Rees preservation", otway_rees, 0},
      {8, "Yahalom secrecy", yahalom, 0},
      {9, "P1/P2 chain resilience", chain_resilience, 300},
      {10, "P1/P2 confidentiality and non-repudiation", chain_confidentiality, 0},
      {11, "round trip and corpus run", round_trip_and_corpus, 0},
  };
  bool ok = true;
  for (const auto& c : all) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = since(t0);
    if (c.limit > 0) o.require(secs < c.limit, "over the time limit");
    ok = ok && o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.name
              << ": " << o.detail.str() << " [" << std::fixed << std::setprecision(1) << secs
              << "s]" << std::endl;
  }
  return ok ? 0 : 1;
}
