#ifndef PROTOSEC_CORPUS_HPP_
#define PROTOSEC_CORPUS_HPP_

// Runs the `expect` blocks of protocol files and compares outcomes.

#include <string>
#include <vector>

#include "protosec/dsl.hpp"

namespace protosec {

struct ExpectationResult {
  Expectation expected;
  std::string actual;
  double seconds = 0;
  std::size_t states = 0;
  /// Attack or counterexample trace, when there is one.
  std::string detail;

  bool matches() const { return expected.outcome == actual; }
};

struct CorpusReport {
  std::string file;
  std::vector<ExpectationResult> results;

  bool ok() const;
  /// One "PASS|FAIL <file> <kind> <name>: expected X, got Y" line per result.
  std::string str() const;
};

/// Runs one check and records its outcome in expect-block vocabulary.
ExpectationResult evaluate(const ProtocolFile& f, const Expectation& e);
CorpusReport run_expectations(const ProtocolFile& f, const std::string& label);

/// The *.proto files of a directory, sorted by name.
std::vector<std::string> corpus_files(const std::string& dir);

}  // namespace protosec

#endif  // PROTOSEC_CORPUS_HPP_
