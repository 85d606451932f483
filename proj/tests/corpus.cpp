#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "ct/golden.hpp"

using namespace ct;

namespace {
const std::filesystem::path kCorpus = CT_CORPUS_DIR;
}

TEST_CASE("every golden corpus entry matches its frozen expectations", "[corpus]") {
  auto files = golden_files(kCorpus);
  CHECK(files.size() >= 25);
  std::set<std::string> lts_seen;
  std::set<Rule> typing_seen;
  for (const auto& f : files) {
    GoldenOutcome o = check_golden(f);
    for (const auto& msg : o.failures) {
      INFO(msg);
      CHECK(false);
    }
    lts_seen.insert(o.lts_rules.begin(), o.lts_rules.end());
    typing_seen.insert(o.typing_rules.begin(), o.typing_rules.end());
  }

  // The corpus exercises the whole calculus: every typing rule and every
  // transition rule tag appears somewhere.
  CHECK(typing_seen.size() == 17);
  for (const auto& r : all_lts_rules()) {
    CAPTURE(r);
    CHECK(lts_seen.count(r) == 1);
  }
}

TEST_CASE("the session-style programs infer their frozen types", "[corpus]") {
  auto files = golden_files(kCorpus / "cp");
  CHECK(files.size() == 10);
  for (const auto& f : files) {
    GoldenOutcome o = check_golden(f);
    for (const auto& msg : o.failures) {
      INFO(msg);
      CHECK(false);
    }
  }
}
