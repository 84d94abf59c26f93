#pragma once

#include <iosfwd>

#include "instlab/io.hpp"

namespace ilab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  int k_min = 2;
  int k_max = 5;
  int jobs = 0;        // 0 = logical cores
  bool quick = false;  // reduced counts for development runs
  std::uint64_t seed = 20260810;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
  bool critical_finding = false;  // a certified instanton with an obstruction
};

/// Runs the acceptance criteria, printing one pass/fail line per criterion.
SuiteResult run_acceptance_suite(const SuiteOptions& opt, std::ostream& log);

Json to_json(const SuiteResult& r, bool include_timings);

}  // namespace ilab
