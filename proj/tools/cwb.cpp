// cwb: command-line front end for the cache and interval analyses.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cwb/report/cache_report.hpp"
#include "cwb/report/interval_report.hpp"

namespace {

using cwb::report::Format;

const std::map<std::string, Format> kFormats{{"text", Format::Text}, {"json", Format::Json}};

int emit(const cwb::report::Report& r) {
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static-analysis workbench: exact and approximate cache and interval analyses", "cwb"};
  app.set_version_flag("--version", cwb::report::kVersion);
  app.require_subcommand(1);

  cwb::report::CacheRequest creq;
  auto* cache = app.add_subcommand("cache", "Classify memory accesses of one LRU cache set");
  cache->add_option("input", creq.input, "Toy program, or access graph (.acg)")->required();
  cache->add_option("--assoc,-N", creq.assoc, "Associativity")->capture_default_str()->check(CLI::PositiveNumber);
  cache->add_option("--method", creq.method, "Analysis method")
      ->capture_default_str()
      ->check(CLI::IsMember(cwb::report::cache_methods()));
  std::map<std::string, cwb::cache::InitialCachePolicy> inits{{"empty", cwb::cache::InitialCachePolicy::Empty},
                                                               {"unknown", cwb::cache::InitialCachePolicy::Unknown}};
  cache->add_option("--init", creq.init, "Initial cache content")
      ->transform(CLI::CheckedTransformer(inits, CLI::ignore_case))
      ->default_str("empty");
  cache->add_option("--format", creq.format, "Report format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->default_str("text");
  cache->add_option("--budget", creq.budget, "State budget of the oracle")->capture_default_str();
  cache->add_flag("--wall-time", creq.wall_time, "Also report wall-clock time per phase");

  cwb::report::IntervalRequest ireq;
  auto* intervals = app.add_subcommand("intervals", "Interval invariants and assert verdicts");
  intervals->add_option("input", ireq.input, "Toy program")->required();
  intervals->add_option("--method", ireq.method, "Analysis method")
      ->capture_default_str()
      ->check(CLI::IsMember(cwb::report::interval_methods()));
  intervals->add_option("--widen-delay", ireq.widen_delay, "Plain joins at loop heads before widening")
      ->capture_default_str();
  intervals->add_option("--narrow-passes", ireq.narrow_passes, "Decreasing passes of widen-narrow")->capture_default_str();
  intervals->add_option("--rewrites", ireq.rewrites, "Rewriting combination: off, full or truncated:d")
      ->capture_default_str();
  intervals->add_option("--pre", ireq.pre, "Entry range var=lo:hi (repeatable; bounds may be -oo/+oo)");
  intervals->add_option("--oracle-range", ireq.oracle_range, "Values the oracle may visit, lo:hi")->capture_default_str();
  intervals->add_option("--oracle-budget", ireq.oracle_budget, "State budget of the oracle")->capture_default_str();
  intervals->add_option("--cap", ireq.cap, "Choice-node cap of the exhaustive solver")->capture_default_str();
  intervals->add_option("--format", ireq.format, "Report format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->default_str("text");
  intervals->add_flag("--wall-time", ireq.wall_time, "Also report wall-clock time per phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cwb::report::kInputError;
  }

  if (*cache) return emit(cwb::report::run_cache(creq));
  return emit(cwb::report::run_intervals(ireq));
}
