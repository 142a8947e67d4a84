// pcprobe: batch probes for free-surface-action obstructions on finite
// solvable groups given by pc presentations.
//
// Exit codes: 0 success, 1 usage, 2 parse error, 3 inconsistent
// presentation, 4 resource guard exceeded, 5 oracle mismatch.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pcprobe/corpus.hpp"

using namespace pcprobe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInconsistent = 3;
constexpr int kExitGuard = 4;
constexpr int kExitOracleMismatch = 5;

int run_probe(const std::string& file, bool genus2, uint64_t seed, const std::string& format) {
  CorpusEntry entry = load_entry(file);
  ProbeOptions opt;
  opt.genus2 = genus2;
  opt.seed = seed;
  ProbeReport r = probe_command(entry, opt);
  if (format == "jsonl")
    std::cout << r.jsonl() << "\n";
  else
    std::cout << r.text();
  return r.failed_stage.empty() ? kExitOk : kExitGuard;
}

int run_search(const std::vector<std::string>& paths, int64_t min_order, int64_t max_order,
               int jobs, const std::string& cache, bool stats) {
  auto corpus = load_corpus(paths);
  SearchOptions opt;
  opt.min_order = min_order;
  opt.max_order = max_order;
  opt.jobs = jobs;
  opt.cache_path = cache;
  SearchResult res = search_command(corpus, opt);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << res.text();
  if (stats)
    std::cerr << "stats: computed=" << res.stats.computed << " cached=" << res.stats.cached
              << " flagged=" << res.flagged.size() << "\n";
  if (!res.guard_errors.empty()) {
    for (const auto& g : res.guard_errors) std::cerr << "guard exceeded: " << g << "\n";
    return kExitGuard;
  }
  return kExitOk;
}

int run_verdict(const std::string& file) {
  CorpusEntry entry = load_entry(file);
  std::cout << verdict_command(entry) << "\n";
  return kExitOk;
}

int run_oracle(const std::string& file) {
  CorpusEntry entry = load_entry(file);
  auto [pass, report] = oracle_command(entry);
  std::cout << report << "\n";
  return pass ? kExitOk : kExitOracleMismatch;
}

int run_consistency(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto stanzas = parse_pc_corpus(ss.str());
  bool all_ok = true;
  for (const auto& p : stanzas) {
    auto bad = check_consistency(p);
    if (bad.empty()) {
      std::cout << p.name << ": consistent\n";
    } else {
      all_ok = false;
      std::cout << p.name << ": INCONSISTENT (" << bad.size() << " failing tests)\n";
      for (const auto& v : bad) std::cout << "  " << v.describe() << "\n";
    }
  }
  return all_ok ? kExitOk : kExitInconsistent;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obstruction probes for extending free surface actions"};
  app.require_subcommand(1);

  std::string file, format = "text", cache;
  std::vector<std::string> paths;
  bool genus2 = false, stats = false;
  uint64_t seed = 0;
  int64_t min_order = 1, max_order = std::numeric_limits<int64_t>::max();
  int jobs = 1;

  auto* probe = app.add_subcommand("probe", "Full probe of a single group file");
  probe->add_option("file", file)->required();
  probe->add_flag("--genus2", genus2, "also sweep genus-2 relator classes");
  probe->add_option("--seed", seed, "randomization seed");
  probe->add_option("--format", format)->check(CLI::IsMember({"text", "jsonl"}));

  auto* search = app.add_subcommand("search", "Flag groups whose multiplier is not torally generated");
  search->add_option("paths", paths)->required();
  search->add_option("--min-order", min_order);
  search->add_option("--max-order", max_order);
  search->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  search->add_option("--cache", cache, "append-only JSONL result cache");
  search->add_flag("--stats", stats, "print computed/cached counters to stderr");

  auto* verdict = app.add_subcommand("verdict", "Extendability verdict for one group");
  verdict->add_option("file", file)->required();

  auto* oracle = app.add_subcommand("oracle", "Bar-resolution H2 cross-check (|G| <= 32)");
  oracle->add_option("file", file)->required();

  auto* consistency = app.add_subcommand("consistency", "Run the consistency test family");
  consistency->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : kExitOk;
  }

  try {
    if (probe->parsed()) return run_probe(file, genus2, seed, format);
    if (search->parsed()) return run_search(paths, min_order, max_order, jobs, cache, stats);
    if (verdict->parsed()) return run_verdict(file);
    if (oracle->parsed()) return run_oracle(file);
    if (consistency->parsed()) return run_consistency(file);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InconsistentPresentation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const GuardExceeded& e) {
    std::cerr << "resource guard exceeded: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
