#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include "pcprobe/corpus.hpp"
#include "test_util.hpp"

using namespace pcprobe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pcprobe-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& content) const {
    fs::path f = path / name;
    std::ofstream(f) << content;
    return f.string();
  }
};

const char* kV4Stanza =
    "group 4.2\n"
    "gens 2\n"
    "orders 2 2\n";

std::vector<CorpusEntry> bundled_corpus() {
  return load_corpus({test_file("data/corpus")});
}

}  // namespace

TEST_CASE("bundled corpus: per-order group counts") {
  auto corpus = bundled_corpus();
  std::map<int64_t, int64_t> counts;
  for (const auto& e : corpus) counts[e.order]++;
  CHECK(counts[2] == 1);
  CHECK(counts[4] == 2);
  CHECK(counts[8] == 5);
  CHECK(counts[16] == 14);
  CHECK(counts[32] == 51);
  CHECK(counts[64] == 267);
  CHECK(counts[3] == 1);
  CHECK(counts[9] == 2);
  CHECK(counts[27] == 5);
  CHECK(counts[81] == 15);
  CHECK(counts[243] == 67);
  CHECK(corpus.size() == 430);
}

TEST_CASE("bundled corpus: sorted, indices contiguous from 1, orders correct") {
  auto corpus = bundled_corpus();
  std::map<int64_t, int64_t> next_index;
  for (const auto& e : corpus) {
    CHECK(e.id == std::to_string(e.order) + "." + std::to_string(e.index));
    CHECK(e.presentation.order() == e.order);
    CHECK(e.index == ++next_index[e.order]);
    CHECK(e.source_digest.size() == 64);
  }
  CHECK(std::is_sorted(corpus.begin(), corpus.end(),
                       [](const CorpusEntry& a, const CorpusEntry& b) {
                         return std::tie(a.order, a.index) < std::tie(b.order, b.index);
                       }));
}

TEST_CASE("load_corpus rejects duplicate ids") {
  TempDir d;
  d.file("a.pc", kV4Stanza);
  d.file("b.pc", kV4Stanza);
  CHECK_THROWS(load_corpus({d.path.string()}));
}

TEST_CASE("load_corpus rejects inconsistent stanzas and names the id") {
  TempDir d;
  d.file("bad.pc",
         "group 9.1\n"
         "gens 2\n"
         "orders 3 3\n"
         "conj 2 1 = g2^2\n");
  try {
    load_corpus({d.path.string()});
    FAIL("expected InconsistentPresentation");
  } catch (const InconsistentPresentation& e) {
    CHECK(e.id == "9.1");
  }
}

TEST_CASE("load_corpus rejects an order/id mismatch") {
  TempDir d;
  d.file("a.pc",
         "group 8.1\n"
         "gens 2\n"
         "orders 2 2\n");
  CHECK_THROWS(load_corpus({d.path.string()}));
}

TEST_CASE("empty directory loads as an empty corpus") {
  TempDir d;
  CHECK(load_corpus({d.path.string()}).empty());
}

TEST_CASE("canonical digest is stable under reformatting") {
  PcPresentation a = parse_pc_presentation(
      "group 4.2\ngens 2\norders 2 2\n");
  PcPresentation b = parse_pc_presentation(
      "group  4.2\n\ngens   2\norders 2  2\nconj 2 1 = g2\n");
  CHECK(canonical_digest(a) == canonical_digest(b));
}

TEST_CASE("probe report JSONL starts with the schema version") {
  TempDir d;
  CorpusEntry e = load_entry(d.file("a.pc", kV4Stanza));
  ProbeReport r = probe_command(e);
  CHECK(r.jsonl().rfind("{\"schemaVersion\":1,", 0) == 0);
  CHECK(r.group_order == 4);
  CHECK(r.multiplier_order == "2");
  CHECK(r.toral_generated);
  CHECK(r.verdict_kind == "AllExtendNonsingularly");
}

TEST_CASE("probe honours the genus-2 option") {
  CorpusEntry e;
  e.id = "27.x";
  e.order = 27;
  e.index = 0;
  e.presentation = load_test_group("heis27");
  e.source_digest = canonical_digest(e.presentation);
  ProbeOptions opt;
  opt.genus2 = true;
  opt.seed = 7;
  ProbeReport r = probe_command(e, opt);
  CHECK(r.has_genus2);
  CHECK(r.genus2_order == "9");
  CHECK(r.genus2_generated);
  CHECK(r.multiplier_factors == std::vector<std::string>({"3", "3"}));
  CHECK(r.seed == 7);
  CHECK(r.failed_stage.empty());
}

TEST_CASE("probe reports a tripped guard instead of crashing") {
  CorpusEntry e;
  e.id = "27.x";
  e.order = 27;
  e.presentation = load_test_group("heis27");
  e.source_digest = canonical_digest(e.presentation);
  ProbeOptions opt;
  opt.guards.max_elements = 4;
  ProbeReport r = probe_command(e, opt);
  CHECK_FALSE(r.failed_stage.empty());
}

TEST_CASE("search: single- and multi-threaded runs produce identical text") {
  auto corpus = bundled_corpus();
  SearchOptions one;
  one.max_order = 64;
  SearchOptions eight = one;
  eight.jobs = 8;
  SearchResult a = search_command(corpus, one);
  SearchResult b = search_command(corpus, eight);
  CHECK(a.text() == b.text());
  CHECK(a.flagged.size() == b.flagged.size());
  CHECK(a.guard_errors.empty());
}

TEST_CASE("search cache: second run is fully cached, corruption tolerated") {
  auto corpus = bundled_corpus();
  std::vector<CorpusEntry> small;
  for (const auto& e : corpus)
    if (e.order <= 32) small.push_back(e);

  TempDir d;
  SearchOptions opt;
  opt.cache_path = (d.path / "cache.jsonl").string();

  SearchResult first = search_command(small, opt);
  CHECK(first.stats.computed == (int64_t)small.size());
  CHECK(first.stats.cached == 0);

  SearchResult second = search_command(small, opt);
  CHECK(second.stats.computed == 0);
  CHECK(second.stats.cached == (int64_t)small.size());
  CHECK(first.text() == second.text());

  // A torn trailing record (simulated interrupted append) is ignored quietly;
  // a corrupt interior line only produces a warning.
  {
    std::ifstream in(opt.cache_path);
    std::string line, first_line;
    std::getline(in, first_line);
    in.close();
    std::ofstream out(opt.cache_path, std::ios::trunc);
    out << "this is not json\n" << first_line << "\n" << "{\"truncat";
  }
  SearchResult third = search_command(small, opt);
  CHECK(third.stats.cached == 1);
  CHECK(third.stats.computed == (int64_t)small.size() - 1);
  CHECK_FALSE(third.warnings.empty());
  CHECK(first.text() == third.text());
}

TEST_CASE("verdict and oracle commands on a small group") {
  TempDir d;
  CorpusEntry e = load_entry(d.file("a.pc", kV4Stanza));
  std::string v = verdict_command(e);
  CHECK(v.find("AllExtendNonsingularly") != std::string::npos);
  auto [pass, report] = oracle_command(e);
  CHECK(pass);
  CHECK(report.find("PASS") != std::string::npos);
}

TEST_CASE("load_entry falls back to the stanza name for non-numeric ids") {
  TempDir d;
  CorpusEntry e = load_entry(d.file("k.pc", "group klein\ngens 2\norders 2 2\n"));
  CHECK(e.id == "klein");
  CHECK(e.order == 4);
}
