// Corpus ingestion, probe/search/verdict/oracle pipelines, digest-keyed
// caching, and report emission.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pcprobe/obstruction.hpp"

namespace pcprobe {

struct CorpusEntry {
  std::string id;  // "<order>.<index>"
  int64_t order = 0;
  int64_t index = 0;
  PcPresentation presentation;
  std::string source_digest;  // hex SHA-256 of the canonical serialization
};

struct InconsistentPresentation : std::runtime_error {
  std::string id;
  InconsistentPresentation(const std::string& msg, std::string id_)
      : std::runtime_error(msg), id(std::move(id_)) {}
};

std::string sha256_hex(const std::string& data);
std::string canonical_digest(const PcPresentation& p);

// Loads every stanza from the given files/directories. Entries are sorted by
// (order, index); duplicate ids and inconsistent presentations are rejected.
std::vector<CorpusEntry> load_corpus(const std::vector<std::string>& paths);

// Single-file convenience for the one-entry commands; the id falls back to
// the stanza name when it is not of the "<order>.<index>" form.
CorpusEntry load_entry(const std::string& path);

struct ProbeOptions {
  bool genus2 = false;
  uint64_t seed = 0;
  ResourceGuards guards;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct ProbeReport {
  int schema_version = 1;
  std::string id;
  int64_t group_order = 0;
  std::vector<std::string> multiplier_factors;  // decimal invariant factors
  std::string multiplier_order = "1";
  std::string toral_order;
  bool toral_generated = false;
  bool has_genus2 = false;
  std::string genus2_order;
  bool genus2_generated = false;
  int64_t involution_count = 0;
  bool spherical_possible = false;
  std::string verdict_kind;
  std::vector<StageTiming> timings;
  uint64_t seed = 0;
  std::string failed_stage;  // nonempty when a resource guard tripped

  std::string jsonl() const;
  std::string text() const;
};

ProbeReport probe_command(const CorpusEntry& entry, const ProbeOptions& opt = {});

struct SearchOptions {
  int64_t min_order = 1;
  int64_t max_order = std::numeric_limits<int64_t>::max();
  int jobs = 1;
  std::string cache_path;  // empty disables caching
  ResourceGuards guards;
};

struct SearchRecord {
  int64_t order = 0;
  int64_t index = 0;
  std::string multiplier_order;
  std::string toral_order;
};

struct SearchStats {
  int64_t computed = 0;  // toral probes actually run
  int64_t cached = 0;    // probes answered from the cache
};

struct SearchResult {
  std::vector<SearchRecord> flagged;  // sorted by (order, index)
  std::vector<std::string> guard_errors;
  std::vector<std::string> warnings;  // e.g. ignored cache corruption
  SearchStats stats;

  // The four-column form: "order index |M| toralOrder", one line per group.
  std::string text() const;
};

SearchResult search_command(const std::vector<CorpusEntry>& corpus,
                            const SearchOptions& opt = {});

// One line of verdict plus its evidence; prints covering_genus(|G|, 2) when
// a non-extending action exists.
std::string verdict_command(const CorpusEntry& entry, const ResourceGuards& g = {});

// Bar-resolution oracle vs. the pc engine; returns (pass, report text).
std::pair<bool, std::string> oracle_command(const CorpusEntry& entry,
                                            const ResourceGuards& g = {});

}  // namespace pcprobe
