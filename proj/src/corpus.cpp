#include "pcprobe/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace pcprobe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string canonical_digest(const PcPresentation& p) {
  return sha256_hex(serialize_pc_presentation(p));
}

namespace {

// "243.28" -> (243, 28); false when the name is not of that shape.
bool parse_id(const std::string& name, int64_t& order, int64_t& index) {
  auto dot = name.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= name.size()) return false;
  for (size_t i = 0; i < name.size(); ++i)
    if (i != dot && !isdigit((unsigned char)name[i])) return false;
  try {
    order = std::stoll(name.substr(0, dot));
    index = std::stoll(name.substr(dot + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

CorpusEntry make_entry(PcPresentation&& p, const std::string& file, bool strict_id) {
  CorpusEntry e;
  e.presentation = std::move(p);
  e.id = e.presentation.name;
  e.order = e.presentation.order();
  if (parse_id(e.id, e.order, e.index)) {
    if (e.order != e.presentation.order())
      throw std::runtime_error(file + ": id '" + e.id + "' claims order " +
                               std::to_string(e.order) + " but the presentation has order " +
                               std::to_string(e.presentation.order()));
  } else if (strict_id) {
    throw std::runtime_error(file + ": group name '" + e.id +
                             "' is not of the <order>.<index> form required in a corpus");
  }
  auto bad = check_consistency(e.presentation);
  if (!bad.empty())
    throw InconsistentPresentation(file + ": presentation '" + e.id + "' is inconsistent: " +
                                       bad.front().describe(),
                                   e.id);
  e.source_digest = canonical_digest(e.presentation);
  return e;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& path : paths) {
    fs::path fp(path);
    if (fs::is_directory(fp)) {
      std::vector<std::string> here;
      for (const auto& de : fs::directory_iterator(fp))
        if (de.is_regular_file() && de.path().filename().string()[0] != '.')
          here.push_back(de.path().string());
      std::sort(here.begin(), here.end());
      files.insert(files.end(), here.begin(), here.end());
    } else if (fs::is_regular_file(fp)) {
      files.push_back(path);
    } else {
      throw std::runtime_error("no such file or directory: " + path);
    }
  }

  std::vector<CorpusEntry> entries;
  std::map<std::string, std::string> seen;  // id -> file
  for (const auto& file : files) {
    std::vector<PcPresentation> stanzas;
    try {
      stanzas = parse_pc_corpus(slurp(file));
    } catch (const ParseError& e) {
      throw ParseError(file + ":" + std::to_string(e.line) + ": " + e.what(), e.line);
    }
    for (auto& p : stanzas) {
      CorpusEntry e = make_entry(std::move(p), file, /*strict_id=*/true);
      auto [it, fresh] = seen.emplace(e.id, file);
      if (!fresh)
        throw std::runtime_error(file + ": duplicate id '" + e.id + "' (first seen in " +
                                 it->second + ")");
      entries.push_back(std::move(e));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
    return std::tie(a.order, a.index) < std::tie(b.order, b.index);
  });
  return entries;
}

CorpusEntry load_entry(const std::string& path) {
  std::vector<PcPresentation> stanzas;
  try {
    stanzas = parse_pc_corpus(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + std::to_string(e.line) + ": " + e.what(), e.line);
  }
  if (stanzas.size() != 1)
    throw std::runtime_error(path + ": expected exactly one group stanza, found " +
                             std::to_string(stanzas.size()));
  return make_entry(std::move(stanzas.front()), path, /*strict_id=*/false);
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

ProbeReport probe_command(const CorpusEntry& entry, const ProbeOptions& opt) {
  ProbeReport r;
  r.id = entry.id;
  r.group_order = entry.presentation.order();
  r.seed = opt.seed;

  auto stage = [&](const char* name, auto&& body) {
    if (!r.failed_stage.empty()) return;
    auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const GuardExceeded&) {
      r.failed_stage = name;
    }
    r.timings.push_back({name, ms_since(t0)});
  };

  std::optional<MultiplierData> md;
  std::optional<GroupTable> table;
  std::optional<ToralResult> toral;

  stage("multiplier", [&] {
    md.emplace(schur_multiplier(entry.presentation));
    r.multiplier_order = md->M.torsion_order().get_str();
    for (const auto& d : md->M.torsion) r.multiplier_factors.push_back(d.get_str());
  });
  stage("toral", [&] {
    table.emplace(entry.presentation, opt.guards);
    toral = toral_sweep(*md, *table, opt.guards);
    r.toral_order = toral->toral_order.get_str();
    r.toral_generated = toral->toral_generated;
  });
  if (opt.genus2)
    stage("genus2", [&] {
      Genus2Result g2 = genus2_sweep(*md, *table, *toral,
                                     Genus2Strategy::RandomizedThenExhaustive, opt.seed,
                                     opt.guards);
      r.has_genus2 = true;
      r.genus2_order = g2.genus2_order.get_str();
      r.genus2_generated = g2.genus2_generated;
    });
  stage("spherical", [&] {
    SphericalResult sph = has_spherical_subgroup(entry.presentation, opt.guards);
    r.involution_count = sph.involution_count;
    r.spherical_possible = sph.possible;
  });
  stage("verdict", [&] {
    r.verdict_kind = to_string(
        classify(md->M.torsion_order(), toral->toral_generated, r.spherical_possible));
  });
  return r;
}

std::string ProbeReport::jsonl() const {
  json j;
  j["schemaVersion"] = schema_version;
  j["id"] = id;
  j["groupOrder"] = group_order;
  j["multiplierFactors"] = multiplier_factors;
  j["multiplierOrder"] = multiplier_order;
  j["toralOrder"] = toral_order;
  j["toralGenerated"] = toral_generated;
  if (has_genus2) {
    j["genus2Order"] = genus2_order;
    j["genus2Generated"] = genus2_generated;
  }
  j["involutionCount"] = involution_count;
  j["sphericalPossible"] = spherical_possible;
  j["verdictKind"] = verdict_kind;
  json t = json::object();
  for (const auto& s : timings) t[s.stage] = s.ms;
  j["timingsMs"] = t;
  j["seed"] = seed;
  if (!failed_stage.empty()) j["failedStage"] = failed_stage;
  return j.dump();
}

std::string ProbeReport::text() const {
  std::ostringstream out;
  out << "group " << id << "  order " << group_order << "\n";
  out << "  multiplier order " << multiplier_order;
  if (!multiplier_factors.empty()) {
    out << "  factors (";
    for (size_t i = 0; i < multiplier_factors.size(); ++i)
      out << (i ? "," : "") << multiplier_factors[i];
    out << ")";
  }
  out << "\n";
  out << "  toral order " << toral_order << "  generated "
      << (toral_generated ? "true" : "false") << "\n";
  if (has_genus2)
    out << "  genus2 order " << genus2_order << "  generated "
        << (genus2_generated ? "true" : "false") << "\n";
  out << "  involutions " << involution_count << "  spherical possible "
      << (spherical_possible ? "true" : "false") << "\n";
  out << "  verdict " << verdict_kind << "\n";
  if (!failed_stage.empty()) out << "  FAILED stage " << failed_stage << " (resource guard)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// search with digest-keyed cache
// ---------------------------------------------------------------------------

namespace {

struct ToralCacheRecord {
  std::string multiplier_order;
  std::string toral_order;
  bool toral_generated = false;
};

// Append-only JSONL cache keyed by content digest. A torn trailing record
// (e.g. from a killed writer) is ignored; any other malformed line is
// reported as corruption and skipped.
std::map<std::string, ToralCacheRecord> read_cache(const std::string& path,
                                                   std::vector<std::string>& warnings) {
  std::map<std::string, ToralCacheRecord> cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      if (in.peek() == EOF) break;  // torn trailing record
      warnings.push_back(path + ":" + std::to_string(lineno) +
                         ": ignoring corrupt cache line");
      continue;
    }
    try {
      ToralCacheRecord rec;
      rec.multiplier_order = j.at("multiplierOrder").get<std::string>();
      rec.toral_order = j.at("toralOrder").get<std::string>();
      rec.toral_generated = j.at("toralGenerated").get<bool>();
      cache[j.at("digest").get<std::string>()] = rec;
    } catch (const json::exception&) {
      warnings.push_back(path + ":" + std::to_string(lineno) +
                         ": ignoring malformed cache record");
    }
  }
  return cache;
}

std::string cache_line(const std::string& digest, const ToralCacheRecord& rec) {
  json j;
  j["digest"] = digest;
  j["multiplierOrder"] = rec.multiplier_order;
  j["toralOrder"] = rec.toral_order;
  j["toralGenerated"] = rec.toral_generated;
  return j.dump();
}

}  // namespace

SearchResult search_command(const std::vector<CorpusEntry>& corpus,
                            const SearchOptions& opt) {
  SearchResult result;

  std::map<std::string, ToralCacheRecord> cache;
  if (!opt.cache_path.empty()) cache = read_cache(opt.cache_path, result.warnings);

  std::vector<const CorpusEntry*> work;
  for (const auto& e : corpus)
    if (e.order >= opt.min_order && e.order <= opt.max_order) work.push_back(&e);

  struct Slot {
    bool ok = false;
    bool flagged = false;
    ToralCacheRecord rec;
    bool from_cache = false;
    std::string guard_error;
  };
  std::vector<Slot> slots(work.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const CorpusEntry& e = *work[i];
      Slot& s = slots[i];
      if (auto it = cache.find(e.source_digest); it != cache.end()) {
        s.rec = it->second;
        s.from_cache = true;
        s.ok = true;
      } else {
        try {
          MultiplierData md = schur_multiplier(e.presentation);
          GroupTable table(e.presentation, opt.guards);
          ToralResult t = toral_sweep(md, table, opt.guards);
          s.rec.multiplier_order = t.multiplier_order.get_str();
          s.rec.toral_order = t.toral_order.get_str();
          s.rec.toral_generated = t.toral_generated;
          s.ok = true;
        } catch (const GuardExceeded& ex) {
          s.guard_error = e.id + ": " + ex.what();
        }
      }
      if (s.ok) s.flagged = !s.rec.toral_generated;
    }
  };

  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Merge in corpus order (already sorted by (order, index)); append fresh
  // results to the cache under an exclusive writer.
  std::ofstream cache_out;
  if (!opt.cache_path.empty())
    cache_out.open(opt.cache_path, std::ios::app);
  for (size_t i = 0; i < work.size(); ++i) {
    const Slot& s = slots[i];
    if (!s.ok) {
      result.guard_errors.push_back(s.guard_error);
      continue;
    }
    if (s.from_cache)
      ++result.stats.cached;
    else {
      ++result.stats.computed;
      if (cache_out) cache_out << cache_line(work[i]->source_digest, s.rec) << "\n";
    }
    if (s.flagged)
      result.flagged.push_back(
          {work[i]->order, work[i]->index, s.rec.multiplier_order, s.rec.toral_order});
  }
  return result;
}

std::string SearchResult::text() const {
  std::ostringstream out;
  for (const auto& r : flagged)
    out << r.order << " " << r.index << " " << r.multiplier_order << " " << r.toral_order
        << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// verdict / oracle
// ---------------------------------------------------------------------------

std::string verdict_command(const CorpusEntry& entry, const ResourceGuards& g) {
  Verdict v = verdict(entry.presentation, g);
  std::ostringstream out;
  out << entry.id << ": " << to_string(v.kind) << "  (|M| = " << v.multiplier_order
      << ", toral generated " << (v.toral_generated ? "true" : "false") << ", involutions "
      << v.involution_count << ")";
  if (v.kind == VerdictKind::NonExtendingExists)
    out << "\n  minimal probe genus " << covering_genus(entry.presentation.order(), 2)
        << " (free cover of a genus-2 surface)";
  return out.str();
}

std::pair<bool, std::string> oracle_command(const CorpusEntry& entry,
                                            const ResourceGuards& g) {
  AbelianStructure bar = h2_bar_oracle(entry.presentation, g);
  MultiplierData md = schur_multiplier(entry.presentation);
  bool pass = bar.torsion == md.M.torsion && bar.free_rank == md.M.free_rank;
  std::ostringstream out;
  out << entry.id << ": engine " << md.M.str() << "  bar-resolution " << bar.str() << "  "
      << (pass ? "PASS" : "FAIL");
  return {pass, out.str()};
}

}  // namespace pcprobe
