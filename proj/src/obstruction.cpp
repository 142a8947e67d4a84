#include "pcprobe/obstruction.hpp"

#include <algorithm>
#include <cassert>

namespace pcprobe {

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::AllExtendFreely: return "AllExtendFreely";
    case VerdictKind::AllExtendNonsingularly: return "AllExtendNonsingularly";
    case VerdictKind::NonExtendingExists: return "NonExtendingExists";
    case VerdictKind::Indeterminate: return "Indeterminate";
  }
  return "?";
}

TorsionSpan::TorsionSpan(const AbelianStructure& ambient)
    : ambient_(ambient), ambient_order_(ambient.torsion_order()) {}

bool TorsionSpan::add(const std::vector<int64_t>& v) {
  if (std::all_of(v.begin(), v.end(), [](int64_t x) { return x == 0; })) return false;
  if (full()) return false;
  basis_.push_back(v);
  mpz_class o = subgroup_order_in_torsion(ambient_, basis_);
  if (o == order_) {
    basis_.pop_back();
    return false;
  }
  order_ = o;
  return true;
}

namespace {

// tail vector of the lifted commutator [u,v] (u, v commuting or not; gen part
// is the base commutator)
TailedElement lifted_commutator(const MultiplierData& md, const NormalWord& u,
                                const NormalWord& v) {
  Word w;
  auto push_inv = [&](const NormalWord& x) {
    for (int k = (int)x.size(); k >= 1; --k)
      if (x[k - 1] != 0) w.push_back({k, -x[k - 1]});
  };
  auto push_fwd = [&](const NormalWord& x) {
    for (int k = 1; k <= (int)x.size(); ++k)
      if (x[k - 1] != 0) w.push_back({k, x[k - 1]});
  };
  push_inv(u);
  push_inv(v);
  push_fwd(u);
  push_fwd(v);
  return collect_tailed(md.ctx, w);
}

}  // namespace

ToralResult toral_sweep(const MultiplierData& md, const GroupTable& table,
                        const ResourceGuards& g, bool allow_early_exit) {
  int64_t n = table.size();
  if (n > 0 && n > g.max_pairs / n) throw GuardExceeded("pair sweep cap exceeded");

  ToralResult res;
  res.multiplier_order = md.M.torsion_order();
  TorsionSpan span(md.M);

  bool early = false;
  std::vector<char> in_cyclic(n);
  for (int64_t u = 1; u < n && !early; ++u) {
    // mark <u> so cyclic pairs are skipped (their classes vanish)
    std::fill(in_cyclic.begin(), in_cyclic.end(), 0);
    int64_t x = u;
    while (x != 0) {
      in_cyclic[x] = 1;
      x = table.mul(x, u);
    }
    for (int64_t v = u + 1; v < n; ++v) {
      if (in_cyclic[v]) continue;
      if (!table.commute(u, v)) continue;
      TailedElement te = lifted_commutator(md, table.word_of(u), table.word_of(v));
      assert(md.ctx.base->is_identity(te.gen));
      span.add(md.torsion_coords(te.tail));
      if (allow_early_exit && span.full()) {
        early = true;
        break;
      }
    }
  }

  res.toral_order = span.order();
  res.toral_generated = span.full();
  res.toral_basis = span.basis();
  res.swept_exhaustively = !early;
  return res;
}

ToralResult toral_subgroup(const PcPresentation& p, const ResourceGuards& g) {
  MultiplierData md = schur_multiplier(p);
  GroupTable table(p, g);
  return toral_sweep(md, table, g);
}

Genus2Result genus2_sweep(const MultiplierData& md, const GroupTable& table,
                          const ToralResult& toral, Genus2Strategy strategy,
                          uint64_t seed, const ResourceGuards& g) {
  int64_t n = table.size();
  if (n > 0 && n > g.max_pairs / n) throw GuardExceeded("pair sweep cap exceeded");

  Genus2Result res;
  TorsionSpan span(md.M);
  for (const auto& b : toral.toral_basis) span.add(b);

  if (span.full()) {
    res.genus2_order = span.order();
    res.genus2_generated = true;
    res.swept_exhaustively = false;
    return res;
  }

  // Per ordered pair: commutator value and lift tail; fibers by value.
  int m = md.ctx.m;
  std::vector<int64_t> comm_val((size_t)n * n);
  std::vector<int64_t> tails((size_t)n * n * m);
  std::vector<std::vector<int64_t>> fiber(n);  // value -> flat pair indices
  for (int64_t u = 0; u < n; ++u)
    for (int64_t v = 0; v < n; ++v) {
      size_t idx = (size_t)u * n + v;
      TailedElement te = lifted_commutator(md, table.word_of(u), table.word_of(v));
      int64_t c = table.index_of(te.gen);
      comm_val[idx] = c;
      std::copy(te.tail.begin(), te.tail.end(), tails.begin() + idx * m);
      fiber[c].push_back((int64_t)idx);
    }

  // correction tail of the product g * g^-1 in the tailed group
  std::vector<std::vector<int64_t>> corr(n);
  for (int64_t c = 0; c < n; ++c) {
    TailedElement a{table.word_of(c), std::vector<int64_t>(m, 0)};
    TailedElement b{table.word_of(table.inv(c)), std::vector<int64_t>(m, 0)};
    corr[c] = tailed_multiply(md.ctx, a, b).tail;
  }

  std::vector<int64_t> tail(m);
  auto combine_and_add = [&](size_t idx1, size_t idx2, int64_t c) {
    for (int t = 0; t < m; ++t)
      tail[t] = checked_add(checked_add(tails[idx1 * m + t], tails[idx2 * m + t]),
                            corr[c][t]);
    return span.add(md.torsion_coords(tail));
  };

  if (strategy == Genus2Strategy::RandomizedThenExhaustive) {
    std::mt19937_64 rng(seed);
    const int kSamples = 10000;
    for (int s = 0; s < kSamples && !span.full(); ++s) {
      size_t idx1 = (size_t)(rng() % ((uint64_t)n * n));
      int64_t c = comm_val[idx1];
      const auto& fib = fiber[table.inv(c)];
      if (fib.empty()) continue;
      size_t idx2 = (size_t)fib[rng() % fib.size()];
      combine_and_add(idx1, idx2, c);
    }
    if (span.full()) {
      res.genus2_order = span.order();
      res.genus2_generated = true;
      res.swept_exhaustively = false;
      return res;
    }
  }

  bool early = false;
  for (int64_t c = 0; c < n && !early; ++c) {
    const auto& f1 = fiber[c];
    const auto& f2 = fiber[table.inv(c)];
    for (size_t i = 0; i < f1.size() && !early; ++i)
      for (size_t j = 0; j < f2.size(); ++j) {
        combine_and_add((size_t)f1[i], (size_t)f2[j], c);
        if (span.full()) {
          early = true;
          break;
        }
      }
  }

  res.genus2_order = span.order();
  res.genus2_generated = span.full();
  res.swept_exhaustively = !early;
  return res;
}

Genus2Result genus2_subgroup(const PcPresentation& p, Genus2Strategy strategy,
                             uint64_t seed, const ResourceGuards& g) {
  MultiplierData md = schur_multiplier(p);
  GroupTable table(p, g);
  ToralResult toral = toral_sweep(md, table, g);
  return genus2_sweep(md, table, toral, strategy, seed, g);
}

AbelianStructure bogomolov_from(const MultiplierData& md, const ToralResult& toral) {
  return quotient_structure(md.M, toral.toral_basis);
}

AbelianStructure bogomolov(const PcPresentation& p, const ResourceGuards& g) {
  MultiplierData md = schur_multiplier(p);
  GroupTable table(p, g);
  ToralResult toral = toral_sweep(md, table, g);
  return bogomolov_from(md, toral);
}

SphericalResult has_spherical_subgroup(const PcPresentation& p, const ResourceGuards& g) {
  SphericalResult res;
  std::optional<NormalWord> first;
  enumerate_elements(p, g, [&](const NormalWord& u) {
    if (p.is_identity(u)) return;
    if (!p.is_identity(multiply(p, u, u))) return;
    ++res.involution_count;
    if (!first)
      first = u;
    else if (!res.witness)
      res.witness = {*first, u};
  });
  res.possible = res.involution_count >= 2;
  return res;
}

VerdictKind classify(const mpz_class& multiplier_order, bool toral_generated,
                     bool spherical_possible) {
  if (multiplier_order == 1) return VerdictKind::AllExtendFreely;
  if (toral_generated) return VerdictKind::AllExtendNonsingularly;
  if (!spherical_possible) return VerdictKind::NonExtendingExists;
  return VerdictKind::Indeterminate;
}

Verdict verdict(const PcPresentation& p, const ResourceGuards& g) {
  MultiplierData md = schur_multiplier(p);
  GroupTable table(p, g);
  ToralResult toral = toral_sweep(md, table, g);
  SphericalResult sph = has_spherical_subgroup(p, g);
  Verdict v;
  v.multiplier_order = toral.multiplier_order;
  v.toral_generated = toral.toral_generated;
  v.involution_count = sph.involution_count;
  v.spherical_possible = sph.possible;
  v.kind = classify(v.multiplier_order, v.toral_generated, v.spherical_possible);
  return v;
}

int64_t covering_genus(int64_t group_order, int64_t quotient_genus) {
  if (group_order < 1 || quotient_genus < 2)
    throw std::invalid_argument("need group order >= 1 and quotient genus >= 2");
  return checked_add(1, checked_mul(group_order, quotient_genus - 1));
}

}  // namespace pcprobe
