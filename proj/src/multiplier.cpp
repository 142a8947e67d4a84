#include "pcprobe/multiplier.hpp"

#include <cassert>
#include <stdexcept>

namespace pcprobe {

TailedContext::TailedContext(const PcPresentation& p) : base(&p) {
  if (!check_consistency(p).empty())
    throw std::invalid_argument("presentation '" + p.name + "' is not consistent");
  m = p.n * (p.n + 1) / 2;
}

int TailedContext::conj_tail(int j, int i) const {
  return base->n + (j - 1) * (j - 2) / 2 + (i - 1);
}

namespace {

struct TailAcc {
  const TailedContext& ctx;
  std::vector<int64_t>& tail;
  void on_power(int i, int s) {
    tail[ctx.power_tail(i)] = checked_add(tail[ctx.power_tail(i)], s);
  }
  void on_conj(int j, int i, int64_t c) {
    int t = ctx.conj_tail(j, i);
    tail[t] = checked_add(tail[t], c);
  }
};

}  // namespace

TailedElement collect_tailed(const TailedContext& ctx, const Word& w) {
  const PcPresentation& p = *ctx.base;
  TailedElement e{p.identity(), std::vector<int64_t>(ctx.m, 0)};
  Word base_letters;
  for (const Letter& l : w) {
    if (l.gen > p.n) {  // tail letter; central, accumulates directly
      int t = l.gen - p.n - 1;
      if (t < 0 || t >= ctx.m) throw std::invalid_argument("tail index out of range");
      e.tail[t] = checked_add(e.tail[t], l.exp);
    } else {
      base_letters.push_back(l);
    }
  }
  TailAcc acc{ctx, e.tail};
  collect_with_hooks(p, base_letters, e.gen,
                     [&](int i, int s) { acc.on_power(i, s); },
                     [&](int j, int i, int64_t c) { acc.on_conj(j, i, c); });
  return e;
}

TailedElement tailed_multiply(const TailedContext& ctx, const TailedElement& u,
                              const TailedElement& v) {
  TailedElement r{u.gen, u.tail};
  for (int t = 0; t < ctx.m; ++t) r.tail[t] = checked_add(r.tail[t], v.tail[t]);
  TailAcc acc{ctx, r.tail};
  collect_with_hooks(*ctx.base, to_word(v.gen), r.gen,
                     [&](int i, int s) { acc.on_power(i, s); },
                     [&](int j, int i, int64_t c) { acc.on_conj(j, i, c); });
  return r;
}

IntMatrix consistency_relation_matrix(const TailedContext& ctx) {
  const PcPresentation& p = *ctx.base;
  auto gen = [&](int k) { return collect_tailed(ctx, {{k, 1}}); };
  std::vector<std::vector<int64_t>> rows;
  auto emit = [&](const TailedElement& l, const TailedElement& r) {
    assert(l.gen == r.gen);  // base is consistent
    std::vector<int64_t> row(ctx.m);
    for (int t = 0; t < ctx.m; ++t) row[t] = checked_add(l.tail[t], -r.tail[t]);
    rows.push_back(std::move(row));
  };

  for (int k = 3; k <= p.n; ++k)
    for (int j = 2; j < k; ++j)
      for (int i = 1; i < j; ++i) {
        TailedElement inner = collect_tailed(ctx, {{j, 1}, {i, 1}});
        TailedElement left = tailed_multiply(ctx, gen(k), inner);
        TailedElement inner2 = collect_tailed(ctx, {{k, 1}, {j, 1}});
        TailedElement right = tailed_multiply(ctx, inner2, gen(i));
        emit(left, right);
      }
  for (int j = 2; j <= p.n; ++j)
    for (int i = 1; i < j; ++i) {
      int64_t ej = p.rel_orders[j - 1];
      TailedElement left = tailed_multiply(ctx, collect_tailed(ctx, {{j, ej}}), gen(i));
      TailedElement right = tailed_multiply(
          ctx, collect_tailed(ctx, {{j, ej - 1}}), collect_tailed(ctx, {{j, 1}, {i, 1}}));
      emit(left, right);
    }
  for (int j = 2; j <= p.n; ++j)
    for (int i = 1; i < j; ++i) {
      int64_t ei = p.rel_orders[i - 1];
      TailedElement left = tailed_multiply(ctx, gen(j), collect_tailed(ctx, {{i, ei}}));
      TailedElement right = tailed_multiply(
          ctx, collect_tailed(ctx, {{j, 1}, {i, 1}}), collect_tailed(ctx, {{i, ei - 1}}));
      emit(left, right);
    }
  for (int i = 1; i <= p.n; ++i) {
    int64_t ei = p.rel_orders[i - 1];
    TailedElement pw = collect_tailed(ctx, {{i, ei}});
    TailedElement left = tailed_multiply(ctx, pw, gen(i));
    TailedElement right = tailed_multiply(ctx, gen(i), pw);
    emit(left, right);
  }

  IntMatrix A((int)rows.size(), ctx.m);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < ctx.m; ++c) A.at(r, c) = rows[r][c];
  return A;
}

std::vector<int64_t> MultiplierData::torsion_coords(
    const std::vector<int64_t>& tail) const {
  std::vector<int64_t> out;
  out.reserve(torsion_cols.size());
  for (int c : torsion_cols) {
    mpz_class y = 0;
    for (int k = 0; k < V.rows; ++k) y += tail[k] * V.at(k, c);
    mpz_class d = snf_diag[c];
    y %= d;
    if (y < 0) y += d;
    out.push_back((int64_t)y.get_si());
  }
  return out;
}

std::vector<mpz_class> MultiplierData::free_coords(
    const std::vector<int64_t>& tail) const {
  std::vector<mpz_class> out;
  for (int c = rank; c < V.cols; ++c) {
    mpz_class y = 0;
    for (int k = 0; k < V.rows; ++k) y += tail[k] * V.at(k, c);
    out.push_back(y);
  }
  return out;
}

MultiplierData schur_multiplier(const PcPresentation& p) {
  TailedContext ctx(p);
  IntMatrix A = consistency_relation_matrix(ctx);
  SnfResult snf = smith_normal_form(A);

  MultiplierData md{ctx, {}, {}, snf.V, {}, snf.rank, {}};
  for (int i = 0; i < snf.rank; ++i) md.snf_diag.push_back(snf.S.at(i, i));
  md.T.free_rank = ctx.m - snf.rank;
  for (int i = 0; i < snf.rank; ++i)
    if (snf.S.at(i, i) > 1) {
      md.T.torsion.push_back(snf.S.at(i, i));
      md.torsion_cols.push_back(i);
    }
  md.M.torsion = md.T.torsion;
  md.M.free_rank = 0;
  if (md.T.free_rank != p.n)
    throw std::logic_error("multiplier engine bug: free rank != generator count for '" +
                           p.name + "'");
  return md;
}

std::vector<int64_t> lift_class(const MultiplierData& mult, const Word& relator) {
  TailedElement e = collect_tailed(mult.ctx, relator);
  if (!mult.ctx.base->is_identity(e.gen))
    throw std::invalid_argument("word is not a relator of the base group");
  for (const mpz_class& f : mult.free_coords(e.tail))
    if (f != 0) throw std::logic_error("relator lift has nonzero free coordinates");
  return mult.torsion_coords(e.tail);
}

AbelianStructure h2_bar_oracle(const PcPresentation& p, const ResourceGuards& g) {
  int64_t n = p.order();
  if (n > g.bar_oracle_max_order)
    throw GuardExceeded("bar-resolution oracle supports |G| <= " +
                        std::to_string(g.bar_oracle_max_order));
  GroupTable tab(p, g);
  int64_t k = n - 1;  // non-identity elements 1..n-1

  // rank of d2: rows [a|b] -> [b] - [ab] + [a] over C1 = Z^k
  RowSpace d2((int)k);
  for (int64_t a = 1; a < n; ++a)
    for (int64_t b = 1; b < n; ++b) {
      std::vector<std::pair<int, int64_t>> row;
      row.push_back({(int)(b - 1), 1});
      int64_t ab = tab.mul(a, b);
      if (ab != 0) row.push_back({(int)(ab - 1), -1});
      row.push_back({(int)(a - 1), 1});
      d2.add_row(row);
    }

  // invariant factors of d3: rows [a|b|c] -> [b|c] - [ab|c] + [a|bc] - [a|b]
  auto pidx = [&](int64_t x, int64_t y) { return (int)((x - 1) * k + (y - 1)); };
  RowSpace d3((int)(k * k));
  for (int64_t a = 1; a < n; ++a)
    for (int64_t b = 1; b < n; ++b) {
      int64_t ab = tab.mul(a, b);
      for (int64_t c = 1; c < n; ++c) {
        std::vector<std::pair<int, int64_t>> row;
        row.push_back({pidx(b, c), 1});
        if (ab != 0) row.push_back({pidx(ab, c), -1});
        int64_t bc = tab.mul(b, c);
        if (bc != 0) row.push_back({pidx(a, bc), 1});
        row.push_back({pidx(a, b), -1});
        d3.add_row(row);
      }
    }

  AbelianStructure quot = d3.quotient();  // torsion = invariant factors of d3
  AbelianStructure h2;
  h2.torsion = quot.torsion;
  h2.free_rank = (int)(k * k) - d2.rank() - d3.rank();
  return h2;
}

}  // namespace pcprobe
