#include "pcprobe/zlinalg.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "pcprobe/pc.hpp"  // OverflowError

namespace pcprobe {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y) {
  assert(x.cols == y.rows);
  IntMatrix r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const mpz_class& xa = x.at(i, k);
      if (xa == 0) continue;
      for (int j = 0; j < y.cols; ++j) r.at(i, j) += xa * y.at(k, j);
    }
  return r;
}

std::vector<mpz_class> SnfResult::diag() const {
  std::vector<mpz_class> d;
  for (int i = 0; i < std::min(S.rows, S.cols); ++i) d.push_back(S.at(i, i));
  return d;
}

namespace {

struct SnfWork {
  IntMatrix A, U, V;
  bool transforms;

  void row_swap(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < A.cols; ++c) std::swap(A.at(i, c), A.at(j, c));
    if (transforms)
      for (int c = 0; c < U.cols; ++c) std::swap(U.at(i, c), U.at(j, c));
  }
  void col_swap(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < A.rows; ++r) std::swap(A.at(r, i), A.at(r, j));
    if (transforms)
      for (int r = 0; r < V.rows; ++r) std::swap(V.at(r, i), V.at(r, j));
  }
  // row i -= q * row j
  void row_sub(int i, int j, const mpz_class& q) {
    if (q == 0) return;
    for (int c = 0; c < A.cols; ++c) A.at(i, c) -= q * A.at(j, c);
    if (transforms)
      for (int c = 0; c < U.cols; ++c) U.at(i, c) -= q * U.at(j, c);
  }
  void col_sub(int i, int j, const mpz_class& q) {
    if (q == 0) return;
    for (int r = 0; r < A.rows; ++r) A.at(r, i) -= q * A.at(r, j);
    if (transforms)
      for (int r = 0; r < V.rows; ++r) V.at(r, i) -= q * V.at(r, j);
  }
  void row_negate(int i) {
    for (int c = 0; c < A.cols; ++c) A.at(i, c) = -A.at(i, c);
    if (transforms)
      for (int c = 0; c < U.cols; ++c) U.at(i, c) = -U.at(i, c);
  }

  // Quotient of a by positive p with the remainder minimized in absolute
  // value; keeps entry growth polynomial during elimination.
  static mpz_class nearest_quot(const mpz_class& a, const mpz_class& p) {
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    if (2 * r > p) q += 1;
    return q;
  }

  int run() {  // returns rank
    int t = 0;
    int lim = std::min(A.rows, A.cols);
    while (t < lim) {
      // Move the least-|value| nonzero entry of the trailing submatrix to the
      // pivot position. Re-selecting the global minimum every round (rather
      // than chasing remainders in place) is what keeps coefficients small.
      int pi = -1, pj = -1;
      for (int i = t; i < A.rows; ++i)
        for (int j = t; j < A.cols; ++j) {
          const mpz_class& v = A.at(i, j);
          if (v == 0) continue;
          if (pi < 0 || mpz_cmpabs(v.get_mpz_t(), A.at(pi, pj).get_mpz_t()) < 0) {
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) break;
      row_swap(t, pi);
      col_swap(t, pj);
      if (A.at(t, t) < 0) row_negate(t);

      // One reduction pass over column t, then row t. Any surviving nonzero
      // is a remainder of at most half the pivot, so looping back to the
      // pivot search makes the minimum entry shrink geometrically.
      bool dirty = false;
      for (int i = t + 1; i < A.rows; ++i) {
        if (A.at(i, t) == 0) continue;
        row_sub(i, t, nearest_quot(A.at(i, t), A.at(t, t)));
        if (A.at(i, t) != 0) dirty = true;
      }
      for (int j = t + 1; j < A.cols; ++j) {
        if (A.at(t, j) == 0) continue;
        col_sub(j, t, nearest_quot(A.at(t, j), A.at(t, t)));
        if (A.at(t, j) != 0) dirty = true;
      }
      if (dirty) continue;

      // The pivot must divide every remaining entry; if not, fold the
      // offending row in and redo this round.
      bool redo = false;
      for (int i = t + 1; i < A.rows && !redo; ++i)
        for (int j = t + 1; j < A.cols && !redo; ++j)
          if (A.at(i, j) % A.at(t, t) != 0) {
            row_sub(t, i, mpz_class(-1));  // row t += row i
            redo = true;
          }
      if (!redo) ++t;
    }
    return t;
  }
};

}  // namespace

SnfResult smith_normal_form(const IntMatrix& A) {
  SnfWork w{A, IntMatrix::identity(A.rows), IntMatrix::identity(A.cols), true};
  int rank = w.run();
  SnfResult r;
  r.S = std::move(w.A);
  r.U = std::move(w.U);
  r.V = std::move(w.V);
  r.rank = rank;
  return r;
}

std::pair<std::vector<mpz_class>, int> invariant_factors(const IntMatrix& A) {
  SnfWork w{A, {}, {}, false};
  int rank = w.run();
  std::vector<mpz_class> d;
  for (int i = 0; i < rank; ++i) d.push_back(w.A.at(i, i));
  return {d, rank};
}

std::string AbelianStructure::str() const {
  if (trivial()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& d : torsion) {
    if (!first) os << " x ";
    os << "Z/" << d;
    first = false;
  }
  if (free_rank > 0) {
    if (!first) os << " x ";
    os << "Z^" << free_rank;
  }
  return os.str();
}

AbelianStructure abelian_structure(const IntMatrix& relations) {
  auto [d, rank] = invariant_factors(relations);
  AbelianStructure s;
  for (const auto& v : d)
    if (v > 1) s.torsion.push_back(v);
  s.free_rank = relations.cols - rank;
  return s;
}

static IntMatrix stack_ambient_and_gens(const AbelianStructure& ambient,
                                        const std::vector<std::vector<int64_t>>& gens) {
  if (ambient.free_rank != 0)
    throw std::invalid_argument("ambient group must be finite");
  int s = (int)ambient.torsion.size();
  for (const auto& g : gens)
    if ((int)g.size() != s) throw std::invalid_argument("generator dimension mismatch");
  IntMatrix m(s + (int)gens.size(), s);
  for (int i = 0; i < s; ++i) m.at(i, i) = ambient.torsion[i];
  for (int r = 0; r < (int)gens.size(); ++r)
    for (int j = 0; j < s; ++j) m.at(s + r, j) = gens[r][j];
  return m;
}

mpz_class subgroup_order_in_torsion(const AbelianStructure& ambient,
                                    const std::vector<std::vector<int64_t>>& gens) {
  if (gens.empty()) return 1;
  AbelianStructure q = abelian_structure(stack_ambient_and_gens(ambient, gens));
  mpz_class order = ambient.torsion_order() / q.torsion_order();
  return order;
}

AbelianStructure quotient_structure(const AbelianStructure& ambient,
                                    const std::vector<std::vector<int64_t>>& gens) {
  if (gens.empty()) return ambient;
  return abelian_structure(stack_ambient_and_gens(ambient, gens));
}

// ---------------------------------------------------------------------------
// RowSpace: streaming Hermite form
// ---------------------------------------------------------------------------

namespace {

inline int64_t chk_mul(int64_t a, int64_t b) { return checked_mul(a, b); }
inline int64_t chk_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("sub overflow");
  return r;
}

template <typename Z>
int first_nonzero(const std::vector<Z>& row, int from) {
  for (int j = from; j < (int)row.size(); ++j)
    if (row[j] != 0) return j;
  return -1;
}

}  // namespace

RowSpace::RowSpace(int cols) : cols_(cols), pivot_row_(cols, -1) {}

template <typename Row>
void RowSpace::add_row_impl(std::vector<Row>& rows, Row& row) {
  int j = first_nonzero(row, 0);
  while (j >= 0) {
    int pr = pivot_row_[j];
    if (pr < 0) {
      if (row[j] < 0)
        for (auto& v : row) v = -v;
      pivot_row_[j] = (int)rows.size();
      rows.push_back(std::move(row));
      return;
    }
    Row& piv = rows[pr];
    // gcd-reduce row against the pivot row at column j. In the int64 case
    // each subtraction is staged and committed atomically, so an overflow
    // leaves both rows exactly as they were after the last complete
    // elementary operation and the caller can escalate without losing span.
    while (row[j] != 0) {
      // Materialize the quotient: gmpxx '/' yields a lazy expression that
      // would re-evaluate against the mutated row.
      typename Row::value_type q = row[j] / piv[j];
      if (q != 0) {
        if constexpr (std::is_same_v<Row, std::vector<int64_t>>) {
          std::vector<int64_t> staged(cols_ - j);
          for (int c = j; c < cols_; ++c)
            staged[c - j] = chk_sub(row[c], chk_mul((int64_t)q, piv[c]));
          for (int c = j; c < cols_; ++c) row[c] = staged[c - j];
        } else {
          for (int c = j; c < cols_; ++c) row[c] -= q * piv[c];
        }
      }
      if (row[j] != 0) std::swap(row, piv);
    }
    j = first_nonzero(row, j + 1);
  }
}

void RowSpace::escalate() {
  brows_.clear();
  brows_.reserve(rows_.size());
  for (auto& r : rows_) {
    std::vector<mpz_class> br(cols_);
    for (int c = 0; c < cols_; ++c) br[c] = r[c];
    brows_.push_back(std::move(br));
  }
  rows_.clear();
  big_ = true;
}

void RowSpace::add_row(const std::vector<std::pair<int, int64_t>>& sparse_row) {
  if (!big_) {
    std::vector<int64_t> row64(cols_, 0);
    bool accumulated = true;
    try {
      for (auto& [c, v] : sparse_row) row64[c] = checked_add(row64[c], v);
    } catch (const OverflowError&) {
      accumulated = false;
    }
    if (accumulated) {
      try {
        add_row_impl(rows_, row64);
        return;
      } catch (const OverflowError&) {
        // Every completed mutation preserved the joint span of the stored
        // rows and the in-flight row, so convert everything and resume with
        // the partially reduced row.
        escalate();
        std::vector<mpz_class> row(cols_);
        for (int c = 0; c < cols_; ++c) row[c] = row64[c];
        add_row_impl(brows_, row);
        return;
      }
    }
    escalate();
  }
  std::vector<mpz_class> row(cols_);
  for (auto& [c, v] : sparse_row) row[c] += v;
  add_row_impl(brows_, row);
}

int RowSpace::rank() const { return big_ ? (int)brows_.size() : (int)rows_.size(); }

AbelianStructure RowSpace::quotient() const {
  int r = rank();
  IntMatrix m(r, cols_);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < cols_; ++j)
      m.at(i, j) = big_ ? brows_[i][j] : mpz_class(rows_[i][j]);
  return abelian_structure(m);
}

}  // namespace pcprobe
