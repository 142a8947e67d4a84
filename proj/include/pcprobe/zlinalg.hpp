// Exact integer linear algebra: Smith normal form with transformation
// matrices, and finitely generated abelian group bookkeeping.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace pcprobe {

struct IntMatrix {
  int rows = 0, cols = 0;
  std::vector<mpz_class> a;  // row-major

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}
  mpz_class& at(int i, int j) { return a[(size_t)i * cols + j]; }
  const mpz_class& at(int i, int j) const { return a[(size_t)i * cols + j]; }
  static IntMatrix identity(int n);
  bool operator==(const IntMatrix&) const = default;
};

IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y);

struct SnfResult {
  IntMatrix S;              // diagonal, d_1 | d_2 | ... | d_rank then zeros
  IntMatrix U, V;           // unimodular, U*A*V = S
  int rank = 0;
  std::vector<mpz_class> diag() const;  // first min(r,c) diagonal entries
};

// Pivot choice: nonzero entry of least absolute value each round.
SnfResult smith_normal_form(const IntMatrix& A);

// Invariant factors and rank only (no transforms); same elimination scheme.
std::pair<std::vector<mpz_class>, int> invariant_factors(const IntMatrix& A);

struct AbelianStructure {
  std::vector<mpz_class> torsion;  // d_1 | d_2 | ..., each >= 2
  int free_rank = 0;

  mpz_class torsion_order() const {
    mpz_class o = 1;
    for (const auto& d : torsion) o *= d;
    return o;
  }
  bool trivial() const { return torsion.empty() && free_rank == 0; }
  bool operator==(const AbelianStructure&) const = default;
  std::string str() const;  // e.g. "Z/2 x Z/4 x Z^2", "1" when trivial
};

// Structure of Z^c / rowspace(relations).
AbelianStructure abelian_structure(const IntMatrix& relations);

// Order of the subgroup of (+) Z/d_k generated by the given coordinate
// vectors. Requires ambient.free_rank == 0.
mpz_class subgroup_order_in_torsion(const AbelianStructure& ambient,
                                    const std::vector<std::vector<int64_t>>& gens);

// Invariant factors of ambient / <gens>.
AbelianStructure quotient_structure(const AbelianStructure& ambient,
                                    const std::vector<std::vector<int64_t>>& gens);

// Streaming row-space accumulator for large sparse relation matrices: rows
// are folded into a row Hermite form as they arrive, so memory stays at
// O(cols^2) no matter how many rows are fed in. Arithmetic runs in checked
// int64 and escalates to GMP only if an intermediate overflows.
class RowSpace {
 public:
  explicit RowSpace(int cols);
  void add_row(const std::vector<std::pair<int, int64_t>>& sparse_row);
  int rank() const;
  // Invariant factors (>1) of Z^cols / rowspace.
  AbelianStructure quotient() const;

 private:
  int cols_;
  bool big_ = false;
  std::vector<std::vector<int64_t>> rows_;      // small path, by pivot col
  std::vector<std::vector<mpz_class>> brows_;   // big path
  std::vector<int> pivot_row_;                  // col -> row index or -1
  void escalate();
  template <typename Row>
  void add_row_impl(std::vector<Row>& rows, Row& incoming);
};

}  // namespace pcprobe
