// Schur multiplier of a finite pc group via a centrally tailed presentation,
// plus an independent bar-resolution homology oracle.
#pragma once

#include "pcprobe/pc.hpp"
#include "pcprobe/zlinalg.hpp"

namespace pcprobe {

// One central tail generator per pc relation: powers first (by i), then
// conjugations by (j,i) lexicographic.
struct TailedContext {
  const PcPresentation* base;
  int m;  // n(n+1)/2

  explicit TailedContext(const PcPresentation& p);
  int power_tail(int i) const { return i - 1; }                 // 0-based
  int conj_tail(int j, int i) const;                            // 0-based
};

struct TailedElement {
  NormalWord gen;
  std::vector<int64_t> tail;
};

// Normal form in the tailed group. Tails are central and accumulate
// additively, one unit per relation application.
TailedElement collect_tailed(const TailedContext& ctx, const Word& w);
TailedElement tailed_multiply(const TailedContext& ctx, const TailedElement& u,
                              const TailedElement& v);

// Rows indexed by the standard consistency tests (zero rows retained), m
// columns; row = tail(left) - tail(right).
IntMatrix consistency_relation_matrix(const TailedContext& ctx);

struct MultiplierData {
  TailedContext ctx;
  AbelianStructure T;   // Z^m / rowspace; free rank must equal n
  AbelianStructure M;   // torsion part of T: the Schur multiplier
  // Coordinate map: tail vector t -> t * V; entries at torsion positions are
  // classes mod the matching diagonal entry, trailing cols are free coords.
  IntMatrix V;
  std::vector<mpz_class> snf_diag;  // full diagonal incl. 1s
  int rank = 0;
  std::vector<int> torsion_cols;    // columns of V giving M's coordinates

  // Torsion coordinates of a tail vector, reduced mod invariant factors.
  std::vector<int64_t> torsion_coords(const std::vector<int64_t>& tail) const;
  // Free coordinates (must vanish for relator lifts).
  std::vector<mpz_class> free_coords(const std::vector<int64_t>& tail) const;
};

MultiplierData schur_multiplier(const PcPresentation& p);

// Class in M of a relator word's lift (word must collect to the identity in
// the base group).
std::vector<int64_t> lift_class(const MultiplierData& mult, const Word& relator);

// H_2(G; Z) from the normalized bar resolution; independent oracle,
// guarded by guards.bar_oracle_max_order.
AbelianStructure h2_bar_oracle(const PcPresentation& p, const ResourceGuards& g = {});

}  // namespace pcprobe
