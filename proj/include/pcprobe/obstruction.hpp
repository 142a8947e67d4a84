// Decision layer: toral subgroup of the multiplier, genus-2 subgroup,
// Bogomolov quotient, spherical-subgroup detection, and the extendability
// verdict for free orientation-preserving surface actions.
#pragma once

#include <optional>
#include <random>

#include "pcprobe/multiplier.hpp"

namespace pcprobe {

struct ToralResult {
  mpz_class multiplier_order;
  mpz_class toral_order;
  bool toral_generated = false;
  std::vector<std::vector<int64_t>> toral_basis;  // coordinates in M
  bool swept_exhaustively = false;
};

struct Genus2Result {
  mpz_class genus2_order;
  bool genus2_generated = false;
  bool swept_exhaustively = false;
};

enum class VerdictKind {
  AllExtendFreely,
  AllExtendNonsingularly,
  NonExtendingExists,
  Indeterminate,
};
const char* to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind;
  mpz_class multiplier_order;
  bool toral_generated = false;
  int64_t involution_count = 0;
  bool spherical_possible = false;
};

enum class Genus2Strategy { RandomizedThenExhaustive, Exhaustive };

// Incrementally grown subgroup of a finite abelian group given by invariant
// factors; add() reports whether the subgroup grew.
class TorsionSpan {
 public:
  explicit TorsionSpan(const AbelianStructure& ambient);
  bool add(const std::vector<int64_t>& v);
  const mpz_class& order() const { return order_; }
  bool full() const { return order_ == ambient_order_; }
  const std::vector<std::vector<int64_t>>& basis() const { return basis_; }

 private:
  const AbelianStructure ambient_;
  mpz_class ambient_order_;
  mpz_class order_ = 1;
  std::vector<std::vector<int64_t>> basis_;
};

// Span of classes of lifted commutators of commuting pairs. The sweep skips
// identities, uses only u-index < v-index, and skips v in <u>; generation may
// be certified early, a strict subgroup is only reported after the full
// pruned sweep.
ToralResult toral_sweep(const MultiplierData& md, const GroupTable& table,
                        const ResourceGuards& g = {}, bool allow_early_exit = true);
ToralResult toral_subgroup(const PcPresentation& p, const ResourceGuards& g = {});

// Span of classes of lifts [u,v][w,x] over quadruples with [u,v][w,x] = 1,
// seeded with the toral classes (degenerate quadruples).
Genus2Result genus2_sweep(const MultiplierData& md, const GroupTable& table,
                          const ToralResult& toral,
                          Genus2Strategy strategy = Genus2Strategy::RandomizedThenExhaustive,
                          uint64_t seed = 0, const ResourceGuards& g = {});
Genus2Result genus2_subgroup(const PcPresentation& p,
                             Genus2Strategy strategy = Genus2Strategy::RandomizedThenExhaustive,
                             uint64_t seed = 0, const ResourceGuards& g = {});

// M(G) modulo toral classes.
AbelianStructure bogomolov(const PcPresentation& p, const ResourceGuards& g = {});
AbelianStructure bogomolov_from(const MultiplierData& md, const ToralResult& toral);

// True iff the group has at least two involutions; equivalent to containing
// a subgroup isomorphic to a non-cyclic subgroup of SO(3) (two distinct
// involutions generate a dihedral group of order >= 4, and every spherical
// group has at least two involutions).
struct SphericalResult {
  bool possible = false;
  int64_t involution_count = 0;
  std::optional<std::pair<NormalWord, NormalWord>> witness;
};
SphericalResult has_spherical_subgroup(const PcPresentation& p,
                                       const ResourceGuards& g = {});

// Theorem-driven classification from the computed evidence.
VerdictKind classify(const mpz_class& multiplier_order, bool toral_generated,
                     bool spherical_possible);
Verdict verdict(const PcPresentation& p, const ResourceGuards& g = {});

// Genus of the total space of a free cover over a genus-h quotient surface.
int64_t covering_genus(int64_t group_order, int64_t quotient_genus);

}  // namespace pcprobe
