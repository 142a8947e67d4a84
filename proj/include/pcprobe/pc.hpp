// Power-conjugate presentations of finite solvable groups: parsing,
// collection to normal form, consistency checking, and element queries.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcprobe {

// Thrown when a configured enumeration cap would be exceeded.
struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on checked-integer overflow (relative orders in scope are tiny;
// silent wraparound is the real risk).
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(const std::string& msg, int line_)
      : std::runtime_error(msg), line(line_) {}
};

inline int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in add");
  return r;
}
inline int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in mul");
  return r;
}

// g1^{a1} ... gn^{an} with 0 <= ai < ei.
using NormalWord = std::vector<int64_t>;

// A single letter g^e of an input word; gen is 1-based, e may be negative.
struct Letter {
  int gen;
  int64_t exp;
};
using Word = std::vector<Letter>;

struct PcPresentation {
  std::string name;
  int n = 0;                          // generator count
  std::vector<int64_t> rel_orders;    // e_1..e_n, each >= 2
  std::vector<NormalWord> power_rhs;  // power_rhs[i-1] = value of g_i^{e_i}
  // conj_rhs[j-1][i-1] = value of g_j^{g_i} (x^y = y^-1 x y), valid for i < j.
  std::vector<std::vector<NormalWord>> conj_rhs;
  std::optional<int64_t> declared_order;

  int64_t order() const;  // prod e_i, checked
  NormalWord identity() const { return NormalWord(n, 0); }
  bool is_identity(const NormalWord& u) const;
  const NormalWord& conj(int j, int i) const { return conj_rhs[j - 1][i - 1]; }
  bool trivial_conj(int j, int i) const;

  // Structural checks (normal-form RHS, index > i restriction, declared
  // order). Throws std::invalid_argument on violation. Does not run the
  // consistency tests.
  void validate_structure() const;
};

struct ConsistencyViolation {
  enum class Kind { Triple, PowerLeft, PowerRight, SelfPower };
  Kind kind;
  int k = 0, j = 0, i = 0;  // indices of the failing test (unused ones 0)
  NormalWord left, right;
  std::string describe() const;
};

struct ResourceGuards {
  int64_t max_elements = 1'000'000;      // element enumeration cap
  int64_t max_pairs = 100'000'000;       // ordered-pair enumeration cap
  int64_t bar_oracle_max_order = 32;     // |G| cap for the bar-resolution oracle
};

// Corpus-format text -> presentation. Runs structural validation only.
PcPresentation parse_pc_presentation(const std::string& text);
// All stanzas of a corpus file.
std::vector<PcPresentation> parse_pc_corpus(const std::string& text);
std::string serialize_pc_presentation(const PcPresentation& p);

// Collection from the left; terminates for every input word.
NormalWord collect(const PcPresentation& p, const Word& w);

NormalWord multiply(const PcPresentation& p, const NormalWord& u, const NormalWord& v);
NormalWord inverse(const PcPresentation& p, const NormalWord& u);
NormalWord power(const PcPresentation& p, const NormalWord& u, int64_t k);
// [u,v] = u^-1 v^-1 u v
NormalWord commutator(const PcPresentation& p, const NormalWord& u, const NormalWord& v);
int64_t element_order(const PcPresentation& p, const NormalWord& u);

Word to_word(const NormalWord& u);

std::vector<ConsistencyViolation> check_consistency(const PcPresentation& p);

// Fixed-order traversal of the standard consistency test family; shared by
// the checker and the tailed consistency-relation matrix.
void for_each_consistency_test(
    const PcPresentation& p,
    const std::function<void(ConsistencyViolation::Kind, int, int, int, const Word&,
                             const Word&)>& fn);

// Collection with callbacks on every pc relation application (sign +1 for a
// forward power-relation use, -1 for an inverted one).
void collect_with_hooks(const PcPresentation& p, const Word& w, NormalWord& acc,
                        const std::function<void(int, int)>& on_power,
                        const std::function<void(int, int, int64_t)>& on_conj);

// All prod e_i normal words, lexicographic by exponent vector.
void enumerate_elements(const PcPresentation& p, const ResourceGuards& g,
                        const std::function<void(const NormalWord&)>& sink);
std::vector<NormalWord> all_elements(const PcPresentation& p, const ResourceGuards& g = {});

int64_t count_involutions(const PcPresentation& p, const ResourceGuards& g = {});

// Dense element-indexed multiplication structure for a small consistent
// group. Elements are numbered by mixed radix over the exponent vector.
class GroupTable {
 public:
  GroupTable(const PcPresentation& p, const ResourceGuards& g = {});

  int64_t size() const { return size_; }
  const PcPresentation& presentation() const { return p_; }

  int64_t index_of(const NormalWord& u) const;
  NormalWord word_of(int64_t idx) const;

  int64_t mul_gen(int64_t u, int gen) const { return gen_tab_[gen - 1][u]; }
  int64_t mul(int64_t u, int64_t v) const;
  int64_t inv(int64_t u) const { return inv_tab_[u]; }
  int64_t conj(int64_t u, int64_t by) const;  // by^-1 u by
  int64_t comm(int64_t u, int64_t v) const;   // [u,v]
  int64_t pow(int64_t u, int64_t k) const;
  int64_t order_of(int64_t u) const { return order_[u]; }

  bool commute(int64_t u, int64_t v) const { return comm(u, v) == 0; }

 private:
  PcPresentation p_;  // owned copy: the table must not outlive its source
  int64_t size_;
  std::vector<int64_t> radix_;                 // mixed-radix weights
  std::vector<std::vector<int64_t>> gen_tab_;  // [gen][elt] -> elt * g
  std::vector<int64_t> inv_tab_;
  std::vector<int64_t> order_;
};

// (u,v) with [u,v] = 1, streamed in index order.
void commuting_pairs(const GroupTable& t, const ResourceGuards& g,
                     const std::function<void(int64_t, int64_t)>& sink);
int64_t count_commuting_pairs(const GroupTable& t, const ResourceGuards& g = {});

// fibers[g] = all ordered pairs (u,v) with [u,v] = g.
std::vector<std::vector<std::pair<int64_t, int64_t>>> commutator_fibers(
    const GroupTable& t, const ResourceGuards& g = {});

}  // namespace pcprobe
