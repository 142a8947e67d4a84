#include "pcprobe/pc.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <sstream>

namespace pcprobe {

int64_t PcPresentation::order() const {
  int64_t o = 1;
  for (int64_t e : rel_orders) o = checked_mul(o, e);
  return o;
}

bool PcPresentation::is_identity(const NormalWord& u) const {
  return std::all_of(u.begin(), u.end(), [](int64_t a) { return a == 0; });
}

bool PcPresentation::trivial_conj(int j, int i) const {
  const NormalWord& w = conj(j, i);
  for (int k = 0; k < n; ++k)
    if (w[k] != (k + 1 == j ? 1 : 0)) return false;
  return true;
}

static void check_rhs(const PcPresentation& p, const NormalWord& w, int min_index,
                      const char* what) {
  if ((int)w.size() != p.n)
    throw std::invalid_argument(std::string(what) + ": RHS length mismatch");
  for (int k = 0; k < p.n; ++k) {
    if (w[k] < 0 || w[k] >= p.rel_orders[k])
      throw std::invalid_argument(std::string(what) + ": RHS not in normal form");
    if (w[k] != 0 && k + 1 <= min_index)
      throw std::invalid_argument(std::string(what) + ": RHS index not > i");
  }
}

void PcPresentation::validate_structure() const {
  if (n < 0) throw std::invalid_argument("generator count must be non-negative");
  if ((int)rel_orders.size() != n || (int)power_rhs.size() != n ||
      (int)conj_rhs.size() != n)
    throw std::invalid_argument("field sizes inconsistent with n");
  for (int64_t e : rel_orders)
    if (e < 2) throw std::invalid_argument("relative order must be >= 2");
  for (int i = 1; i <= n; ++i) check_rhs(*this, power_rhs[i - 1], i, "pow");
  for (int j = 2; j <= n; ++j) {
    if ((int)conj_rhs[j - 1].size() != j - 1)
      throw std::invalid_argument("conj storage shape mismatch");
    for (int i = 1; i < j; ++i) check_rhs(*this, conj(j, i), i, "conj");
  }
  if (declared_order && *declared_order != order())
    throw std::invalid_argument("declared order mismatch");
}

// ---------------------------------------------------------------------------
// Collection from the left.
//
// The accumulator holds the collected normal prefix; pending letters are kept
// on a stack (top = next letter to absorb). Absorbing a generator g that must
// move past already-collected letters of higher index conjugates those
// letters by g and re-queues the images.
//
// Hooks receive every application of a pc relation so the tailed collector
// can accumulate tail vectors; the plain collector passes no-ops.
// ---------------------------------------------------------------------------

namespace {

struct NoHooks {
  void on_power(int, int) {}
  void on_conj(int, int, int64_t) {}
};

template <typename Hooks>
void collect_impl(const PcPresentation& p, const Word& w, NormalWord& acc,
                  Hooks&& hooks) {
  std::vector<Letter> stack;
  stack.reserve(w.size() + 16);
  for (auto it = w.rbegin(); it != w.rend(); ++it) stack.push_back(*it);

  auto push_word = [&](const NormalWord& v) {
    for (int k = p.n; k >= 1; --k)
      if (v[k - 1] != 0) stack.push_back({k, v[k - 1]});
  };
  auto push_word_inverse = [&](const NormalWord& v) {
    for (int k = 1; k <= p.n; ++k)
      if (v[k - 1] != 0) stack.push_back({k, -v[k - 1]});
  };

  while (!stack.empty()) {
    Letter l = stack.back();
    stack.pop_back();
    if (l.gen < 1 || l.gen > p.n) throw std::invalid_argument("generator index out of range");
    if (l.exp == 0) continue;
    int g = l.gen;
    if (l.exp < 0) {
      // g^-1 = g^{e-1} * (g^e)^-1; the power relation is used once, inverted.
      if (l.exp < -1) stack.push_back({g, l.exp + 1});
      push_word_inverse(p.power_rhs[g - 1]);
      hooks.on_power(g, -1);
      stack.push_back({g, p.rel_orders[g - 1] - 1});
      continue;
    }
    if (l.exp > 1) stack.push_back({g, l.exp - 1});

    // Move one copy of g into the accumulator. Every collected letter of
    // higher index must move past g, so strip them all and re-queue their
    // conjugates in original order; each pass is one application of the
    // conjugation relation (which the hooks observe, trivial RHS or not).
    // Stripping even the trivially-commuting letters keeps the suffix of
    // acc empty, so a power-relation RHS pushed below lands in the right
    // position relative to them.
    std::vector<Letter> images;
    for (int k = g + 1; k <= p.n; ++k) {
      int64_t c = acc[k - 1];
      if (c == 0) continue;
      acc[k - 1] = 0;
      hooks.on_conj(k, g, c);
      if (p.trivial_conj(k, g)) {
        images.push_back({k, c});
      } else {
        const NormalWord& cw = p.conj(k, g);
        for (int64_t rep = 0; rep < c; ++rep)
          for (int t = 1; t <= p.n; ++t)
            if (cw[t - 1] != 0) images.push_back({t, cw[t - 1]});
      }
    }
    for (auto it = images.rbegin(); it != images.rend(); ++it) stack.push_back(*it);
    acc[g - 1] += 1;
    if (acc[g - 1] == p.rel_orders[g - 1]) {
      acc[g - 1] = 0;
      hooks.on_power(g, +1);
      push_word(p.power_rhs[g - 1]);
    }
  }
}

}  // namespace

NormalWord collect(const PcPresentation& p, const Word& w) {
  NormalWord acc(p.n, 0);
  collect_impl(p, w, acc, NoHooks{});
  return acc;
}

void collect_with_hooks(const PcPresentation& p, const Word& w, NormalWord& acc,
                        const std::function<void(int, int)>& on_power,
                        const std::function<void(int, int, int64_t)>& on_conj) {
  struct FnHooks {
    const std::function<void(int, int)>& pw;
    const std::function<void(int, int, int64_t)>& cj;
    void on_power(int i, int s) { pw(i, s); }
    void on_conj(int j, int i, int64_t c) { cj(j, i, c); }
  };
  collect_impl(p, w, acc, FnHooks{on_power, on_conj});
}

Word to_word(const NormalWord& u) {
  Word w;
  for (int k = 0; k < (int)u.size(); ++k)
    if (u[k] != 0) w.push_back({k + 1, u[k]});
  return w;
}

NormalWord multiply(const PcPresentation& p, const NormalWord& u, const NormalWord& v) {
  NormalWord acc = u;
  collect_impl(p, to_word(v), acc, NoHooks{});
  return acc;
}

NormalWord inverse(const PcPresentation& p, const NormalWord& u) {
  Word w;
  for (int k = (int)u.size(); k >= 1; --k)
    if (u[k - 1] != 0) w.push_back({k, -u[k - 1]});
  return collect(p, w);
}

NormalWord power(const PcPresentation& p, const NormalWord& u, int64_t k) {
  NormalWord base = k >= 0 ? u : inverse(p, u);
  int64_t m = k >= 0 ? k : -k;
  NormalWord acc = p.identity();
  // binary powering on top of multiply
  while (m > 0) {
    if (m & 1) acc = multiply(p, acc, base);
    base = multiply(p, base, base);
    m >>= 1;
  }
  return acc;
}

NormalWord commutator(const PcPresentation& p, const NormalWord& u, const NormalWord& v) {
  return multiply(p, multiply(p, inverse(p, u), inverse(p, v)), multiply(p, u, v));
}

int64_t element_order(const PcPresentation& p, const NormalWord& u) {
  NormalWord v = u;
  int64_t k = 1;
  while (!p.is_identity(v)) {
    v = multiply(p, v, u);
    k = checked_add(k, 1);
  }
  return k;
}

// ---------------------------------------------------------------------------
// Consistency checking
// ---------------------------------------------------------------------------

std::string ConsistencyViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Triple: os << "triple(" << k << "," << j << "," << i << ")"; break;
    case Kind::PowerLeft: os << "powerLeft(" << j << "," << i << ")"; break;
    case Kind::PowerRight: os << "powerRight(" << j << "," << i << ")"; break;
    case Kind::SelfPower: os << "selfPower(" << i << ")"; break;
  }
  return os.str();
}

// Runs fn(kind, k, j, i, leftWord, rightWord) for each test of the standard
// family, in a fixed order. Shared with the tailed consistency matrix.
void for_each_consistency_test(
    const PcPresentation& p,
    const std::function<void(ConsistencyViolation::Kind, int, int, int, const Word&,
                             const Word&)>& fn) {
  auto cat = [](Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  for (int k = 3; k <= p.n; ++k)
    for (int j = 2; j < k; ++j)
      for (int i = 1; i < j; ++i) {
        // g_k (g_j g_i)  vs  (g_k g_j) g_i
        Word left = cat({{k, 1}}, to_word(collect(p, {{j, 1}, {i, 1}})));
        Word right = cat(to_word(collect(p, {{k, 1}, {j, 1}})), {{i, 1}});
        fn(ConsistencyViolation::Kind::Triple, k, j, i, left, right);
      }
  for (int j = 2; j <= p.n; ++j)
    for (int i = 1; i < j; ++i) {
      int64_t ej = p.rel_orders[j - 1];
      // g_j^{e_j} g_i  vs  g_j^{e_j-1} (g_j g_i)
      Word left = cat(to_word(collect(p, {{j, ej}})), {{i, 1}});
      Word right = cat({{j, ej - 1}}, to_word(collect(p, {{j, 1}, {i, 1}})));
      fn(ConsistencyViolation::Kind::PowerLeft, 0, j, i, left, right);
    }
  for (int j = 2; j <= p.n; ++j)
    for (int i = 1; i < j; ++i) {
      int64_t ei = p.rel_orders[i - 1];
      // g_j g_i^{e_i}  vs  (g_j g_i) g_i^{e_i-1}
      Word left = cat({{j, 1}}, to_word(collect(p, {{i, ei}})));
      Word right = cat(to_word(collect(p, {{j, 1}, {i, 1}})), {{i, ei - 1}});
      fn(ConsistencyViolation::Kind::PowerRight, 0, j, i, left, right);
    }
  for (int i = 1; i <= p.n; ++i) {
    int64_t ei = p.rel_orders[i - 1];
    // g_i^{e_i} g_i  vs  g_i g_i^{e_i}
    Word left = cat(to_word(collect(p, {{i, ei}})), {{i, 1}});
    Word right = cat({{i, 1}}, to_word(collect(p, {{i, ei}})));
    fn(ConsistencyViolation::Kind::SelfPower, 0, 0, i, left, right);
  }
}

std::vector<ConsistencyViolation> check_consistency(const PcPresentation& p) {
  std::vector<ConsistencyViolation> out;
  for_each_consistency_test(
      p, [&](ConsistencyViolation::Kind kind, int k, int j, int i, const Word& lw,
             const Word& rw) {
        NormalWord l = collect(p, lw);
        NormalWord r = collect(p, rw);
        if (l != r) out.push_back({kind, k, j, i, l, r});
      });
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration and element statistics
// ---------------------------------------------------------------------------

void enumerate_elements(const PcPresentation& p, const ResourceGuards& g,
                        const std::function<void(const NormalWord&)>& sink) {
  if (p.order() > g.max_elements)
    throw GuardExceeded("element enumeration cap exceeded for " + p.name);
  NormalWord u(p.n, 0);
  for (;;) {
    sink(u);
    int k = p.n - 1;
    while (k >= 0) {
      if (++u[k] < p.rel_orders[k]) break;
      u[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

std::vector<NormalWord> all_elements(const PcPresentation& p, const ResourceGuards& g) {
  std::vector<NormalWord> out;
  out.reserve(p.order());
  enumerate_elements(p, g, [&](const NormalWord& u) { out.push_back(u); });
  return out;
}

int64_t count_involutions(const PcPresentation& p, const ResourceGuards& g) {
  int64_t c = 0;
  enumerate_elements(p, g, [&](const NormalWord& u) {
    if (!p.is_identity(u) && p.is_identity(multiply(p, u, u))) ++c;
  });
  return c;
}

// ---------------------------------------------------------------------------
// GroupTable
// ---------------------------------------------------------------------------

GroupTable::GroupTable(const PcPresentation& p, const ResourceGuards& g) : p_(p) {
  size_ = p.order();
  if (size_ > g.max_elements) throw GuardExceeded("group too large for table");
  radix_.assign(p.n, 1);
  for (int k = p.n - 2; k >= 0; --k) radix_[k] = radix_[k + 1] * p.rel_orders[k + 1];

  gen_tab_.assign(p.n, std::vector<int64_t>(size_));
  for (int gen = 1; gen <= p.n; ++gen)
    for (int64_t u = 0; u < size_; ++u) {
      NormalWord w = word_of(u);
      Word letters = to_word(w);
      letters.push_back({gen, 1});
      gen_tab_[gen - 1][u] = index_of(collect(p, letters));
    }

  inv_tab_.assign(size_, 0);
  order_.assign(size_, 1);
  for (int64_t u = 0; u < size_; ++u) {
    inv_tab_[u] = index_of(inverse(p, word_of(u)));
    int64_t v = u, k = 1;
    while (v != 0) {
      v = mul(v, u);
      ++k;
    }
    order_[u] = k;
  }
  order_[0] = 1;
}

int64_t GroupTable::index_of(const NormalWord& u) const {
  int64_t idx = 0;
  for (int k = 0; k < p_.n; ++k) idx += u[k] * radix_[k];
  return idx;
}

NormalWord GroupTable::word_of(int64_t idx) const {
  NormalWord u(p_.n, 0);
  for (int k = 0; k < p_.n; ++k) {
    u[k] = idx / radix_[k];
    idx %= radix_[k];
  }
  return u;
}

int64_t GroupTable::mul(int64_t u, int64_t v) const {
  // walk v's normal word, applying generator tables
  int64_t r = u;
  for (int k = 0; k < p_.n; ++k) {
    int64_t c = v / radix_[k];
    v %= radix_[k];
    for (int64_t s = 0; s < c; ++s) r = gen_tab_[k][r];
  }
  return r;
}

int64_t GroupTable::conj(int64_t u, int64_t by) const {
  return mul(mul(inv_tab_[by], u), by);
}

int64_t GroupTable::comm(int64_t u, int64_t v) const {
  return mul(mul(inv_tab_[u], inv_tab_[v]), mul(u, v));
}

int64_t GroupTable::pow(int64_t u, int64_t k) const {
  int64_t o = order_[u];
  k %= o;
  if (k < 0) k += o;
  int64_t r = 0;
  for (int64_t s = 0; s < k; ++s) r = mul(r, u);
  return r;
}

void commuting_pairs(const GroupTable& t, const ResourceGuards& g,
                     const std::function<void(int64_t, int64_t)>& sink) {
  int64_t n = t.size();
  if (n > 0 && n > g.max_pairs / n)
    throw GuardExceeded("pair enumeration cap exceeded");
  for (int64_t u = 0; u < n; ++u)
    for (int64_t v = 0; v < n; ++v)
      if (t.comm(u, v) == 0) sink(u, v);
}

int64_t count_commuting_pairs(const GroupTable& t, const ResourceGuards& g) {
  int64_t c = 0;
  commuting_pairs(t, g, [&](int64_t, int64_t) { ++c; });
  return c;
}

std::vector<std::vector<std::pair<int64_t, int64_t>>> commutator_fibers(
    const GroupTable& t, const ResourceGuards& g) {
  int64_t n = t.size();
  if (n > 0 && n > g.max_pairs / n)
    throw GuardExceeded("pair enumeration cap exceeded");
  std::vector<std::vector<std::pair<int64_t, int64_t>>> fibers(n);
  for (int64_t u = 0; u < n; ++u)
    for (int64_t v = 0; v < n; ++v) fibers[t.comm(u, v)].push_back({u, v});
  return fibers;
}

// ---------------------------------------------------------------------------
// Corpus grammar
// ---------------------------------------------------------------------------

namespace {

struct LineScanner {
  std::vector<std::pair<int, std::string>> lines;  // (lineno, stripped content)
  size_t pos = 0;
  explicit LineScanner(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      // trim
      auto b = raw.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      auto e = raw.find_last_not_of(" \t\r");
      lines.emplace_back(no, raw.substr(b, e - b + 1));
    }
  }
  bool done() const { return pos >= lines.size(); }
  const std::pair<int, std::string>& peek() const { return lines[pos]; }
  std::pair<int, std::string> next() { return lines[pos++]; }
};

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

int64_t parse_int(const std::string& s, int line) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("expected integer, got '" + s + "'", line);
  return v;
}

// <word> := `1` | term (`*` term)*, term := g<k> or g<k>^<m>
NormalWord parse_word(const std::string& s, const PcPresentation& p, int min_index,
                      int line) {
  NormalWord w(p.n, 0);
  std::string t = s;
  // normalize separators
  for (char& c : t)
    if (c == '*') c = ' ';
  auto toks = split_ws(t);
  if (toks.empty()) throw ParseError("empty word", line);
  if (toks.size() == 1 && toks[0] == "1") return w;
  int last = 0;
  for (const auto& tok : toks) {
    if (tok.size() < 2 || tok[0] != 'g')
      throw ParseError("bad term '" + tok + "'", line);
    auto caret = tok.find('^');
    int64_t k = parse_int(tok.substr(1, caret == std::string::npos
                                            ? std::string::npos
                                            : caret - 1),
                          line);
    int64_t m = caret == std::string::npos ? 1 : parse_int(tok.substr(caret + 1), line);
    if (k < 1 || k > p.n) throw ParseError("index out of range in word", line);
    if ((int)k <= min_index) throw ParseError("RHS index not > i", line);
    if ((int)k <= last) throw ParseError("RHS not in normal form", line);
    if (m < 1 || m >= p.rel_orders[k - 1])
      throw ParseError("RHS not in normal form", line);
    w[k - 1] = m;
    last = (int)k;
  }
  return w;
}

PcPresentation parse_stanza(LineScanner& sc) {
  auto [hline, header] = sc.next();
  auto toks = split_ws(header);
  if (toks.empty() || toks[0] != "group")
    throw ParseError("expected 'group' header", hline);
  if (toks.size() < 2) throw ParseError("group header needs a name", hline);
  PcPresentation p;
  p.name = toks[1];
  for (size_t t = 2; t < toks.size(); ++t) {
    if (toks[t].rfind("order=", 0) == 0)
      p.declared_order = parse_int(toks[t].substr(6), hline);
    else
      throw ParseError("unexpected token '" + toks[t] + "' in group header", hline);
  }

  if (sc.done()) throw ParseError("expected 'gens' line", hline);
  auto [gline, gens] = sc.next();
  auto gt = split_ws(gens);
  if (gt.size() != 2 || gt[0] != "gens") throw ParseError("expected 'gens <n>'", gline);
  int64_t n = parse_int(gt[1], gline);
  if (n < 0 || n > 64) throw ParseError("generator count out of range", gline);
  p.n = (int)n;

  if (sc.done()) throw ParseError("expected 'orders' line", gline);
  auto [oline, orders] = sc.next();
  auto ot = split_ws(orders);
  if (ot.empty() || ot[0] != "orders" || (int)ot.size() != p.n + 1)
    throw ParseError("expected 'orders e1 ... en'", oline);
  for (int i = 1; i <= p.n; ++i) {
    int64_t e = parse_int(ot[i], oline);
    if (e < 2) throw ParseError("relative order must be >= 2", oline);
    p.rel_orders.push_back(e);
  }

  // defaults: identity powers, trivial conjugation
  p.power_rhs.assign(p.n, NormalWord(p.n, 0));
  p.conj_rhs.resize(p.n);
  for (int j = 1; j <= p.n; ++j) {
    p.conj_rhs[j - 1].assign(std::max(0, j - 1), NormalWord(p.n, 0));
    for (int i = 1; i < j; ++i) p.conj_rhs[j - 1][i - 1][j - 1] = 1;
  }

  while (!sc.done()) {
    auto& [lno, line] = sc.peek();
    auto lt = split_ws(line);
    if (lt[0] == "group") break;
    sc.next();
    if (lt[0] == "pow") {
      auto eq = std::find(lt.begin(), lt.end(), "=");
      if (eq == lt.end() || eq - lt.begin() != 2)
        throw ParseError("expected 'pow i = <word>'", lno);
      int64_t i = parse_int(lt[1], lno);
      if (i < 1 || i > p.n) throw ParseError("index out of range", lno);
      std::string rhs;
      for (auto it = eq + 1; it != lt.end(); ++it) rhs += *it + " ";
      p.power_rhs[i - 1] = parse_word(rhs, p, (int)i, lno);
    } else if (lt[0] == "conj") {
      auto eq = std::find(lt.begin(), lt.end(), "=");
      if (eq == lt.end() || eq - lt.begin() != 3)
        throw ParseError("expected 'conj j i = <word>'", lno);
      int64_t j = parse_int(lt[1], lno);
      int64_t i = parse_int(lt[2], lno);
      if (i < 1 || j <= i || j > p.n) throw ParseError("need n >= j > i >= 1", lno);
      std::string rhs;
      for (auto it = eq + 1; it != lt.end(); ++it) rhs += *it + " ";
      p.conj_rhs[j - 1][i - 1] = parse_word(rhs, p, (int)i, lno);
    } else {
      throw ParseError("unexpected line '" + line + "'", lno);
    }
  }

  p.validate_structure();
  return p;
}

}  // namespace

std::vector<PcPresentation> parse_pc_corpus(const std::string& text) {
  LineScanner sc(text);
  std::vector<PcPresentation> out;
  while (!sc.done()) out.push_back(parse_stanza(sc));
  if (out.empty()) throw ParseError("no group stanza found", 0);
  return out;
}

PcPresentation parse_pc_presentation(const std::string& text) {
  auto all = parse_pc_corpus(text);
  if (all.size() != 1) throw ParseError("expected exactly one group stanza", 0);
  return all[0];
}

static void append_word(std::ostringstream& os, const NormalWord& w) {
  bool any = false;
  for (int k = 0; k < (int)w.size(); ++k) {
    if (w[k] == 0) continue;
    if (any) os << "*";
    os << "g" << (k + 1);
    if (w[k] != 1) os << "^" << w[k];
    any = true;
  }
  if (!any) os << "1";
}

std::string serialize_pc_presentation(const PcPresentation& p) {
  std::ostringstream os;
  os << "group " << p.name;
  if (p.declared_order) os << " order=" << *p.declared_order;
  os << "\n";
  os << "gens " << p.n << "\n";
  os << "orders";
  for (int64_t e : p.rel_orders) os << " " << e;
  os << "\n";
  for (int i = 1; i <= p.n; ++i) {
    if (p.is_identity(p.power_rhs[i - 1])) continue;
    os << "pow " << i << " = ";
    append_word(os, p.power_rhs[i - 1]);
    os << "\n";
  }
  for (int j = 2; j <= p.n; ++j)
    for (int i = 1; i < j; ++i) {
      if (p.trivial_conj(j, i)) continue;
      os << "conj " << j << " " << i << " = ";
      append_word(os, p.conj(j, i));
      os << "\n";
    }
  return os.str();
}

}  // namespace pcprobe
