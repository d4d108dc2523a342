#include "kpoint/configs.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace kpoint {

InnerProductSet::InnerProductSet(std::vector<Rational> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  if (std::adjacent_find(values_.begin(), values_.end()) != values_.end())
    throw InvalidParameters("inner products must be distinct");
  for (const Rational& q : values_)
    if (q < -1 || q >= 1) throw InvalidParameters("inner products must lie in [-1, 1)");
  if (values_.size() > 9) throw InvalidParameters("at most 9 inner products supported");
}

InnerProductSet InnerProductSet::equiangular(const Rational& a) {
  if (a <= 0 || a >= 1) throw InvalidParameters("a must lie in (0, 1)");
  return InnerProductSet({-a, a});
}

InnerProductSet InnerProductSet::parse(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<Rational> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_rational(tok));
  if (vals.empty()) throw ParseError("empty inner product set");
  return InnerProductSet(std::move(vals));
}

std::optional<int> InnerProductSet::index_of(const Rational& q) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), q);
  if (it == values_.end() || *it != q) return std::nullopt;
  return static_cast<int>(it - values_.begin());
}

std::string InnerProductSet::to_string() const {
  std::string out;
  for (size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ",";
    out += format_rational(values_[i]);
  }
  return out;
}

GramPattern::GramPattern(int size, int fill) : size_(size) {
  if (size < 0) throw InvalidParameters("negative pattern size");
  cells_.assign(static_cast<size_t>(size * size), static_cast<int8_t>(fill));
  for (int i = 0; i < size; ++i) cells_[static_cast<size_t>(i * size + i)] = -1;
}

GramPattern::GramPattern(int size, const std::vector<int>& upper) : GramPattern(size) {
  if (upper.size() != static_cast<size_t>(size * (size - 1) / 2))
    throw InvalidParameters("wrong number of upper-triangle entries");
  size_t c = 0;
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) set(i, j, upper[c++]);
}

void GramPattern::set(int i, int j, int index) {
  if (i == j) throw InvalidParameters("diagonal entries are fixed");
  if (index < 0 || index > 9) throw InvalidParameters("inner product index out of range");
  cells_[static_cast<size_t>(i * size_ + j)] = static_cast<int8_t>(index);
  cells_[static_cast<size_t>(j * size_ + i)] = static_cast<int8_t>(index);
}

std::vector<int> GramPattern::upper() const {
  std::vector<int> out;
  for (int i = 0; i < size_; ++i)
    for (int j = i + 1; j < size_; ++j) out.push_back(entry(i, j));
  return out;
}

GramPattern GramPattern::permuted(const Permutation& pi) const {
  return restricted(pi);
}

GramPattern GramPattern::restricted(std::span<const int> points) const {
  GramPattern out(static_cast<int>(points.size()));
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      out.set(static_cast<int>(i), static_cast<int>(j), entry(points[i], points[j]));
  return out;
}

std::vector<std::vector<Rational>> GramPattern::gram(const InnerProductSet& D) const {
  std::vector<std::vector<Rational>> g(static_cast<size_t>(size_),
                                       std::vector<Rational>(static_cast<size_t>(size_)));
  for (int i = 0; i < size_; ++i) {
    g[i][i] = 1;
    for (int j = 0; j < size_; ++j) {
      if (i == j) continue;
      int e = entry(i, j);
      if (e < 0 || static_cast<size_t>(e) >= D.size())
        throw InvalidParameters("pattern index outside the inner product set");
      g[i][j] = D[static_cast<size_t>(e)];
    }
  }
  return g;
}

const std::vector<Permutation>& all_permutations(int s) {
  static std::mutex mu;
  static std::vector<std::vector<Permutation>> cache(9);
  if (s < 0 || s > 8) throw SizeTooLarge("permutations of more than 8 points");
  std::lock_guard lock(mu);
  auto& perms = cache[static_cast<size_t>(s)];
  if (perms.empty()) {
    Permutation p(static_cast<size_t>(s));
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return perms;
}

namespace {

std::string label_prefix(int s) { return std::to_string(s) + ":"; }

}  // namespace

Canonical canonicalize(const GramPattern& p) {
  const int s = p.size();
  if (s > 8) throw SizeTooLarge("canonical form limited to 8 points");
  const auto& perms = all_permutations(s);
  const size_t len = static_cast<size_t>(s * (s - 1) / 2);
  std::string best;
  const Permutation* best_pi = &perms.front();
  std::string cur(len, '0');
  for (const Permutation& pi : perms) {
    size_t c = 0;
    bool better = best.empty();
    bool worse = false;
    for (int i = 0; i < s && !worse; ++i) {
      for (int j = i + 1; j < s; ++j, ++c) {
        char ch = static_cast<char>('0' + p.entry(pi[i], pi[j]));
        cur[c] = ch;
        if (!better) {
          if (ch > best[c]) {
            worse = true;
            break;
          }
          if (ch < best[c]) better = true;
        }
      }
    }
    if (better && !worse) {
      best = cur;
      best_pi = &pi;
    }
  }
  return Canonical{label_prefix(s) + best, *best_pi};
}

std::string canonical_form(const GramPattern& p) { return canonicalize(p).label; }

std::vector<Permutation> stabilizer(const GramPattern& p) {
  if (p.size() > 8) throw SizeTooLarge("stabilizer limited to 8 points");
  std::vector<Permutation> out;
  for (const Permutation& pi : all_permutations(p.size()))
    if (p.permuted(pi) == p) out.push_back(pi);
  return out;
}

RankInfo exact_rank_psd(std::vector<std::vector<Rational>> a) {
  const size_t n = a.size();
  std::vector<bool> done(n, false);
  RankInfo info{true, 0};
  for (size_t step = 0; step < n; ++step) {
    size_t p = n;
    for (size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (a[i][i] < 0) return RankInfo{false, info.rank};
      if (a[i][i] > 0 && p == n) p = i;
    }
    if (p == n) {
      // Remaining diagonal is zero; PSD forces the whole remainder to vanish.
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (!done[i] && !done[j] && a[i][j] != 0) return RankInfo{false, info.rank};
      return info;
    }
    done[p] = true;
    ++info.rank;
    const Rational piv = a[p][p];
    std::vector<Rational> factor(n);
    for (size_t i = 0; i < n; ++i)
      if (!done[i] && a[i][p] != 0) factor[i] = a[i][p] / piv;
    for (size_t i = 0; i < n; ++i) {
      if (done[i] || factor[i] == 0) continue;
      for (size_t j = i; j < n; ++j) {
        if (done[j] || a[p][j] == 0) continue;
        a[i][j] -= factor[i] * a[p][j];
        if (j != i) a[j][i] = a[i][j];
      }
    }
  }
  return info;
}

bool is_realizable(const GramPattern& p, const InnerProductSet& D, int n) {
  RankInfo r = exact_rank_psd(p.gram(D));
  return r.psd && r.rank <= n;
}

OrbitCatalog::OrbitCatalog(InnerProductSet D, int k, int n, std::vector<std::vector<OrbitRep>> reps)
    : D_(std::move(D)), k_(k), n_(n), reps_(std::move(reps)) {
  index_.resize(reps_.size());
  for (size_t s = 0; s < reps_.size(); ++s) {
    for (size_t i = 0; i < reps_[s].size(); ++i) {
      OrbitRep& r = reps_[s][i];
      r.orbit_index = static_cast<int>(i);
      index_[s][r.label] = static_cast<int>(i);
      if (static_cast<int>(s) <= k_ - 2 && !r.full_rank())
        warnings_.push_back("representative " + r.label + " has rank " + std::to_string(r.rank) +
                            " < " + std::to_string(s) + "; excluded as a frame");
    }
  }
}

std::vector<size_t> OrbitCatalog::counts() const {
  std::vector<size_t> c;
  for (const auto& level : reps_) c.push_back(level.size());
  return c;
}

std::optional<int> OrbitCatalog::find(const std::string& label, int s) const {
  if (s < 0 || static_cast<size_t>(s) >= index_.size()) return std::nullopt;
  auto it = index_[static_cast<size_t>(s)].find(label);
  if (it == index_[static_cast<size_t>(s)].end()) return std::nullopt;
  return it->second;
}

Alignment OrbitCatalog::align(const GramPattern& q) const {
  Canonical c = canonicalize(q);
  auto idx = find(c.label, q.size());
  if (!idx) throw NotInCatalog("pattern " + c.label + " is not a catalogued orbit");
  return Alignment{*idx, std::move(c.pi)};
}

std::string OrbitCatalog::export_text() const {
  std::ostringstream os;
  os << "# orbit catalog\n";
  os << "# D " << D_.to_string() << "\n";
  os << "# k " << k_ << " n " << n_ << "\n";
  for (const auto& level : reps_) {
    for (const OrbitRep& r : level) {
      os << r.size();
      for (int e : r.pattern.upper()) os << ' ' << e;
      os << ' ' << r.stabilizer.size() << '\n';
    }
  }
  return os.str();
}

OrbitCatalog OrbitCatalog::import_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<InnerProductSet> D;
  int k = -1, n = -1;
  std::vector<std::vector<OrbitRep>> reps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "D") {
        std::string rest;
        ls >> rest;
        D = InnerProductSet::parse(rest);
      } else if (key == "k") {
        std::string nkey;
        ls >> k >> nkey >> n;
        if (!ls || nkey != "n") throw ParseError("bad catalog header: " + line);
      }
      continue;
    }
    if (!D || k < 0) throw ParseError("catalog entries before header");
    int s;
    if (!(ls >> s) || s < 0 || s > 8) throw ParseError("bad catalog line: " + line);
    std::vector<int> upper(static_cast<size_t>(s * (s - 1) / 2));
    for (int& e : upper)
      if (!(ls >> e) || e < 0 || static_cast<size_t>(e) >= D->size())
        throw ParseError("bad catalog line: " + line);
    size_t stab_size;
    std::string extra;
    if (!(ls >> stab_size) || (ls >> extra)) throw ParseError("bad catalog line: " + line);
    OrbitRep r;
    r.pattern = GramPattern(s, upper);
    Canonical c = canonicalize(r.pattern);
    if (!(r.pattern.permuted(c.pi) == r.pattern))
      throw ParseError("catalog pattern is not in canonical form: " + line);
    r.label = c.label;
    r.stabilizer = stabilizer(r.pattern);
    if (r.stabilizer.size() != stab_size) throw ParseError("stabilizer size mismatch: " + line);
    RankInfo info = exact_rank_psd(r.pattern.gram(*D));
    if (!info.psd || info.rank > n) throw ParseError("unrealizable catalog pattern: " + line);
    r.rank = info.rank;
    if (reps.size() <= static_cast<size_t>(s)) reps.resize(static_cast<size_t>(s) + 1);
    reps[static_cast<size_t>(s)].push_back(std::move(r));
  }
  if (!D) throw ParseError("catalog without header");
  reps.resize(static_cast<size_t>(k) + 1);
  return OrbitCatalog(*D, k, n, std::move(reps));
}

std::string OrbitCatalog::hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : export_text()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OrbitCatalog enumerate_orbits(const InnerProductSet& D, int k, int n) {
  if (k < 0) throw InvalidParameters("k must be nonnegative");
  if (k > 8) throw SizeTooLarge("orbits beyond 8 points");
  if (D.size() == 0) throw InvalidParameters("empty inner product set");
  std::vector<std::vector<OrbitRep>> reps(static_cast<size_t>(k) + 1);

  auto make_rep = [&](GramPattern p, int rank) {
    OrbitRep r;
    r.label = canonical_form(p);
    r.stabilizer = stabilizer(p);
    r.rank = rank;
    r.pattern = std::move(p);
    return r;
  };

  reps[0].push_back(make_rep(GramPattern(0), 0));
  if (k >= 1 && n >= 1) reps[1].push_back(make_rep(GramPattern(1), 1));

  const int q = static_cast<int>(D.size());
  for (int s = 2; s <= k; ++s) {
    std::map<std::string, OrbitRep> found;
    std::set<std::string> rejected;
    for (const OrbitRep& base : reps[static_cast<size_t>(s - 1)]) {
      std::vector<int> digits(static_cast<size_t>(s - 1), 0);
      while (true) {
        GramPattern p(s);
        for (int i = 0; i < s - 1; ++i)
          for (int j = i + 1; j < s - 1; ++j) p.set(i, j, base.pattern.entry(i, j));
        for (int i = 0; i < s - 1; ++i) p.set(i, s - 1, digits[static_cast<size_t>(i)]);
        Canonical c = canonicalize(p);
        if (!found.count(c.label) && !rejected.count(c.label)) {
          RankInfo info = exact_rank_psd(p.gram(D));
          if (info.psd && info.rank <= n)
            found.emplace(c.label, make_rep(p.permuted(c.pi), info.rank));
          else
            rejected.insert(c.label);
        }
        int pos = 0;
        while (pos < s - 1 && ++digits[static_cast<size_t>(pos)] == q) digits[static_cast<size_t>(pos++)] = 0;
        if (pos == s - 1) break;
      }
    }
    for (auto& [label, rep] : found) reps[static_cast<size_t>(s)].push_back(std::move(rep));
  }
  return OrbitCatalog(D, k, n, std::move(reps));
}

GramPattern block_construction(int r, int t, int s) {
  if (r < 2 || t < 0 || s < 0 || r * t + s < 1)
    throw InvalidParameters("block construction needs r >= 2, t, s >= 0 and rt + s >= 1");
  const int size = r * t + s;
  // index 0 is -a and index 1 is a in the sorted set {-a, a}
  GramPattern p(size, 1);
  for (int b = 0; b < t; ++b)
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) p.set(b * r + i, b * r + j, 0);
  return p;
}

}  // namespace kpoint
