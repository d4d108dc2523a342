#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <set>

#include "kpoint/configs.hpp"
#include "kpoint/linalg.hpp"
#include "orbit_oracle.hpp"

using namespace kpoint;

TEST_CASE("canonical form examples") {
  GramPattern plus(2), minus(2);
  plus.set(0, 1, 1);
  minus.set(0, 1, 0);
  CHECK(canonical_form(plus) != canonical_form(minus));

  GramPattern p(3, std::vector<int>{1, 0, 1});
  GramPattern q(3, std::vector<int>{1, 1, 0});
  CHECK(canonical_form(p) == canonical_form(q));
  CHECK(canonical_form(p.permuted({0, 1, 2})) == canonical_form(p));
  CHECK_THROWS_AS(canonical_form(GramPattern(9)), SizeTooLarge);
}

TEST_CASE("orbit counts at a = 1/5 match the brute-force oracle") {
  auto start = std::chrono::steady_clock::now();
  OrbitCatalog cat = enumerate_orbits(InnerProductSet::equiangular(Rational(1, 5)), 6, 60);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 10);
  std::vector<size_t> expected = {1, 1, 2, 4, 11, 34, 156};
  CHECK(cat.counts() == expected);
  for (int s = 0; s <= 6; ++s) {
    testing::BruteForce bf(s);
    auto classes = bf.classes(0.2);
    CHECK(classes.size() == expected[static_cast<size_t>(s)]);
    std::set<uint32_t> mine;
    for (const OrbitRep& r : cat.reps(s)) mine.insert(bf.canonical(bf.mask_of(r.pattern)));
    CHECK(mine == classes);
  }
}

TEST_CASE("PSD filter at a = 1/3") {
  auto D = InnerProductSet::equiangular(Rational(1, 3));
  OrbitCatalog cat = enumerate_orbits(D, 6, 10);
  CHECK(cat.reps(5).size() < 34);
  testing::BruteForce bf5(5);
  CHECK(cat.reps(5).size() == bf5.classes(1.0 / 3).size());
  GramPattern all_minus(5, 0);
  CHECK_FALSE(is_realizable(all_minus, D, 10));
  CHECK_THROWS_AS(cat.align(all_minus), NotInCatalog);
  CHECK(cat.reps(0).size() == 1);
  CHECK(cat.reps(1).size() == 1);
}

TEST_CASE("realizability examples") {
  auto D = InnerProductSet::equiangular(Rational(1, 3));
  GramPattern two(2, 1);
  CHECK(is_realizable(two, D, 2));
  GramPattern minus4(4, 0);
  CHECK(is_realizable(minus4, D, 3));
  CHECK(is_realizable(minus4, D, 10));
  CHECK_FALSE(is_realizable(minus4, D, 2));
  CHECK(exact_rank_psd(minus4.gram(D)).rank == 3);
}

TEST_CASE("exact realizability agrees with floating eigenvalues") {
  std::mt19937_64 rng(41);
  std::vector<Rational> pool = {Rational(1, 3), Rational(-1, 3), Rational(1, 5), Rational(-1, 5),
                                Rational(1, 2), Rational(-1, 7)};
  int checked = 0;
  while (checked < 1000) {
    std::shuffle(pool.begin(), pool.end(), rng);
    InnerProductSet D({pool[0], pool[1], pool[2]});
    int s = 2 + static_cast<int>(rng() % 7);
    GramPattern p(s);
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) p.set(i, j, static_cast<int>(rng() % 3));
    auto g = p.gram(D);
    Matrix<double> m(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) m(i, j) = g[i][j].convert_to<double>();
    double lam = min_eig_estimate(m);
    if (std::abs(lam) <= 1e-6) continue;
    CHECK(is_realizable(p, D, s) == (lam > 0));
    ++checked;
  }
}

TEST_CASE("stabilizers") {
  GramPattern two(2, 1);
  CHECK(stabilizer(two).size() == 2);
  GramPattern one_minus(3, 1);
  one_minus.set(0, 1, 0);
  auto st = stabilizer(one_minus);
  CHECK(st.size() == 2);
  CHECK(stabilizer(GramPattern(4, 1)).size() == 24);

  OrbitCatalog cat = enumerate_orbits(InnerProductSet::equiangular(Rational(1, 5)), 5, 60);
  for (int s = 0; s <= 5; ++s) {
    size_t fact = 1;
    for (int i = 2; i <= s; ++i) fact *= static_cast<size_t>(i);
    for (const OrbitRep& r : cat.reps(s)) {
      CHECK(fact % r.stabilizer.size() == 0);
      std::set<std::vector<int>> copies;
      for (const Permutation& pi : all_permutations(s)) copies.insert(r.pattern.permuted(pi).upper());
      CHECK(copies.size() * r.stabilizer.size() == fact);
      std::set<Permutation> group(r.stabilizer.begin(), r.stabilizer.end());
      Permutation id(static_cast<size_t>(s));
      std::iota(id.begin(), id.end(), 0);
      CHECK(group.count(id) == 1);
      for (const auto& a : r.stabilizer)
        for (const auto& b : r.stabilizer) {
          Permutation c(static_cast<size_t>(s));
          for (int i = 0; i < s; ++i) c[i] = a[b[i]];
          CHECK(group.count(c) == 1);
        }
    }
  }
}

TEST_CASE("canonical form is a complete invariant up to five points") {
  for (int s = 0; s <= 5; ++s) {
    testing::BruteForce bf(s);
    std::map<uint32_t, std::string> seen;
    std::map<std::string, uint32_t> back;
    for (uint32_t mask = 0; mask < (1u << bf.edges.size()); ++mask) {
      GramPattern p(s);
      for (size_t e = 0; e < bf.edges.size(); ++e)
        p.set(bf.edges[e].first, bf.edges[e].second, (mask >> e & 1u) ? 1 : 0);
      uint32_t oracle = bf.canonical(mask);
      std::string label = canonical_form(p);
      auto [it, fresh] = seen.emplace(oracle, label);
      CHECK(it->second == label);
      auto [jt, fresh2] = back.emplace(label, oracle);
      CHECK(jt->second == oracle);
    }
  }
}

TEST_CASE("alignment") {
  OrbitCatalog cat = enumerate_orbits(InnerProductSet::equiangular(Rational(1, 5)), 5, 60);
  std::mt19937_64 rng(3);
  for (int s = 0; s <= 5; ++s) {
    for (const OrbitRep& r : cat.reps(s)) {
      Alignment a = cat.align(r.pattern);
      CHECK(a.rep_index == r.orbit_index);
      Permutation id(static_cast<size_t>(s));
      std::iota(id.begin(), id.end(), 0);
      CHECK(a.pi == id);
      Permutation tau = id;
      std::shuffle(tau.begin(), tau.end(), rng);
      GramPattern q = r.pattern.permuted(tau);
      Alignment b = cat.align(q);
      CHECK(b.rep_index == r.orbit_index);
      CHECK(q.permuted(b.pi) == r.pattern);
    }
  }
}

TEST_CASE("block construction") {
  GramPattern p = block_construction(3, 1, 0);
  CHECK(p == GramPattern(3, 0));
  auto D5 = InnerProductSet::equiangular(Rational(1, 5));
  CHECK(is_realizable(p, D5, 3));
  CHECK_FALSE(is_realizable(p, D5, 2));

  GramPattern q = block_construction(2, 0, 3);
  CHECK(q == GramPattern(3, 1));
  CHECK(is_realizable(q, InnerProductSet::equiangular(Rational(1, 3)), 3));
  CHECK_THROWS_AS(block_construction(1, 2, 0), InvalidParameters);

  GramPattern big = block_construction(3, 92, 0);
  CHECK(big.size() == 276);
  RankInfo info = exact_rank_psd(big.gram(D5));
  CHECK(info.psd);
  CHECK(info.rank <= 185);
}

TEST_CASE("catalog text round trip") {
  OrbitCatalog cat = enumerate_orbits(InnerProductSet::equiangular(Rational(1, 3)), 5, 7);
  std::string text = cat.export_text();
  OrbitCatalog back = OrbitCatalog::import_text(text);
  CHECK(back.export_text() == text);
  CHECK(back.hash() == cat.hash());
  CHECK(back.counts() == cat.counts());
  CHECK_THROWS_AS(OrbitCatalog::import_text("# D -1/3,1/3\n# k 3 n 7\n2 0 5\n"), ParseError);
}

TEST_CASE("rank filter only bites below k points") {
  auto D = InnerProductSet::equiangular(Rational(1, 3));
  OrbitCatalog wide = enumerate_orbits(D, 5, 5);
  for (int s = 0; s <= 5; ++s)
    for (const OrbitRep& r : wide.reps(s)) CHECK(r.rank <= s);
  OrbitCatalog narrow = enumerate_orbits(D, 5, 3);
  CHECK(narrow.reps(4).size() <= wide.reps(4).size());
  for (const OrbitRep& r : narrow.reps(4)) CHECK(r.rank <= 3);
}
