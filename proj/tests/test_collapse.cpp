#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "trigroup/collapse.hpp"

using namespace trigroup;

namespace {

Presentation pres(std::uint32_t n, std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (auto w : words) ws.push_back(parse_word(w));
  return Presentation(n, std::move(ws));
}

Element el(const char* token, std::uint32_t n) { return parse_element(token, n); }

// Fraction-free (Bareiss) determinant, used as an independent check on
// the product of invariant factors.
std::int64_t bareiss_det(std::vector<std::vector<std::int64_t>> a) {
  const std::size_t n = a.size();
  std::int64_t sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

Presentation random_presentation(Rng& rng, std::uint32_t max_n) {
  std::uniform_int_distribution<std::uint32_t> pick_n(1, max_n);
  const std::uint32_t n = pick_n(rng);
  const std::uint64_t universe = count_triangular(n);
  std::uniform_int_distribution<std::uint64_t> pick_t(0, std::min<std::uint64_t>(universe, 3ull * n * n));
  return sample_uniform(n, pick_t(rng), rng);
}

}  // namespace

TEST_CASE("relation facts cover every rotation of the relation and its inverse") {
  const Word w = parse_word("x0 x1 x2");
  const std::uint32_t n = 3;
  CHECK(relation_fact(w, 0, n) == ProductFact{el("x1", n), el("x2", n), el("X0", n)});
  CHECK(relation_fact(w, 1, n) == ProductFact{el("x2", n), el("x0", n), el("X1", n)});
  CHECK(relation_fact(w, 2, n) == ProductFact{el("x0", n), el("x1", n), el("X2", n)});
  // inverse relation X2 X1 X0
  CHECK(relation_fact(w, 3, n) == ProductFact{el("X1", n), el("X0", n), el("x2", n)});
  CHECK(relation_fact(w, 4, n) == ProductFact{el("X0", n), el("X2", n), el("x1", n)});
  CHECK(relation_fact(w, 5, n) == ProductFact{el("X2", n), el("X1", n), el("x0", n)});
}

TEST_CASE("saturate: Z/3 is not collapsed") {
  const auto p = pres(1, {"x0 x0 x0"});
  CongruenceClosure cc(p);
  cc.run();
  CHECK_FALSE(cc.same_class(el("x0", 1), el("e", 1)));
  CHECK_FALSE(cc.trivial());
  // aa = a^-1 is the only consequence: a^-1 and a stay apart.
  CHECK_FALSE(cc.same_class(el("x0", 1), el("X0", 1)));
}

TEST_CASE("saturate: a shared feature equates the two letters") {
  const auto p = pres(4, {"x0 x2 x3", "x1 x2 x3"});
  CongruenceClosure cc(p);
  cc.run();
  CHECK(cc.same_class(el("x0", 4), el("x1", 4)));
  CHECK(cc.same_class(el("X0", 4), el("X1", 4)));
  CHECK_FALSE(cc.trivial());
}

TEST_CASE("saturate: three relations that force collapse") {
  const auto p = pres(2, {"x0 x0 x1", "x1 x1 x0", "x0 X1 X1"});
  const auto result = saturate(p);
  CHECK(result.trivial);
  CHECK(is_trivial_detected(result));
  CHECK(abelianization(p).trivial());
  const auto report = replay(result.certificate, p);
  CHECK(report.ok());
  CHECK(report.all_generators_trivial);
}

TEST_CASE("is_trivial_detected") {
  CHECK_FALSE(is_trivial_detected(saturate(Presentation(3))));
  Rng rng(0);
  const auto full = sample_uniform(2, 28, rng);
  CHECK(is_trivial_detected(saturate(full)));
}

TEST_CASE("smith_diagonal") {
  CHECK(smith_diagonal({{2, 1}, {1, 2}}, 2) == std::vector<std::int64_t>{1, 3});
  CHECK(smith_diagonal({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}, 3) == std::vector<std::int64_t>{2, 6, 12});
  CHECK(smith_diagonal({{2, 0}, {0, 3}, {4, 6}}, 2) == std::vector<std::int64_t>{1, 6});
  CHECK(smith_diagonal({{0, 0}}, 2).empty());
  CHECK(smith_diagonal({}, 3).empty());
}

TEST_CASE("smith_diagonal: product equals |det| and factors form a divisibility chain") {
  Rng rng(17);
  std::uniform_int_distribution<int> entry(-3, 3);
  int nonsingular = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<std::int64_t>> m(4, std::vector<std::int64_t>(4));
    for (auto& row : m)
      for (auto& v : row) v = entry(rng);
    const auto det = bareiss_det(m);
    const auto diag = smith_diagonal(m, 4);
    for (std::size_t i = 1; i < diag.size(); ++i) REQUIRE(diag[i] % diag[i - 1] == 0);
    if (det == 0) {
      REQUIRE(diag.size() < 4);
      continue;
    }
    ++nonsingular;
    std::int64_t prod = 1;
    for (auto d : diag) prod *= d;
    REQUIRE(diag.size() == 4);
    REQUIRE(prod == std::abs(det));
  }
  CHECK(nonsingular > 100);
}

TEST_CASE("smith_diagonal reports overflow distinctly") {
  const std::int64_t big = std::int64_t{1} << 40;
  CHECK_THROWS_AS(smith_diagonal({{big, 0}, {0, big + 1}}, 2), AbelianizationOverflow);
}

TEST_CASE("abelianization") {
  const auto free3 = abelianization(Presentation(3));
  CHECK(free3.free_rank == 3);
  CHECK(free3.torsion.empty());

  const auto z3 = abelianization(pres(1, {"x0 x0 x0"}));
  CHECK(z3.free_rank == 0);
  CHECK(z3.torsion == std::vector<std::int64_t>{3});

  const auto two = abelianization(pres(2, {"x0 x0 x1", "x1 x1 x0"}));
  CHECK(two.free_rank == 0);
  CHECK(two.torsion == std::vector<std::int64_t>{3});

  const auto mixed = abelianization(pres(2, {"x0 x1 x0"}));  // b = a^-2
  CHECK(mixed.free_rank == 1);
  CHECK(mixed.torsion.empty());
}

TEST_CASE("verdict") {
  const auto z3 = verdict(pres(1, {"x0 x0 x0"}));
  CHECK(z3.kind == VerdictKind::nontrivial_abelianization);
  CHECK(z3.abelian.torsion == std::vector<std::int64_t>{3});

  const auto triv = verdict(pres(2, {"x0 x0 x1", "x1 x1 x0", "x0 X1 X1"}));
  CHECK(triv.kind == VerdictKind::trivial);
  CHECK(replay(triv.certificate, pres(2, {"x0 x0 x1", "x1 x1 x0", "x0 X1 X1"})).all_generators_trivial);

  const auto free5 = verdict(Presentation(5));
  CHECK(free5.kind == VerdictKind::nontrivial_abelianization);
  CHECK(free5.abelian.free_rank == 5);
}

TEST_CASE("verdict honours the step cap") {
  Rng rng(0);
  const auto full = sample_uniform(2, 28, rng);
  const auto v = verdict(full, {0, true});
  CHECK(v.capped);
  CHECK(v.kind != VerdictKind::trivial);
}

TEST_CASE("replay accepts emitted certificates and rejects tampering") {
  Rng rng(3);
  const auto p = sample_uniform(2, 12, rng);
  auto cert = saturate(p).certificate;
  REQUIRE_FALSE(cert.steps.empty());
  CHECK(replay(cert, p).ok());

  SUBCASE("altered conclusion") {
    auto bad = cert;
    for (auto& s : bad.steps) {
      if (auto* e = std::get_if<Equality>(&s.conclusion)) {
        e->b = e->b == 0 ? 1 : 0;
        break;
      }
    }
    CHECK(replay(bad, p).status == ReplayStatus::invalid_deduction);
  }
  SUBCASE("altered fact") {
    auto bad = cert;
    auto& f = std::get<ProductFact>(bad.steps.front().conclusion);
    f.product = identity_element(2);
    CHECK(replay(bad, p).status == ReplayStatus::invalid_deduction);
  }
  SUBCASE("forward reference") {
    auto bad = cert;
    bad.steps.push_back(Step{Rule::congruence_merge, {bad.steps.size() + 5, 0}, Equality{0, 1}});
    CHECK(replay(bad, p).status == ReplayStatus::malformed);
  }
  SUBCASE("wrong presentation") {
    CHECK(replay(cert, Presentation(2)).status == ReplayStatus::malformed);
  }
  SUBCASE("unsupported shortcut") {
    Certificate fake{2, p.size(), {Step{Rule::builtin_inverse, {}, ProductFact{0, 0, 4}}}};
    CHECK(replay(fake, p).status == ReplayStatus::invalid_deduction);
  }
}

TEST_CASE("certificate text round trip") {
  const auto p = pres(2, {"x0 x0 x1", "x1 x1 x0", "x0 X1 X1"});
  const auto cert = saturate(p).certificate;
  std::ostringstream out;
  write_certificate(out, cert);
  std::istringstream in(out.str());
  const auto back = read_certificate(in);
  CHECK(back.steps.size() == cert.steps.size());
  std::ostringstream again;
  write_certificate(again, back);
  CHECK(again.str() == out.str());
  CHECK(replay(back, p).all_generators_trivial);

  std::istringstream garbage("not a certificate");
  CHECK_THROWS_AS(read_certificate(garbage), CertificateFormatError);
  std::istringstream wrong_version("trigroup-certificate 9\n");
  CHECK_THROWS_AS(read_certificate(wrong_version), CertificateFormatError);
  std::istringstream bad_rule("trigroup-certificate 1\ngenerators 1\nrelations 0\nsteps 1\n0 magic - e=e\n");
  CHECK_THROWS_AS(read_certificate(bad_rule), CertificateFormatError);
}

TEST_CASE("saturation is sound on small exhaustive families") {
  // Every presentation over n = 1 with t <= 2 and n = 2 with t <= 3.
  for (std::uint32_t n : {1u, 2u}) {
    const auto universe = oracle::enumerate_cyclically_reduced(n, 3);
    const std::size_t max_t = n == 1 ? 2 : 3;
    std::vector<std::size_t> pick;
    std::size_t checked = 0;
    auto visit = [&](auto&& self, std::size_t start) -> void {
      std::vector<Word> ws;
      for (auto i : pick) ws.push_back(universe[i]);
      const Presentation p(n, ws);
      const auto sat = saturate(p);
      const auto ab = abelianization(p);
      REQUIRE_FALSE((sat.trivial && !ab.trivial()));
      REQUIRE(replay(sat.certificate, p).ok());
      ++checked;
      if (pick.size() == max_t) return;
      for (std::size_t i = start; i < universe.size(); ++i) {
        pick.push_back(i);
        self(self, i + 1);
        pick.pop_back();
      }
    };
    visit(visit, 0);
    CHECK(checked == (n == 1 ? 4u : 1u + 28u + 378u + 3276u));
  }
}

TEST_CASE("saturation is independent of relation order") {
  Rng rng(8);
  for (int instance = 0; instance < 10; ++instance) {
    const Presentation p = sample_uniform(12, 150 + 40 * instance, rng);
    const auto reference = saturate(p).classes;
    std::vector<Word> ws(p.relations().begin(), p.relations().end());
    for (int shuffle = 0; shuffle < 20; ++shuffle) {
      std::shuffle(ws.begin(), ws.end(), rng);
      REQUIRE(saturate(Presentation(12, ws)).classes == reference);
    }
  }
}

TEST_CASE("saturation is idempotent") {
  Rng rng(9);
  for (int instance = 0; instance < 10; ++instance) {
    const Presentation p = sample_uniform(15, 100 + 60 * instance, rng);
    CongruenceClosure cc(p);
    cc.run();
    const auto classes = cc.partition();
    const auto steps = cc.certificate().steps.size();
    CHECK(cc.rebuild());
    CHECK(cc.partition() == classes);
    CHECK(cc.certificate().steps.size() == steps);
  }
}

TEST_CASE("detection is monotone along nested samples") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    NestedUniformSampler sampler(20, seed);
    bool seen = false;
    for (std::uint64_t t = 0; t <= 400; t += 20) {
      const bool now = saturate(sampler.prefix(t), {100'000'000, false}).trivial;
      REQUIRE((!seen || now));
      seen = now;
    }
  }
}

TEST_CASE("random certificates replay") {
  Rng rng(10);
  for (int i = 0; i < 300; ++i) {
    const Presentation p = random_presentation(rng, 12);
    const auto sat = saturate(p);
    const auto report = replay(sat.certificate, p);
    REQUIRE(report.ok());
    REQUIRE(report.all_generators_trivial == sat.trivial);
  }
}

namespace {

// n = 8, S1 = {0..3}. Stage one chains all eight S1 letters through shared
// features; stage two supplies x0 x1 x2 and one relation per S2 generator.
SplitSample chained_fixture() {
  SplitSample s;
  s.partition = make_partition(8);
  s.p = 0.0;
  const char* letters[] = {"x0", "X0", "x1", "X1", "x2", "X2", "x3", "X3"};
  const char* pairs[] = {"x4 x5", "x4 x6", "x4 x7", "x5 x6", "x5 x7", "x6 x7", "X4 X5"};
  for (int i = 0; i < 7; ++i) {
    s.r1.push_back(parse_word(std::string(letters[i]) + " " + pairs[i]));
    s.r1.push_back(parse_word(std::string(letters[i + 1]) + " " + pairs[i]));
  }
  for (const char* w : {"x0 x1 x2", "x4 x0 x1", "x0 x5 x1", "x0 x1 X6", "x7 x1 x0"}) {
    s.r2.push_back(parse_word(w));
  }
  return s;
}

}  // namespace

TEST_CASE("witness pipeline on a hand-built fixture") {
  const SplitSample split = chained_fixture();
  const WitnessResult w = witness_pipeline(split);
  REQUIRE(w.success);
  CHECK(w.failure == WitnessFailure::none);
  CHECK(w.component.size() == 8);
  CHECK(w.threshold == 5);
  CHECK(w.pivot == Letter(0, false));
  CHECK(w.cube_relation == split.r1.size());
  const auto report = replay(w.certificate, split.presentation());
  CHECK(report.ok());
  CHECK(report.all_generators_trivial);
  CHECK(saturate(split.presentation()).trivial);

  SUBCASE("missing cube relation") {
    auto s = split;
    s.r2.erase(s.r2.begin());
    CHECK(witness_pipeline(s).failure == WitnessFailure::no_cube_relation);
  }
  SUBCASE("missing propagation relation") {
    auto s = split;
    s.r2.pop_back();
    const auto r = witness_pipeline(s);
    CHECK(r.failure == WitnessFailure::propagation_incomplete);
    CHECK(r.uncovered == std::vector<std::uint32_t>{7});
  }
  SUBCASE("component without an inverse pair") {
    // Above n = 5 the threshold exceeds |S1|, so a large enough component
    // always holds some s and s^-1.
    SplitSample s;
    s.partition = make_partition(5);
    for (const char* w : {"x0 x3 x4", "x1 x3 x4", "x2 x3 x4"}) s.r1.push_back(parse_word(w));
    const auto r = witness_pipeline(s);
    CHECK(r.threshold == 3);
    CHECK(r.component.size() == 3);
    CHECK(r.failure == WitnessFailure::no_inverse_pair);
  }
}

TEST_CASE("witness pipeline failure modes and input checks") {
  SplitSample empty;
  empty.partition = make_partition(8);
  CHECK(witness_pipeline(empty).failure == WitnessFailure::no_giant_component);

  SplitSample wrong;
  wrong.partition = make_partition(8);
  wrong.r1.push_back(parse_word("x0 x1 x2"));
  CHECK_THROWS_AS(witness_pipeline(wrong), std::invalid_argument);

  SplitSample tiny;
  tiny.partition = make_partition(3);
  CHECK_THROWS_AS(witness_pipeline(tiny), std::invalid_argument);
}

TEST_CASE("witness success implies saturation success on random splits") {
  const std::uint32_t n = 120;
  const double p = 1.2 * std::pow(double(n), -1.5);
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const SplitSample split = sample_two_stage(n, p, rng);
    const WitnessResult w = witness_pipeline(split);
    if (!w.success) continue;
    ++successes;
    const Presentation all = split.presentation();
    REQUIRE(replay(w.certificate, all).all_generators_trivial);
    REQUIRE(saturate(all, {100'000'000, false}).trivial);
  }
  CHECK(successes > 0);
}

TEST_CASE("pipeline_failure_bound arithmetic") {
  const auto at = [](std::uint32_t n) { return pipeline_failure_bound(n, 1.2 * std::pow(double(n), -1.5)); };
  CHECK(at(100).stated_bound == doctest::Approx(1.4208335672592136).epsilon(1e-12));
  CHECK(at(10000).stated_bound == doctest::Approx(1.2061518717266562e-12).epsilon(1e-9));
  CHECK(at(16).expected_uncovered == doctest::Approx(2.477548646036229).epsilon(1e-12));
  CHECK(at(100).expected_uncovered == doctest::Approx(2.584267952376198).epsilon(1e-12));
  for (std::uint32_t n : {4u, 16u, 100u, 10000u, 1000000u}) {
    const auto b = at(n);
    CHECK(b.expected_uncovered <= b.elementary_bound);
    // (1-p)^(n^2/4) is about exp(-0.3 sqrt n) here, above exp(-0.36 sqrt n).
    CHECK(b.expected_uncovered > b.stated_bound);
  }
}

TEST_CASE("euler_characteristic") {
  CHECK(euler_characteristic(2, 1) == 0);
  CHECK(euler_characteristic(1, 0) == 0);
  CHECK(euler_characteristic(3, 5) == 3);
}
