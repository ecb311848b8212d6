#include "trigroup/presentation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace trigroup {

namespace {

constexpr std::uint32_t kRelationLength = 3;

// Below this universe size, or above this p, Bernoulli scanning of every
// index beats count-then-reject.
constexpr std::uint64_t kScanUniverse = 1u << 16;
constexpr double kScanProbability = 0.05;

bool use_scan(std::uint64_t universe, double p) {
  return universe <= kScanUniverse || p >= kScanProbability;
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
}

// Draws `k` distinct indices accepted by `keep` from [0, universe) by
// rejection; `keep` must admit at least k indices.
template <class Keep>
void distinct_indices(std::uint64_t universe, std::uint64_t k, Rng& rng, Keep keep,
                      std::vector<std::uint64_t>& out) {
  std::uniform_int_distribution<std::uint64_t> pick(0, universe - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(k * 2);
  while (out.size() < k) {
    auto r = pick(rng);
    if (keep(r) && seen.insert(r).second) out.push_back(r);
  }
}

// Each index in [0, universe) accepted by `keep` joins the result with
// probability p. `admissible` is the number of indices `keep` accepts.
template <class Keep>
std::vector<std::uint64_t> bernoulli_subset(std::uint64_t universe, std::uint64_t admissible,
                                            double p, Rng& rng, Keep keep) {
  std::vector<std::uint64_t> out;
  if (p == 0.0 || admissible == 0) return out;
  if (use_scan(universe, p)) {
    std::bernoulli_distribution coin(p);
    for (std::uint64_t r = 0; r < universe; ++r) {
      if (keep(r) && coin(rng)) out.push_back(r);
    }
    return out;
  }
  std::binomial_distribution<std::uint64_t> count(admissible, p);
  distinct_indices(universe, count(rng), rng, keep, out);
  return out;
}

struct StageOneIndex {
  const Partition& part;
  std::uint64_t a;  // |S1 ∪ S1^-1|
  std::uint64_t b;  // |S2 ∪ S2^-1|

  explicit StageOneIndex(const Partition& p) : part(p), a(2 * p.s1.size()), b(2 * p.s2.size()) {}

  std::uint64_t size() const { return 3 * a * b * (b - (b > 0 ? 1 : 0)); }

  Letter s1_letter(std::uint64_t i) const { return Letter(part.s1[i >> 1], i & 1); }
  Letter s2_letter(std::uint64_t i) const { return Letter(part.s2[i >> 1], i & 1); }

  // index = ((rotation * a) + s) * b(b-1) + pair, with pair the dense index of
  // an ordered (c, d) with d != c^-1.
  Word word(std::uint64_t index) const {
    const std::uint64_t pairs = b * (b - 1);
    const std::uint64_t pair = index % pairs;
    index /= pairs;
    const std::uint64_t s = index % a;
    const std::uint64_t rotation = index / a;
    const std::uint64_t c = pair / (b - 1);
    std::uint64_t d = pair % (b - 1);
    if (d >= (c ^ 1u)) ++d;
    Word base{s1_letter(s), s2_letter(c), s2_letter(d)};
    return rotate(base, rotation);
  }
};

}  // namespace

Presentation::Presentation(std::uint32_t n, std::vector<Word> relations) : Presentation(n) {
  WordIndex index(n, kRelationLength);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(relations.size() * 2);
  for (const auto& w : relations) {
    if (w.size() != kRelationLength) {
      throw std::invalid_argument("relation '" + to_string(w) + "' does not have length 3");
    }
    if (!seen.insert(index.rank(w)).second) {
      throw std::invalid_argument("duplicate relation '" + to_string(w) + "'");
    }
  }
  relations_ = std::move(relations);
}

Presentation Presentation::from_ranks(std::uint32_t n, std::span<const std::uint64_t> ranks) {
  Presentation p(n);
  WordIndex index(n, kRelationLength);
  p.relations_.reserve(ranks.size());
  for (auto r : ranks) p.relations_.push_back(index.unrank(r));
  return p;
}

std::vector<Word> Presentation::sorted_relations() const {
  WordIndex index(n_, kRelationLength);
  std::vector<std::pair<std::uint64_t, const Word*>> keyed;
  keyed.reserve(relations_.size());
  for (const auto& w : relations_) keyed.emplace_back(index.rank(w), &w);
  std::sort(keyed.begin(), keyed.end());
  std::vector<Word> out;
  out.reserve(keyed.size());
  for (auto& [r, w] : keyed) out.push_back(*w);
  return out;
}

void write_presentation(std::ostream& out, const Presentation& p) {
  out << "n=" << p.generators() << '\n';
  for (const auto& w : p.sorted_relations()) out << to_string(w) << '\n';
}

Presentation read_presentation(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n=", 0) != 0) {
    throw FormatError("presentation must start with a line 'n=<integer>'");
  }
  std::uint32_t n = 0;
  auto digits = std::string_view(line).substr(2);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || n == 0) {
    throw FormatError("bad generator count line '" + line + "'");
  }
  std::vector<Word> relations;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Word w = parse_word(line);
      if (w.generator_bound() > n) throw std::invalid_argument("letter outside alphabet");
      relations.push_back(std::move(w));
    } catch (const std::invalid_argument& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    return Presentation(n, std::move(relations));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Partition make_partition(std::uint32_t n) {
  Partition part;
  part.n = n;
  part.in_s1.assign(n, false);
  const std::uint32_t half = (n + 1) / 2;
  for (std::uint32_t g = 0; g < n; ++g) {
    if (g < half) {
      part.s1.push_back(g);
      part.in_s1[g] = true;
    } else {
      part.s2.push_back(g);
    }
  }
  return part;
}

int stage_of(const Word& w, const Partition& partition) {
  int hits = 0;
  for (Letter x : w) hits += partition.contains(x) ? 1 : 0;
  return hits == 1 ? 1 : 2;
}

Presentation SplitSample::presentation() const {
  std::vector<Word> all;
  all.reserve(r1.size() + r2.size());
  all.insert(all.end(), r1.begin(), r1.end());
  all.insert(all.end(), r2.begin(), r2.end());
  return Presentation(partition.n, std::move(all));
}

SplitSample split_by_stage(const Presentation& pres) {
  SplitSample split;
  split.partition = make_partition(pres.generators());
  split.p = std::numeric_limits<double>::quiet_NaN();
  for (const auto& w : pres.relations()) {
    (stage_of(w, split.partition) == 1 ? split.r1 : split.r2).push_back(w);
  }
  return split;
}

Presentation sample_binomial(std::uint32_t n, double p, Rng& rng) {
  check_probability(p);
  const std::uint64_t universe = count_triangular(n);
  auto ranks = bernoulli_subset(universe, universe, p, rng, [](std::uint64_t) { return true; });
  return Presentation::from_ranks(n, ranks);
}

Presentation sample_uniform(std::uint32_t n, std::uint64_t t, Rng& rng) {
  const std::uint64_t universe = count_triangular(n);
  if (t > universe) throw std::invalid_argument("t exceeds the number of cyclically reduced triples");
  std::vector<std::uint64_t> ranks;
  ranks.reserve(t);
  if (t > 0) distinct_indices(universe, t, rng, [](std::uint64_t) { return true; }, ranks);
  return Presentation::from_ranks(n, ranks);
}

SplitSample sample_two_stage(std::uint32_t n, double p, Rng& rng) {
  if (n < 2) throw std::invalid_argument("two-stage sampling needs n >= 2");
  check_probability(p);
  SplitSample split;
  split.partition = make_partition(n);
  split.p = p;

  const StageOneIndex first(split.partition);
  const std::uint64_t m1 = first.size();
  for (auto i : bernoulli_subset(m1, m1, p, rng, [](std::uint64_t) { return true; })) {
    split.r1.push_back(first.word(i));
  }

  const WordIndex index(n, kRelationLength);
  const std::uint64_t universe = index.count();
  auto second_stage = [&](std::uint64_t r) { return stage_of(index.unrank(r), split.partition) == 2; };
  for (auto r : bernoulli_subset(universe, universe - m1, p, rng, second_stage)) {
    split.r2.push_back(index.unrank(r));
  }
  return split;
}

NestedUniformSampler::NestedUniformSampler(std::uint32_t n, std::uint64_t seed)
    : n_(n), universe_(count_triangular(n)), rng_(seed) {}

Presentation NestedUniformSampler::prefix(std::uint64_t t) {
  if (t > universe_) throw std::invalid_argument("t exceeds the number of cyclically reduced triples");
  std::uniform_int_distribution<std::uint64_t> pick(0, universe_ - 1);
  while (order_.size() < t) {
    auto r = pick(rng_);
    if (seen_.insert(r).second) order_.push_back(r);
  }
  return Presentation::from_ranks(n_, std::span(order_).first(t));
}

double density(std::uint32_t n, std::uint64_t t) {
  if (n < 2) throw std::invalid_argument("density needs n >= 2");
  if (t == 0) throw std::invalid_argument("density undefined for t = 0");
  return std::log(double(t)) / (3.0 * std::log(double(n)));
}

}  // namespace trigroup
