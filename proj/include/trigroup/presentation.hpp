#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "trigroup/random.hpp"
#include "trigroup/words.hpp"

namespace trigroup {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// n generators and a set of distinct cyclically reduced words of length
/// three. Relations keep their insertion order; equality of words is exact
/// (rotations are distinct relations).
class Presentation {
 public:
  explicit Presentation(std::uint32_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("presentation needs n >= 1");
  }
  /// Throws std::invalid_argument on an invalid or duplicated relation.
  Presentation(std::uint32_t n, std::vector<Word> relations);

  static Presentation from_ranks(std::uint32_t n, std::span<const std::uint64_t> ranks);

  std::uint32_t generators() const { return n_; }
  std::span<const Word> relations() const { return relations_; }
  std::size_t size() const { return relations_.size(); }
  const Word& operator[](std::size_t i) const { return relations_[i]; }

  /// Relations ordered by ascending rank; the canonical file order.
  std::vector<Word> sorted_relations() const;

 private:
  std::uint32_t n_;
  std::vector<Word> relations_;
};

/// "n=<n>" followed by one relation per line, ascending rank.
void write_presentation(std::ostream& out, const Presentation& p);
/// Throws FormatError on malformed input.
Presentation read_presentation(std::istream& in);

struct Partition {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> s1;  // generators 0 .. ceil(n/2)-1
  std::vector<std::uint32_t> s2;  // the rest
  std::vector<bool> in_s1;

  bool contains(Letter x) const { return in_s1[x.generator()]; }
};

Partition make_partition(std::uint32_t n);

/// 1 iff exactly one letter of the length-3 word has its generator in S1.
int stage_of(const Word& w, const Partition& partition);

struct SplitSample {
  Partition partition;
  std::vector<Word> r1;
  std::vector<Word> r2;
  double p = 0.0;

  std::uint32_t generators() const { return partition.n; }
  Presentation presentation() const;
};

/// Splits an existing presentation by stage; the result has p = NaN.
SplitSample split_by_stage(const Presentation& pres);

/// Γ(n,p): each of the N words independently with probability p.
Presentation sample_binomial(std::uint32_t n, double p, Rng& rng);

/// Γ(n,t): a uniform t-subset, drawn as the first t distinct ranks of a
/// uniform random sequence so that samples for growing t from the same
/// stream are nested.
Presentation sample_uniform(std::uint32_t n, std::uint64_t t, Rng& rng);

/// Two-stage generation of Γ(n,p) with the S1/S2 decomposition. Requires n >= 2.
SplitSample sample_two_stage(std::uint32_t n, double p, Rng& rng);

/// Extends a single random rank sequence on demand; prefix(t) for growing t
/// yields nested relation sets.
class NestedUniformSampler {
 public:
  NestedUniformSampler(std::uint32_t n, std::uint64_t seed);

  Presentation prefix(std::uint64_t t);
  std::uint64_t universe() const { return universe_; }

 private:
  std::uint32_t n_;
  std::uint64_t universe_;
  Rng rng_;
  std::vector<std::uint64_t> order_;
  std::unordered_set<std::uint64_t> seen_;
};

/// ln t / (3 ln n).
double density(std::uint32_t n, std::uint64_t t);

}  // namespace trigroup
