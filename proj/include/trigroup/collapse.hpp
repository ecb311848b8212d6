#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "trigroup/igraph.hpp"
#include "trigroup/presentation.hpp"

namespace trigroup {

// Group elements tracked by the engine: letter codes [0, 2n) and the
// identity, which takes index 2n.
using Element = std::uint32_t;

inline Element identity_element(std::uint32_t n) { return 2 * n; }
inline Element element_inverse(Element x, std::uint32_t n) {
  return x == identity_element(n) ? x : (x ^ 1u);
}
std::string element_token(Element x, std::uint32_t n);
Element parse_element(std::string_view token, std::uint32_t n);

// ---------------------------------------------------------------------------
// Certificates

enum class Rule : std::uint8_t {
  relation_fact,        // premises {relation index, rotation 0..5}
  congruence_merge,     // premises {fact step, fact step}
  involution,           // premises {equality step}
  builtin_inverse,      // x * x^-1 = e
  identity_absorption,  // e * x = x, x * e = x
};

std::string_view to_string(Rule r);
std::optional<Rule> parse_rule(std::string_view s);

/// left * right = product in the group.
struct ProductFact {
  Element left, right, product;
  friend bool operator==(const ProductFact&, const ProductFact&) = default;
};

struct Equality {
  Element a, b;
  friend bool operator==(const Equality&, const Equality&) = default;
};

struct Step {
  Rule rule;
  std::vector<std::uint64_t> premises;
  std::variant<ProductFact, Equality> conclusion;
};

struct Certificate {
  std::uint32_t generators = 0;
  std::uint64_t relations = 0;
  std::vector<Step> steps;
};

/// The fact a relation contributes under rotation k: for k < 3, rotating the
/// relation to abc gives b*c = a^-1; k in 3..5 does the same for the inverse
/// relation.
ProductFact relation_fact(const Word& relation, unsigned rotation, std::uint32_t n);

struct CertificateFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Versioned text form: a header, then "<id> <rule> <premises> <conclusion>"
/// per step.
void write_certificate(std::ostream& out, const Certificate& cert);
Certificate read_certificate(std::istream& in);

enum class ReplayStatus { valid, invalid_deduction, malformed };

struct ReplayReport {
  ReplayStatus status = ReplayStatus::valid;
  std::uint64_t failed_step = 0;
  std::string message;
  /// Canonical class label (smallest member) per element after replay.
  std::vector<Element> classes;
  bool all_generators_trivial = false;

  bool ok() const { return status == ReplayStatus::valid; }
};

/// Re-derives every step from the presentation. Equality is read as an
/// equivalence relation; everything else must come from the five rules.
ReplayReport replay(const Certificate& cert, const Presentation& pres);

// ---------------------------------------------------------------------------
// Saturation

struct SaturationOptions {
  std::uint64_t max_steps = 100'000'000;
  bool record_certificate = true;
};

/// Congruence closure over the product facts of a triangular presentation:
/// relation facts for every rotation of each relation and of its inverse,
/// x * x^-1 = e, identity absorption, congruence of equal keys, and
/// involution on every merge.
class CongruenceClosure {
 public:
  explicit CongruenceClosure(const Presentation& pres, SaturationOptions options = {});

  /// Runs to fixpoint or until the step cap; returns false if capped.
  bool run();
  /// Rehashes every fact against the current classes and runs again. A
  /// saturated table is left unchanged.
  bool rebuild();

  bool capped() const { return capped_; }
  std::uint64_t steps_used() const { return steps_used_; }
  std::uint32_t generators() const { return n_; }

  Element find(Element x) const;
  bool same_class(Element a, Element b) const { return find(a) == find(b); }
  /// Smallest member of each element's class.
  std::vector<Element> partition() const;
  std::size_t class_count() const;
  bool trivial() const;

  const Certificate& certificate() const { return cert_; }

 private:
  struct FactRecord {
    ProductFact fact;
    Rule rule;
    std::uint32_t origin_a = 0, origin_b = 0;  // relation index and rotation
    std::int64_t step = -1;
    std::uint64_t key = 0;
    bool active = false;
  };
  struct PendingMerge {
    Element a, b;
    std::int64_t step;
  };

  void add_fact(ProductFact f, Rule rule, std::uint32_t oa = 0, std::uint32_t ob = 0);
  void insert(std::uint32_t fact);
  std::int64_t emit_fact(std::uint32_t fact);
  std::int64_t emit(Rule rule, std::vector<std::uint64_t> premises, Equality e);
  void merge(const PendingMerge& m);
  std::uint64_t key_of(const ProductFact& f) const {
    return std::uint64_t(find(f.left)) * elements_ + find(f.right);
  }

  std::uint32_t n_;
  std::uint32_t elements_;
  SaturationOptions options_;
  mutable std::vector<Element> parent_;
  std::vector<std::vector<std::uint32_t>> uses_;
  std::vector<FactRecord> facts_;
  std::unordered_map<std::uint64_t, std::uint32_t> table_;
  std::vector<PendingMerge> queue_;
  std::size_t queue_head_ = 0;
  std::uint64_t steps_used_ = 0;
  bool capped_ = false;
  Certificate cert_;
};

struct SaturationResult {
  std::vector<Element> classes;
  Certificate certificate;
  bool capped = false;
  bool trivial = false;
};

SaturationResult saturate(const Presentation& pres, SaturationOptions options = {});

/// True iff every generator shares the identity's class.
bool is_trivial_detected(const SaturationResult& result);

// ---------------------------------------------------------------------------
// Abelianization

struct AbelianizationOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

struct Abelianization {
  std::vector<std::int64_t> torsion;  // invariant factors > 1, each dividing the next
  std::uint32_t free_rank = 0;

  bool trivial() const { return torsion.empty() && free_rank == 0; }
};

/// Smith normal form of the relation exponent-sum matrix. Throws
/// AbelianizationOverflow if an intermediate entry leaves int64.
Abelianization abelianization(const Presentation& pres);

/// Invariant factors (including units) of an integer matrix, in divisibility
/// order; exposed for testing.
std::vector<std::int64_t> smith_diagonal(std::vector<std::vector<std::int64_t>> rows,
                                         std::size_t cols);

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictKind { trivial, nontrivial_abelianization, unknown };
std::string_view to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  Certificate certificate;          // meaningful for trivial
  Abelianization abelian;           // meaningful for nontrivial_abelianization
  bool capped = false;              // saturation hit its step cap
  bool abelian_overflow = false;
};

Verdict verdict(const Presentation& pres, SaturationOptions options = {});

// ---------------------------------------------------------------------------
// The explicit collapse argument for two-stage samples

enum class WitnessFailure {
  none,
  no_giant_component,
  no_inverse_pair,
  no_cube_relation,
  propagation_incomplete,
};
std::string_view to_string(WitnessFailure f);

struct WitnessResult {
  bool success = false;
  WitnessFailure failure = WitnessFailure::none;
  std::uint32_t threshold = 0;           // ceil(0.52 n)
  std::vector<Letter> component;         // the largest component L
  std::optional<Letter> pivot;           // s, with s and s^-1 both in L
  std::optional<std::size_t> cube_relation;  // index into presentation()
  std::vector<std::uint32_t> uncovered;  // generators left by propagation
  Certificate certificate;               // replays against split.presentation()
};

/// Throws std::invalid_argument if the split's stages disagree with its
/// partition or n < 4.
WitnessResult witness_pipeline(const SplitSample& split);

struct FailureBound {
  double expected_uncovered;  // 0.52 n (1-p)^(n^2/4)
  double stated_bound;        // 0.52 n exp(-0.36 sqrt n)
  double elementary_bound;    // 0.52 n exp(-p n^2/4)
};

FailureBound pipeline_failure_bound(std::uint32_t n, double p);

/// 1 - n + t.
std::int64_t euler_characteristic(std::int64_t n, std::int64_t t);

}  // namespace trigroup
