#include "trigroup/collapse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "union_find.hpp"

namespace trigroup {

std::string element_token(Element x, std::uint32_t n) {
  if (x == identity_element(n)) return "e";
  return to_string(Letter::from_code(x));
}

Element parse_element(std::string_view token, std::uint32_t n) {
  if (token == "e") return identity_element(n);
  Letter l = parse_letter(token);
  if (l.generator() >= n) throw std::invalid_argument("element outside alphabet");
  return l.code();
}

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::relation_fact: return "relation-fact";
    case Rule::congruence_merge: return "congruence-merge";
    case Rule::involution: return "involution";
    case Rule::builtin_inverse: return "built-in-inverse";
    case Rule::identity_absorption: return "identity-absorption";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view s) {
  for (Rule r : {Rule::relation_fact, Rule::congruence_merge, Rule::involution,
                 Rule::builtin_inverse, Rule::identity_absorption}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

ProductFact relation_fact(const Word& relation, unsigned rotation, std::uint32_t n) {
  const Word w = rotation < 3 ? rotate(relation, rotation) : rotate(inverse(relation), rotation - 3);
  return {w[1].code(), w[2].code(), element_inverse(w[0].code(), n)};
}

// ---------------------------------------------------------------------------
// Certificate text form

namespace {

constexpr std::string_view kCertificateMagic = "trigroup-certificate";
constexpr int kCertificateVersion = 1;

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CertificateFormatError(std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string header_value(std::istream& in, std::string_view key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key) {
    throw CertificateFormatError("expected header field '" + std::string(key) + "'");
  }
  return v;
}

}  // namespace

void write_certificate(std::ostream& out, const Certificate& cert) {
  const auto n = cert.generators;
  out << kCertificateMagic << ' ' << kCertificateVersion << '\n'
      << "generators " << n << '\n'
      << "relations " << cert.relations << '\n'
      << "steps " << cert.steps.size() << '\n';
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const Step& s = cert.steps[i];
    out << i << ' ' << to_string(s.rule) << ' ';
    if (s.premises.empty()) out << '-';
    for (std::size_t j = 0; j < s.premises.size(); ++j) out << (j ? "," : "") << s.premises[j];
    out << ' ';
    if (auto* f = std::get_if<ProductFact>(&s.conclusion)) {
      out << element_token(f->left, n) << '*' << element_token(f->right, n) << '='
          << element_token(f->product, n);
    } else {
      auto& e = std::get<Equality>(s.conclusion);
      out << element_token(e.a, n) << '=' << element_token(e.b, n);
    }
    out << '\n';
  }
}

Certificate read_certificate(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCertificateMagic) {
    throw CertificateFormatError("missing certificate header");
  }
  if (version != kCertificateVersion) {
    throw CertificateFormatError("unsupported certificate version " + std::to_string(version));
  }
  Certificate cert;
  cert.generators = static_cast<std::uint32_t>(parse_u64(header_value(in, "generators"), "generators"));
  cert.relations = parse_u64(header_value(in, "relations"), "relations");
  const auto count = parse_u64(header_value(in, "steps"), "steps");
  const auto n = cert.generators;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id, rule, premises, conclusion;
    if (!(in >> id >> rule >> premises >> conclusion)) {
      throw CertificateFormatError("truncated certificate at step " + std::to_string(i));
    }
    if (parse_u64(id, "step id") != i) throw CertificateFormatError("step ids out of order at " + id);
    Step s;
    auto r = parse_rule(rule);
    if (!r) throw CertificateFormatError("unknown rule '" + rule + "'");
    s.rule = *r;
    if (premises != "-") {
      std::string_view rest = premises;
      while (!rest.empty()) {
        auto comma = rest.find(',');
        s.premises.push_back(parse_u64(rest.substr(0, comma), "premise"));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    }
    try {
      auto eq = conclusion.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("missing '='");
      auto lhs = std::string_view(conclusion).substr(0, eq);
      auto rhs = std::string_view(conclusion).substr(eq + 1);
      auto star = lhs.find('*');
      if (star == std::string_view::npos) {
        s.conclusion = Equality{parse_element(lhs, n), parse_element(rhs, n)};
      } else {
        s.conclusion = ProductFact{parse_element(lhs.substr(0, star), n),
                                   parse_element(lhs.substr(star + 1), n), parse_element(rhs, n)};
      }
    } catch (const std::invalid_argument& e) {
      throw CertificateFormatError("step " + id + ": bad conclusion '" + conclusion + "': " + e.what());
    }
    cert.steps.push_back(std::move(s));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Replay

ReplayReport replay(const Certificate& cert, const Presentation& pres) {
  ReplayReport report;
  const std::uint32_t n = pres.generators();
  const Element e = identity_element(n);
  const std::uint32_t elements = 2 * n + 1;
  detail::DisjointSets classes(elements);

  auto fail = [&](ReplayStatus status, std::uint64_t step, std::string msg) {
    report.status = status;
    report.failed_step = step;
    report.message = std::move(msg);
    return report;
  };

  if (cert.generators != n || cert.relations != pres.size()) {
    return fail(ReplayStatus::malformed, 0, "certificate was issued for a different presentation");
  }

  for (std::uint64_t i = 0; i < cert.steps.size(); ++i) {
    const Step& s = cert.steps[i];
    const auto* fact = std::get_if<ProductFact>(&s.conclusion);
    const auto* eq = std::get_if<Equality>(&s.conclusion);
    if (fact && (fact->left >= elements || fact->right >= elements || fact->product >= elements)) {
      return fail(ReplayStatus::malformed, i, "element out of range");
    }
    if (eq && (eq->a >= elements || eq->b >= elements)) {
      return fail(ReplayStatus::malformed, i, "element out of range");
    }
    auto fact_premise = [&](std::uint64_t p) -> const ProductFact* {
      if (p >= i) return nullptr;
      return std::get_if<ProductFact>(&cert.steps[p].conclusion);
    };

    switch (s.rule) {
      case Rule::relation_fact: {
        if (!fact || s.premises.size() != 2 || s.premises[0] >= pres.size() || s.premises[1] >= 6) {
          return fail(ReplayStatus::malformed, i, "relation-fact needs a relation index and rotation");
        }
        if (*fact != relation_fact(pres[s.premises[0]], static_cast<unsigned>(s.premises[1]), n)) {
          return fail(ReplayStatus::invalid_deduction, i, "fact does not follow from the relation");
        }
        break;
      }
      case Rule::builtin_inverse: {
        if (!fact || !s.premises.empty()) return fail(ReplayStatus::malformed, i, "built-in-inverse takes no premises");
        if (fact->left == e || fact->right != (fact->left ^ 1u) || fact->product != e) {
          return fail(ReplayStatus::invalid_deduction, i, "not of the form x * x^-1 = e");
        }
        break;
      }
      case Rule::identity_absorption: {
        if (!fact || !s.premises.empty()) {
          return fail(ReplayStatus::malformed, i, "identity-absorption takes no premises");
        }
        bool left_unit = fact->left == e && fact->right == fact->product;
        bool right_unit = fact->right == e && fact->left == fact->product;
        if (!left_unit && !right_unit) {
          return fail(ReplayStatus::invalid_deduction, i, "not of the form e * x = x or x * e = x");
        }
        break;
      }
      case Rule::congruence_merge: {
        if (!eq || s.premises.size() != 2) {
          return fail(ReplayStatus::malformed, i, "congruence-merge needs two fact premises");
        }
        const ProductFact* f1 = fact_premise(s.premises[0]);
        const ProductFact* f2 = fact_premise(s.premises[1]);
        if (!f1 || !f2) return fail(ReplayStatus::malformed, i, "premise is not an earlier fact step");
        if (classes.find(f1->left) != classes.find(f2->left) ||
            classes.find(f1->right) != classes.find(f2->right)) {
          return fail(ReplayStatus::invalid_deduction, i, "premise keys are not known to be equal");
        }
        if (eq->a != f1->product || eq->b != f2->product) {
          return fail(ReplayStatus::invalid_deduction, i, "conclusion does not equate the products");
        }
        classes.unite(eq->a, eq->b);
        break;
      }
      case Rule::involution: {
        if (!eq || s.premises.size() != 1 || s.premises[0] >= i) {
          return fail(ReplayStatus::malformed, i, "involution needs one earlier equality premise");
        }
        const auto* src = std::get_if<Equality>(&cert.steps[s.premises[0]].conclusion);
        if (!src) return fail(ReplayStatus::malformed, i, "involution premise is not an equality");
        if (eq->a != element_inverse(src->a, n) || eq->b != element_inverse(src->b, n)) {
          return fail(ReplayStatus::invalid_deduction, i, "conclusion is not the inverted premise");
        }
        classes.unite(eq->a, eq->b);
        break;
      }
      default:
        return fail(ReplayStatus::malformed, i, "unknown rule");
    }
  }

  std::vector<Element> smallest(elements, UINT32_MAX);
  report.classes.resize(elements);
  for (Element x = 0; x < elements; ++x) {
    auto r = classes.find(x);
    smallest[r] = std::min(smallest[r], x);
  }
  report.all_generators_trivial = true;
  for (Element x = 0; x < elements; ++x) {
    report.classes[x] = smallest[classes.find(x)];
    if (x < 2 * n && (x & 1u) == 0 && classes.find(x) != classes.find(e)) {
      report.all_generators_trivial = false;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Congruence closure

CongruenceClosure::CongruenceClosure(const Presentation& pres, SaturationOptions options)
    : n_(pres.generators()), elements_(2 * n_ + 1), options_(options), parent_(elements_),
      uses_(elements_) {
  std::iota(parent_.begin(), parent_.end(), Element{0});
  cert_.generators = n_;
  cert_.relations = pres.size();
  const Element e = identity_element(n_);

  facts_.reserve(6 * pres.size() + 3 * elements_);
  for (Element x = 0; x < 2 * n_; ++x) add_fact({x, x ^ 1u, e}, Rule::builtin_inverse);
  for (Element x = 0; x < elements_; ++x) {
    add_fact({e, x, x}, Rule::identity_absorption);
    if (x != e) add_fact({x, e, x}, Rule::identity_absorption);
  }
  for (std::uint32_t i = 0; i < pres.size(); ++i) {
    for (unsigned k = 0; k < 6; ++k) add_fact(relation_fact(pres[i], k, n_), Rule::relation_fact, i, k);
  }
  table_.reserve(facts_.size() * 2);
  for (std::uint32_t f = 0; f < facts_.size(); ++f) insert(f);
}

void CongruenceClosure::add_fact(ProductFact f, Rule rule, std::uint32_t oa, std::uint32_t ob) {
  FactRecord rec;
  rec.fact = f;
  rec.rule = rule;
  rec.origin_a = oa;
  rec.origin_b = ob;
  facts_.push_back(rec);
}

Element CongruenceClosure::find(Element x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

std::int64_t CongruenceClosure::emit_fact(std::uint32_t fi) {
  FactRecord& rec = facts_[fi];
  if (rec.step < 0) {
    Step s{rec.rule, {}, rec.fact};
    if (rec.rule == Rule::relation_fact) s.premises = {rec.origin_a, rec.origin_b};
    rec.step = static_cast<std::int64_t>(cert_.steps.size());
    cert_.steps.push_back(std::move(s));
  }
  return rec.step;
}

std::int64_t CongruenceClosure::emit(Rule rule, std::vector<std::uint64_t> premises, Equality e) {
  cert_.steps.push_back(Step{rule, std::move(premises), e});
  return static_cast<std::int64_t>(cert_.steps.size() - 1);
}

void CongruenceClosure::insert(std::uint32_t fi) {
  FactRecord& rec = facts_[fi];
  rec.key = key_of(rec.fact);
  auto [it, fresh] = table_.try_emplace(rec.key, fi);
  if (fresh) {
    rec.active = true;
    const Element l = find(rec.fact.left), r = find(rec.fact.right);
    uses_[l].push_back(fi);
    if (r != l) uses_[r].push_back(fi);
    return;
  }
  rec.active = false;
  const std::uint32_t gi = it->second;
  const Element a = facts_[gi].fact.product, b = rec.fact.product;
  if (find(a) == find(b)) return;
  std::int64_t step = -1;
  if (options_.record_certificate) {
    const auto pg = static_cast<std::uint64_t>(emit_fact(gi));
    const auto pf = static_cast<std::uint64_t>(emit_fact(fi));
    step = emit(Rule::congruence_merge, {pg, pf}, Equality{a, b});
  }
  queue_.push_back({a, b, step});
}

void CongruenceClosure::merge(const PendingMerge& m) {
  Element ra = find(m.a), rb = find(m.b);
  if (ra == rb) return;
  if (uses_[ra].size() < uses_[rb].size()) std::swap(ra, rb);
  const Element kept = ra, absorbed = rb;

  std::vector<std::uint32_t> moved = std::move(uses_[absorbed]);
  uses_[absorbed].clear();
  std::vector<std::uint32_t> rehash;
  rehash.reserve(moved.size());
  for (auto fi : moved) {
    FactRecord& rec = facts_[fi];
    if (!rec.active) continue;
    rec.active = false;
    table_.erase(rec.key);
    rehash.push_back(fi);
  }
  parent_[absorbed] = kept;
  for (auto fi : rehash) insert(fi);
  steps_used_ += 1 + rehash.size();

  const Element ia = element_inverse(m.a, n_), ib = element_inverse(m.b, n_);
  if (find(ia) != find(ib)) {
    std::int64_t step = -1;
    if (options_.record_certificate) {
      step = emit(Rule::involution, {static_cast<std::uint64_t>(m.step)}, Equality{ia, ib});
    }
    queue_.push_back({ia, ib, step});
  }
}

bool CongruenceClosure::run() {
  while (queue_head_ < queue_.size()) {
    if (steps_used_ >= options_.max_steps) {
      capped_ = true;
      return false;
    }
    const PendingMerge m = queue_[queue_head_++];
    merge(m);
  }
  queue_.clear();
  queue_head_ = 0;
  return true;
}

bool CongruenceClosure::rebuild() {
  table_.clear();
  for (auto& u : uses_) u.clear();
  for (auto& rec : facts_) rec.active = false;
  for (std::uint32_t f = 0; f < facts_.size(); ++f) insert(f);
  return run();
}

std::vector<Element> CongruenceClosure::partition() const {
  std::vector<Element> smallest(elements_, UINT32_MAX), out(elements_);
  for (Element x = 0; x < elements_; ++x) smallest[find(x)] = std::min(smallest[find(x)], x);
  for (Element x = 0; x < elements_; ++x) out[x] = smallest[find(x)];
  return out;
}

std::size_t CongruenceClosure::class_count() const {
  std::size_t c = 0;
  for (Element x = 0; x < elements_; ++x) c += find(x) == x;
  return c;
}

bool CongruenceClosure::trivial() const {
  const Element e = find(identity_element(n_));
  for (std::uint32_t g = 0; g < n_; ++g) {
    if (find(2 * g) != e) return false;
  }
  return true;
}

SaturationResult saturate(const Presentation& pres, SaturationOptions options) {
  CongruenceClosure cc(pres, options);
  SaturationResult out;
  out.capped = !cc.run();
  out.classes = cc.partition();
  out.trivial = cc.trivial();
  out.certificate = cc.certificate();
  return out;
}

bool is_trivial_detected(const SaturationResult& result) {
  const std::size_t elements = result.classes.size();
  if (elements == 0) return false;
  const Element e = static_cast<Element>(elements - 1);
  for (Element x = 0; x + 1 < elements; x += 2) {
    if (result.classes[x] != result.classes[e]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw AbelianizationOverflow("Smith normal form: entry overflow");
  return r;
}

std::int64_t sub_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw AbelianizationOverflow("Smith normal form: entry overflow");
  return r;
}

std::int64_t abs_checked(std::int64_t a) {
  if (a == INT64_MIN) throw AbelianizationOverflow("Smith normal form: entry overflow");
  return a < 0 ? -a : a;
}

}  // namespace

std::vector<std::int64_t> smith_diagonal(std::vector<std::vector<std::int64_t>> a, std::size_t cols) {
  std::erase_if(a, [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](std::int64_t v) { return v == 0; });
  });
  const std::size_t rows = a.size();
  std::vector<std::int64_t> diag;

  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    for (;;) {
      // Smallest nonzero magnitude in the trailing block.
      std::size_t pi = rows, pj = cols;
      std::int64_t best = 0;
      for (std::size_t i = k; i < rows && best != 1; ++i) {
        for (std::size_t j = k; j < cols; ++j) {
          std::int64_t v = a[i][j];
          if (v == 0) continue;
          v = abs_checked(v);
          if (best == 0 || v < best) {
            best = v;
            pi = i;
            pj = j;
            if (best == 1) break;
          }
        }
      }
      if (best == 0) goto done;
      std::swap(a[k], a[pi]);
      if (pj != k) {
        for (std::size_t i = k; i < rows; ++i) std::swap(a[i][k], a[i][pj]);
      }

      const std::int64_t p = a[k][k];
      bool residue = false;
      for (std::size_t i = k + 1; i < rows; ++i) {
        if (a[i][k] == 0) continue;
        const std::int64_t q = a[i][k] / p;
        if (q != 0) {
          for (std::size_t j = k; j < cols; ++j) {
            if (a[k][j] != 0) a[i][j] = sub_checked(a[i][j], mul_checked(q, a[k][j]));
          }
        }
        residue |= a[i][k] != 0;
      }
      for (std::size_t j = k + 1; j < cols; ++j) {
        if (a[k][j] == 0) continue;
        const std::int64_t q = a[k][j] / p;
        if (q != 0) {
          for (std::size_t i = k; i < rows; ++i) {
            if (a[i][k] != 0) a[i][j] = sub_checked(a[i][j], mul_checked(q, a[i][k]));
          }
        }
        residue |= a[k][j] != 0;
      }
      if (!residue) {
        diag.push_back(abs_checked(p));
        break;
      }
    }
  }
done:
  // Diagonal to divisibility chain: replace pairs by (gcd, lcm).
  for (std::size_t i = 0; i < diag.size(); ++i) {
    for (std::size_t j = i + 1; j < diag.size(); ++j) {
      const std::int64_t g = std::gcd(diag[i], diag[j]);
      const std::int64_t l = mul_checked(diag[i] / g, diag[j]);
      diag[i] = g;
      diag[j] = l;
    }
  }
  return diag;
}

Abelianization abelianization(const Presentation& pres) {
  const std::uint32_t n = pres.generators();
  std::vector<std::vector<std::int64_t>> rows;
  rows.reserve(pres.size());
  for (const Word& w : pres.relations()) {
    std::vector<std::int64_t> row(n, 0);
    for (Letter x : w) row[x.generator()] += x.inverted() ? -1 : 1;
    rows.push_back(std::move(row));
  }
  Abelianization out;
  const auto diag = smith_diagonal(std::move(rows), n);
  out.free_rank = n - static_cast<std::uint32_t>(diag.size());
  for (auto d : diag) {
    if (d > 1) out.torsion.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::trivial: return "trivial";
    case VerdictKind::nontrivial_abelianization: return "nontrivial";
    case VerdictKind::unknown: return "unknown";
  }
  return "?";
}

Verdict verdict(const Presentation& pres, SaturationOptions options) {
  Verdict v;
  CongruenceClosure cc(pres, options);
  v.capped = !cc.run();
  if (cc.trivial()) {
    v.kind = VerdictKind::trivial;
    v.certificate = cc.certificate();
    return v;
  }
  try {
    v.abelian = abelianization(pres);
    v.kind = v.abelian.trivial() ? VerdictKind::unknown : VerdictKind::nontrivial_abelianization;
  } catch (const AbelianizationOverflow&) {
    v.abelian_overflow = true;
    v.kind = VerdictKind::unknown;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Witness pipeline

std::string_view to_string(WitnessFailure f) {
  switch (f) {
    case WitnessFailure::none: return "none";
    case WitnessFailure::no_giant_component: return "NoGiantComponent";
    case WitnessFailure::no_inverse_pair: return "NoInversePair";
    case WitnessFailure::no_cube_relation: return "NoCubeRelation";
    case WitnessFailure::propagation_incomplete: return "PropagationIncomplete";
  }
  return "?";
}

namespace {

class WitnessCertificate {
 public:
  WitnessCertificate(const Presentation& pres) : pres_(pres), n_(pres.generators()) {
    cert_.generators = n_;
    cert_.relations = pres.size();
  }

  std::uint64_t relation(std::size_t index, unsigned rotation) {
    auto key = std::pair{index, rotation};
    if (auto it = relation_steps_.find(key); it != relation_steps_.end()) return it->second;
    auto id = push({Rule::relation_fact, {index, rotation}, relation_fact(pres_[index], rotation, n_)});
    relation_steps_.emplace(key, id);
    return id;
  }

  std::uint64_t fact(Rule rule, ProductFact f) { return push({rule, {}, f}); }

  // Congruence of two facts, then its inverted form.
  void merge(std::uint64_t f1, std::uint64_t f2) {
    const auto& a = std::get<ProductFact>(cert_.steps[f1].conclusion);
    const auto& b = std::get<ProductFact>(cert_.steps[f2].conclusion);
    Equality eq{a.product, b.product};
    auto id = push({Rule::congruence_merge, {f1, f2}, eq});
    push({Rule::involution, {id}, Equality{element_inverse(eq.a, n_), element_inverse(eq.b, n_)}});
  }

  Certificate take() { return std::move(cert_); }

 private:
  std::uint64_t push(Step s) {
    cert_.steps.push_back(std::move(s));
    return cert_.steps.size() - 1;
  }

  const Presentation& pres_;
  std::uint32_t n_;
  Certificate cert_;
  std::map<std::pair<std::size_t, unsigned>, std::uint64_t> relation_steps_;
};

}  // namespace

WitnessResult witness_pipeline(const SplitSample& split) {
  const Partition& part = split.partition;
  const std::uint32_t n = part.n;
  if (n < 4) throw std::invalid_argument("witness_pipeline needs n >= 4");
  for (const Word& w : split.r1) {
    if (stage_of(w, part) != 1) throw std::invalid_argument("R1 holds a stage-two word: " + to_string(w));
  }
  for (const Word& w : split.r2) {
    if (stage_of(w, part) != 2) throw std::invalid_argument("R2 holds a stage-one word: " + to_string(w));
  }
  const Presentation pres = split.presentation();
  const std::size_t r2_offset = split.r1.size();

  WitnessResult out;
  out.threshold = (52 * n + 99) / 100;

  // (1) the largest component of the derived intersection graph
  const DerivedGraph derived = derive_rig(split);
  const ComponentSummary comps = components(derived.graph);
  for (auto v : comps.largest_members) out.component.push_back(derived.vertex_letter[v]);
  if (comps.largest_size() < out.threshold) {
    out.failure = WitnessFailure::no_giant_component;
    return out;
  }
  std::vector<bool> in_l(2 * n, false);
  for (Letter x : out.component) in_l[x.code()] = true;

  // (2) a letter and its inverse inside L
  for (std::uint32_t g = 0; g < n && !out.pivot; ++g) {
    if (in_l[2 * g] && in_l[2 * g + 1]) out.pivot = Letter(g, false);
  }
  if (!out.pivot) {
    out.failure = WitnessFailure::no_inverse_pair;
    return out;
  }

  // (3) a stage-two relation with all three letters in L
  for (std::size_t j = 0; j < split.r2.size() && !out.cube_relation; ++j) {
    const Word& w = split.r2[j];
    if (in_l[w[0].code()] && in_l[w[1].code()] && in_l[w[2].code()]) out.cube_relation = r2_offset + j;
  }
  if (!out.cube_relation) {
    out.failure = WitnessFailure::no_cube_relation;
    return out;
  }

  // (4) every generator outside L meets a stage-two relation g s' s''
  struct Cover {
    std::size_t relation;
    unsigned rotation;
  };
  std::vector<std::optional<Cover>> cover(n);
  for (std::size_t j = 0; j < split.r2.size(); ++j) {
    const Word& w = split.r2[j];
    for (unsigned k = 0; k < 3; ++k) {
      const Letter x = w[k];
      if (!in_l[x.code()] && in_l[w[(k + 1) % 3].code()] && in_l[w[(k + 2) % 3].code()] &&
          !cover[x.generator()]) {
        cover[x.generator()] = Cover{r2_offset + j, k};
      }
    }
  }
  for (std::uint32_t g = 0; g < n; ++g) {
    if (!in_l[2 * g] && !in_l[2 * g + 1] && !cover[g]) out.uncovered.push_back(g);
  }
  if (!out.uncovered.empty()) {
    out.failure = WitnessFailure::propagation_incomplete;
    return out;
  }

  // (5) the deduction, in the order above
  WitnessCertificate cert(pres);
  const Element e = identity_element(n);

  // Letters of L equal one another along a spanning tree of shared features.
  struct Holder {
    std::uint32_t vertex;
    std::size_t relation;
    unsigned rotation;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Holder>> holders;  // (c, d) codes
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> features_of(derived.graph.vertex_count);
  std::vector<std::uint32_t> vertex_of(2 * n, UINT32_MAX);
  for (std::uint32_t v = 0; v < derived.vertex_letter.size(); ++v) vertex_of[derived.vertex_letter[v].code()] = v;
  for (std::size_t i = 0; i < split.r1.size(); ++i) {
    const Word& w = split.r1[i];
    unsigned j = 0;
    while (!part.contains(w[j])) ++j;
    const std::uint32_t v = vertex_of[w[j].code()];
    const std::pair key{w[(j + 1) % 3].code(), w[(j + 2) % 3].code()};
    auto& hs = holders[key];
    if (std::none_of(hs.begin(), hs.end(), [&](const Holder& h) { return h.vertex == v; })) {
      hs.push_back({v, i, j});
      features_of[v].push_back(key);
    }
  }
  std::vector<bool> reached(derived.graph.vertex_count, false);
  std::vector<std::uint32_t> frontier{comps.largest_members.front()};
  reached[frontier.front()] = true;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const std::uint32_t v = frontier[head];
    for (const auto& key : features_of[v]) {
      const auto& hs = holders[key];
      const Holder* mine = nullptr;
      for (const auto& h : hs) {
        if (h.vertex == v) mine = &h;
      }
      for (const auto& h : hs) {
        if (reached[h.vertex]) continue;
        reached[h.vertex] = true;
        frontier.push_back(h.vertex);
        cert.merge(cert.relation(mine->relation, mine->rotation), cert.relation(h.relation, h.rotation));
      }
    }
  }

  // s * s^-1 = e and the cube relation s s' s'' share a key class, so the
  // common value of L is the identity.
  const Element s = out.pivot->code();
  const auto unit = cert.fact(Rule::builtin_inverse, {s, s ^ 1u, e});
  cert.merge(unit, cert.relation(*out.cube_relation, 0));

  // Propagation: s' * s'' = g^-1 against e * e = e.
  const auto absorb = cert.fact(Rule::identity_absorption, {e, e, e});
  for (std::uint32_t g = 0; g < n; ++g) {
    if (!cover[g] || in_l[2 * g] || in_l[2 * g + 1]) continue;
    cert.merge(absorb, cert.relation(cover[g]->relation, cover[g]->rotation));
  }

  out.certificate = cert.take();
  out.success = true;
  return out;
}

FailureBound pipeline_failure_bound(std::uint32_t n, double p) {
  const double nn = n;
  const double pairs = 0.25 * nn * nn;
  return {0.52 * nn * std::exp(pairs * std::log1p(-p)),
          0.52 * nn * std::exp(-0.36 * std::sqrt(nn)),
          0.52 * nn * std::exp(-p * pairs)};
}

std::int64_t euler_characteristic(std::int64_t n, std::int64_t t) { return 1 - n + t; }

}  // namespace trigroup
