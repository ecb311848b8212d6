#include "trigroup/words.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "checked.hpp"

namespace trigroup {

std::string to_string(Letter x) {
  return (x.inverted() ? "X" : "x") + std::to_string(x.generator());
}

Letter parse_letter(std::string_view token) {
  if (token.size() < 2 || (token[0] != 'x' && token[0] != 'X')) {
    throw std::invalid_argument("bad letter token '" + std::string(token) + "'");
  }
  std::uint32_t g = 0;
  auto digits = token.substr(1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), g);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("bad letter token '" + std::string(token) + "'");
  }
  return Letter(g, token[0] == 'X');
}

std::uint32_t Word::generator_bound() const {
  std::uint32_t bound = 0;
  for (Letter x : letters_) bound = std::max(bound, x.generator() + 1);
  return bound;
}

std::string to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += to_string(w[i]);
  }
  return out;
}

Word parse_word(std::string_view text) {
  std::vector<Letter> letters;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) letters.push_back(parse_letter(token));
  return Word(std::move(letters));
}

Word rotate(const Word& w, std::size_t shift) {
  std::vector<Letter> out(w.begin(), w.end());
  if (!out.empty()) std::rotate(out.begin(), out.begin() + shift % out.size(), out.end());
  return Word(std::move(out));
}

Word inverse(const Word& w) {
  std::vector<Letter> out;
  out.reserve(w.size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    out.push_back(inverse(*it));
  }
  return Word(std::move(out));
}

bool is_cyclically_reduced(const Word& w) {
  if (w.empty()) throw std::invalid_argument("empty word");
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i + 1] == inverse(w[i])) return false;
  }
  return w[0] != inverse(w[w.size() - 1]);
}

std::uint64_t count_cyclically_reduced(std::uint32_t n, std::uint32_t length) {
  if (n == 0 || length == 0) {
    throw std::invalid_argument("count_cyclically_reduced needs n >= 1 and length >= 1");
  }
  // Every first letter is equivalent under an alphabet automorphism, so fix
  // the first letter to code 0 and track the current letter.
  const std::uint32_t k = 2 * n;
  std::vector<std::uint64_t> cur(k, 0), next(k);
  cur[0] = 1;
  for (std::uint32_t i = 1; i < length; ++i) {
    std::uint64_t total = 0;
    for (auto v : cur) total = detail::checked_add(total, v);
    for (std::uint32_t c = 0; c < k; ++c) next[c] = total - cur[c ^ 1u];
    std::swap(cur, next);
  }
  std::uint64_t closing = 0;
  for (std::uint32_t c = 0; c < k; ++c) {
    if (c != 1u) closing = detail::checked_add(closing, cur[c]);
  }
  return detail::checked_mul(closing, k);
}

std::uint64_t count_triangular(std::uint32_t n) {
  using detail::checked_add;
  using detail::checked_mul;
  if (n == 0) throw std::invalid_argument("count_triangular needs n >= 1");
  const std::uint64_t nn = n;
  // 4n^2 - 6n + 3 is positive for every n >= 1.
  std::uint64_t quad = checked_add(checked_mul(4, checked_mul(nn, nn)), 3) - 6 * nn;
  return checked_mul(checked_mul(2, nn), quad);
}

WordIndex::WordIndex(std::uint32_t n, std::uint32_t length) : n_(n), length_(length) {
  using detail::checked_add;
  using detail::checked_mul;
  if (n == 0 || length == 0) throw std::invalid_argument("WordIndex needs n >= 1 and length >= 1");
  table_.assign(3 * length, 0);
  table_[kSame] = 1;
  table_[kInverse] = 0;
  table_[kOther] = 1;
  const std::uint64_t others = 2ull * n - 2;
  for (std::uint32_t r = 1; r < length; ++r) {
    const std::uint64_t* prev = &table_[3 * (r - 1)];
    std::uint64_t* row = &table_[3 * r];
    row[kSame] = checked_add(prev[kSame], checked_mul(others, prev[kOther]));
    row[kInverse] = checked_add(prev[kInverse], checked_mul(others, prev[kOther]));
    row[kOther] = n >= 2 ? checked_add(checked_add(prev[kSame], prev[kInverse]),
                                       checked_mul(others - 1, prev[kOther]))
                         : 0;
  }
  count_ = checked_mul(2ull * n, completions(length - 1, kSame));
}

WordIndex::State WordIndex::state_of(std::uint32_t code, std::uint32_t first) const {
  if (code == first) return kSame;
  if (code == (first ^ 1u)) return kInverse;
  return kOther;
}

// Total completion mass of the admissible letters with code < `code` at
// `position`, given the first letter and the previous letter.
std::uint64_t WordIndex::mass_below(std::uint32_t code, std::uint32_t position,
                                    std::uint32_t first, std::uint32_t prev) const {
  if (position == 0) return code * completions(length_ - 1, kSame);
  const std::uint32_t remaining = length_ - 1 - position;
  const std::uint32_t banned = prev ^ 1u;
  const std::uint32_t inv_first = first ^ 1u;

  std::uint32_t special_below = 0;
  std::uint64_t mass = 0;
  if (first < code) {
    ++special_below;
    if (first != banned) mass += completions(remaining, kSame);
  }
  if (inv_first < code) {
    ++special_below;
    if (inv_first != banned) mass += completions(remaining, kInverse);
  }
  if (banned < code && banned != first && banned != inv_first) ++special_below;
  mass += std::uint64_t(code - special_below) * completions(remaining, kOther);
  return mass;
}

std::uint64_t WordIndex::rank(const Word& w) const {
  if (w.size() != length_) throw std::invalid_argument("rank: word has wrong length");
  if (w.generator_bound() > n_) throw std::invalid_argument("rank: letter outside alphabet");
  if (!is_cyclically_reduced(w)) throw std::invalid_argument("rank: word is not cyclically reduced");
  const std::uint32_t first = w[0].code();
  std::uint64_t r = 0;
  for (std::uint32_t i = 0; i < length_; ++i) {
    r += mass_below(w[i].code(), i, first, i ? w[i - 1].code() : 0);
  }
  return r;
}

Word WordIndex::unrank(std::uint64_t k) const {
  if (k >= count_) throw std::out_of_range("unrank: index out of range");
  std::vector<Letter> letters;
  letters.reserve(length_);
  const std::uint64_t block = completions(length_ - 1, kSame);
  const auto first = static_cast<std::uint32_t>(k / block);
  k %= block;
  letters.push_back(Letter::from_code(first));
  for (std::uint32_t i = 1; i < length_; ++i) {
    const std::uint32_t prev = letters.back().code();
    // Smallest code c whose cumulative mass through c exceeds k.
    std::uint32_t lo = 0, hi = 2 * n_ - 1;
    while (lo < hi) {
      std::uint32_t mid = lo + (hi - lo) / 2;
      if (mass_below(mid + 1, i, first, prev) > k) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    k -= mass_below(lo, i, first, prev);
    letters.push_back(Letter::from_code(lo));
  }
  return Word(std::move(letters));
}

std::uint64_t rank(const Word& w, std::uint32_t n) {
  return WordIndex(n, static_cast<std::uint32_t>(w.size())).rank(w);
}

Word unrank(std::uint32_t n, std::uint32_t length, std::uint64_t k) {
  return WordIndex(n, length).unrank(k);
}

}  // namespace trigroup
