#pragma once

#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trigroup {

/// A generator or its formal inverse. Encoded densely as
/// `code = 2 * generator + inverted`, so inversion flips the low bit and the
/// alphabet of n generators occupies codes [0, 2n).
class Letter {
 public:
  constexpr Letter() = default;
  constexpr Letter(std::uint32_t generator, bool inverted)
      : code_(2 * generator + (inverted ? 1u : 0u)) {}

  static constexpr Letter from_code(std::uint32_t code) {
    Letter l;
    l.code_ = code;
    return l;
  }

  constexpr std::uint32_t code() const { return code_; }
  constexpr std::uint32_t generator() const { return code_ >> 1; }
  constexpr bool inverted() const { return (code_ & 1u) != 0; }

  friend constexpr auto operator<=>(Letter, Letter) = default;

 private:
  std::uint32_t code_ = 0;
};

constexpr Letter inverse(Letter x) { return Letter::from_code(x.code() ^ 1u); }

/// Text token for a letter: "x3" for generator 3, "X3" for its inverse.
std::string to_string(Letter x);
Letter parse_letter(std::string_view token);

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  std::span<const Letter> letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  /// Largest generator index appearing in the word, plus one.
  std::uint32_t generator_bound() const;

  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// Space-separated tokens, e.g. "x0 X1 x2".
std::string to_string(const Word& w);
Word parse_word(std::string_view text);

/// The cyclic rotation starting at position `shift`.
Word rotate(const Word& w, std::size_t shift);

/// Formal inverse: reversed order with every letter inverted.
Word inverse(const Word& w);

struct Alphabet {
  std::uint32_t n = 1;

  std::uint32_t size() const { return 2 * n; }
  bool contains(Letter x) const { return x.generator() < n; }
};

/// Throws std::invalid_argument on an empty word.
bool is_cyclically_reduced(const Word& w);

/// Exact number of cyclically reduced words of length `length` over `n`
/// generators. Throws std::overflow_error when the count exceeds 64 bits.
std::uint64_t count_cyclically_reduced(std::uint32_t n, std::uint32_t length);

/// Closed form 2n(4n^2 - 6n + 3) for length three, checked.
std::uint64_t count_triangular(std::uint32_t n);

/// Lexicographic (by letter code) ranking of the cyclically reduced words of a
/// fixed length. Construction precomputes the completion counts; rank and
/// unrank run in O(length * log n).
class WordIndex {
 public:
  WordIndex(std::uint32_t n, std::uint32_t length);

  std::uint32_t generators() const { return n_; }
  std::uint32_t length() const { return length_; }
  std::uint64_t count() const { return count_; }

  /// Throws std::invalid_argument if `w` has the wrong length, uses letters
  /// outside the alphabet, or is not cyclically reduced.
  std::uint64_t rank(const Word& w) const;
  /// Throws std::out_of_range unless k < count().
  Word unrank(std::uint64_t k) const;

  template <class Rng>
  Word sample(Rng& rng) const {
    std::uniform_int_distribution<std::uint64_t> pick(0, count_ - 1);
    return unrank(pick(rng));
  }

 private:
  enum State : int { kSame = 0, kInverse = 1, kOther = 2 };

  std::uint64_t completions(std::uint32_t remaining, State s) const {
    return table_[3 * remaining + s];
  }
  State state_of(std::uint32_t code, std::uint32_t first) const;
  std::uint64_t mass_below(std::uint32_t code, std::uint32_t position,
                           std::uint32_t first, std::uint32_t prev) const;

  std::uint32_t n_;
  std::uint32_t length_;
  std::uint64_t count_ = 0;
  // table_[3 * r + s]: ways to append r more letters after a letter in
  // state s (relative to the first letter) so the word ends cyclically
  // reduced.
  std::vector<std::uint64_t> table_;
};

std::uint64_t rank(const Word& w, std::uint32_t n);
Word unrank(std::uint32_t n, std::uint32_t length, std::uint64_t k);

template <class Rng>
Word sample_word(std::uint32_t n, std::uint32_t length, Rng& rng) {
  return WordIndex(n, length).sample(rng);
}

}  // namespace trigroup
