#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fockdom/types.hpp"

namespace fockdom {

/// A word g_{i_1}...g_{i_k} in the unital free semigroup on n generators.
/// Letters are 1-based; the empty word is the identity g_0.
class Word {
public:
    Word() = default;
    Word(int n, std::vector<int> letters);

    static Word identity(int n) { return Word(n, {}); }
    static Word generator(int n, int i) { return Word(n, {i}); }

    int n() const { return n_; }
    std::size_t length() const { return letters_.size(); }
    bool is_identity() const { return letters_.empty(); }
    const std::vector<int>& letters() const { return letters_; }

    /// Concatenation: (*this) followed by `other`.
    Word operator*(const Word& other) const;
    bool operator==(const Word& other) const = default;

    /// Dot-separated 1-based letters ("1.2.2"); identity is "".
    std::string to_string() const;
    static Word parse(int n, std::string_view text);

private:
    int n_ = 1;
    std::vector<int> letters_;
};

/// All factorizations w = prefix * suffix, in increasing prefix length.
std::vector<std::pair<Word, Word>> decompositions(const Word& w);

/// Graded-lexicographic enumeration of all words of length <= degree.
///
/// Index layout: level k occupies [offset(k), offset(k+1)), offset(k) =
/// (n^k - 1)/(n - 1) for n >= 2 and k for n = 1. Within a level, words are
/// ordered lexicographically with letters compared as integers, so the rank of
/// g_{i_1}...g_{i_k} is the base-n number (i_1 - 1)...(i_k - 1). Because the
/// offsets do not depend on the degree, a table of smaller degree is a prefix
/// of one of larger degree.
class WordTable {
public:
    WordTable(int n, int degree, std::size_t cap = kDefaultDimCap);

    int n() const { return n_; }
    int degree() const { return degree_; }
    std::size_t size() const { return size_; }

    std::size_t level_offset(int k) const { return offsets_.at(static_cast<std::size_t>(k)); }
    std::size_t level_size(int k) const {
        return offsets_.at(static_cast<std::size_t>(k) + 1) - offsets_.at(static_cast<std::size_t>(k));
    }

    std::size_t index_of(const Word& w) const;
    Word word_at(std::size_t index) const;

    int length(std::size_t index) const { return length_[index]; }
    /// First letter (1-based) of a non-identity word, 0 for the identity.
    int first_letter(std::size_t index) const { return first_[index]; }
    /// Index of the word with its first letter removed (identity maps to itself).
    std::size_t tail(std::size_t index) const { return tail_[index]; }
    /// Index of the word with its last letter removed (identity maps to itself).
    std::size_t head(std::size_t index) const { return head_[index]; }
    /// Index of g_i * w, or npos when the result is longer than the degree.
    std::size_t prepend(int i, std::size_t index) const;
    /// Index of w * g_i, or npos when the result is longer than the degree.
    std::size_t append(std::size_t index, int i) const;

    /// Index of the length-j prefix of the word at `index` (j <= its length).
    std::size_t prefix(std::size_t index, int j) const;
    /// Index of the suffix left after removing the length-j prefix.
    std::size_t suffix(std::size_t index, int j) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Number of words of length <= degree, or npos when it would exceed `cap`.
    static std::size_t count_words(int n, int degree, std::size_t cap);

private:
    int n_;
    int degree_;
    std::size_t size_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> pow_;
    std::vector<int> length_;
    std::vector<int> first_;
    std::vector<std::size_t> tail_;
    std::vector<std::size_t> head_;
};

using WordTablePtr = std::shared_ptr<const WordTable>;

inline WordTablePtr make_table(int n, int degree, std::size_t cap = kDefaultDimCap) {
    return std::make_shared<const WordTable>(n, degree, cap);
}

} // namespace fockdom
