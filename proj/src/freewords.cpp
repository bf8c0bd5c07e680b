#include "fockdom/freewords.hpp"

#include <charconv>
#include <sstream>

namespace fockdom {

Word::Word(int n, std::vector<int> letters) : n_(n), letters_(std::move(letters)) {
    if (n < 1) {
        throw Error("word: generator count must be >= 1");
    }
    for (int l : letters_) {
        if (l < 1 || l > n) {
            throw Error("word: letter " + std::to_string(l) + " outside [1, " + std::to_string(n) + "]");
        }
    }
}

Word Word::operator*(const Word& other) const {
    if (other.n_ != n_) {
        throw Error("word: concatenation of words over different generator counts");
    }
    std::vector<int> out = letters_;
    out.insert(out.end(), other.letters_.begin(), other.letters_.end());
    return Word(n_, std::move(out));
}

std::string Word::to_string() const {
    std::string s;
    for (std::size_t j = 0; j < letters_.size(); ++j) {
        if (j) s += '.';
        s += std::to_string(letters_[j]);
    }
    return s;
}

Word Word::parse(int n, std::string_view text) {
    std::vector<int> letters;
    if (text.empty()) {
        return Word(n, {});
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        if (dot == std::string_view::npos) dot = text.size();
        std::string_view tok = text.substr(pos, dot - pos);
        int value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
            throw Error("word: cannot parse \"" + std::string(text) + "\"");
        }
        letters.push_back(value);
        pos = dot + 1;
    }
    return Word(n, std::move(letters));
}

std::vector<std::pair<Word, Word>> decompositions(const Word& w) {
    std::vector<std::pair<Word, Word>> out;
    const auto& l = w.letters();
    out.reserve(l.size() + 1);
    for (std::size_t k = 0; k <= l.size(); ++k) {
        out.emplace_back(Word(w.n(), {l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k)}),
                         Word(w.n(), {l.begin() + static_cast<std::ptrdiff_t>(k), l.end()}));
    }
    return out;
}

std::size_t WordTable::count_words(int n, int degree, std::size_t cap) {
    std::size_t total = 0;
    std::size_t level = 1;
    for (int k = 0; k <= degree; ++k) {
        total += level;
        if (total > cap) return npos;
        if (k < degree) {
            if (level > cap / static_cast<std::size_t>(n)) return npos;
            level *= static_cast<std::size_t>(n);
        }
    }
    return total;
}

WordTable::WordTable(int n, int degree, std::size_t cap) : n_(n), degree_(degree) {
    if (n < 1) throw Error("word table: generator count must be >= 1");
    if (degree < 0) throw Error("word table: degree must be >= 0");
    size_ = count_words(n, degree, cap);
    if (size_ == npos) {
        throw Error("word table: dimension cap exceeded (n=" + std::to_string(n) +
                    ", degree=" + std::to_string(degree) + ", cap=" + std::to_string(cap) + ")");
    }
    offsets_.resize(static_cast<std::size_t>(degree) + 2);
    pow_.resize(static_cast<std::size_t>(degree) + 1);
    offsets_[0] = 0;
    std::size_t level = 1;
    for (int k = 0; k <= degree; ++k) {
        pow_[static_cast<std::size_t>(k)] = level;
        offsets_[static_cast<std::size_t>(k) + 1] = offsets_[static_cast<std::size_t>(k)] + level;
        level *= static_cast<std::size_t>(n);
    }

    length_.resize(size_);
    first_.resize(size_);
    tail_.resize(size_);
    head_.resize(size_);
    for (int k = 0; k <= degree; ++k) {
        const std::size_t off = offsets_[static_cast<std::size_t>(k)];
        const std::size_t cnt = pow_[static_cast<std::size_t>(k)];
        for (std::size_t r = 0; r < cnt; ++r) {
            const std::size_t idx = off + r;
            length_[idx] = k;
            if (k == 0) {
                first_[idx] = 0;
                tail_[idx] = 0;
                head_[idx] = 0;
                continue;
            }
            const std::size_t sub = pow_[static_cast<std::size_t>(k) - 1];
            first_[idx] = static_cast<int>(r / sub) + 1;
            tail_[idx] = offsets_[static_cast<std::size_t>(k) - 1] + r % sub;
            head_[idx] = offsets_[static_cast<std::size_t>(k) - 1] + r / static_cast<std::size_t>(n);
        }
    }
}

std::size_t WordTable::index_of(const Word& w) const {
    if (w.n() != n_) throw Error("word table: generator count mismatch");
    if (w.length() > static_cast<std::size_t>(degree_)) throw Error("degree exceeded");
    std::size_t rank = 0;
    for (int l : w.letters()) {
        rank = rank * static_cast<std::size_t>(n_) + static_cast<std::size_t>(l - 1);
    }
    return offsets_[w.length()] + rank;
}

Word WordTable::word_at(std::size_t index) const {
    if (index >= size_) throw Error("word table: index out of range");
    const int k = length_[index];
    std::size_t rank = index - offsets_[static_cast<std::size_t>(k)];
    std::vector<int> letters(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        letters[static_cast<std::size_t>(j)] = static_cast<int>(rank % static_cast<std::size_t>(n_)) + 1;
        rank /= static_cast<std::size_t>(n_);
    }
    return Word(n_, std::move(letters));
}

std::size_t WordTable::prepend(int i, std::size_t index) const {
    const int k = length_[index];
    if (k >= degree_) return npos;
    const std::size_t rank = index - offsets_[static_cast<std::size_t>(k)];
    return offsets_[static_cast<std::size_t>(k) + 1] +
           static_cast<std::size_t>(i - 1) * pow_[static_cast<std::size_t>(k)] + rank;
}

std::size_t WordTable::append(std::size_t index, int i) const {
    const int k = length_[index];
    if (k >= degree_) return npos;
    const std::size_t rank = index - offsets_[static_cast<std::size_t>(k)];
    return offsets_[static_cast<std::size_t>(k) + 1] + rank * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(i - 1);
}

std::size_t WordTable::prefix(std::size_t index, int j) const {
    const int k = length_[index];
    const std::size_t rank = index - offsets_[static_cast<std::size_t>(k)];
    return offsets_[static_cast<std::size_t>(j)] + rank / pow_[static_cast<std::size_t>(k - j)];
}

std::size_t WordTable::suffix(std::size_t index, int j) const {
    const int k = length_[index];
    const std::size_t rank = index - offsets_[static_cast<std::size_t>(k)];
    return offsets_[static_cast<std::size_t>(k - j)] + rank % pow_[static_cast<std::size_t>(k - j)];
}

} // namespace fockdom
