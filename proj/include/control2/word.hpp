#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace control2 {

struct Letter {
    std::uint32_t gen;
    std::int32_t exp;
    bool operator==(const Letter&) const = default;
};

/// A word over a declared alphabet, kept reduced on every append: exponents
/// are nonzero and adjacent letters have distinct generators. When built via
/// append_torsion, exponents of generators of finite order are also reduced
/// into a symmetric range (sigma^2 = tau^3 = 1 in the projective group).
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Letter> ls) {
        for (const Letter& l : ls) append(l.gen, l.exp);
    }

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    /// Free-group append.
    void append(std::uint32_t gen, std::int32_t exp) {
        if (exp == 0) return;
        if (!letters_.empty() && letters_.back().gen == gen) {
            letters_.back().exp += exp;
            if (letters_.back().exp == 0) letters_.pop_back();
            return;
        }
        letters_.push_back({gen, exp});
    }

    /// Append in a free product of cyclic groups; order[gen] is the order of
    /// generator gen (0 for infinite order).
    void append_torsion(std::uint32_t gen, std::int32_t exp, const std::vector<std::int32_t>& order) {
        const std::int32_t n = order.at(gen);
        if (!letters_.empty() && letters_.back().gen == gen) {
            exp += letters_.back().exp;
            letters_.pop_back();
        }
        if (n > 0) {
            exp %= n;
            if (exp < 0) exp += n;
            if (2 * exp > n) exp -= n;
        }
        if (exp != 0) letters_.push_back({gen, exp});
    }

    void append(const Word& w) {
        for (const Letter& l : w.letters_) append(l.gen, l.exp);
    }

    Word inverse() const {
        Word out;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back({it->gen, -it->exp});
        return out;
    }

    Word operator*(const Word& o) const {
        Word out = *this;
        out.append(o);
        return out;
    }

    /// Exponent-sum vector of length `rank`.
    std::vector<std::int64_t> exponent_sums(std::size_t rank) const {
        std::vector<std::int64_t> v(rank, 0);
        for (const Letter& l : letters_) v.at(l.gen) += l.exp;
        return v;
    }

    std::string str() const {
        std::string s;
        for (const Letter& l : letters_) {
            if (!s.empty()) s += ' ';
            s += "g" + std::to_string(l.gen) + "^" + std::to_string(l.exp);
        }
        return s.empty() ? "1" : s;
    }

    bool operator==(const Word&) const = default;

private:
    std::vector<Letter> letters_;
};

}  // namespace control2
