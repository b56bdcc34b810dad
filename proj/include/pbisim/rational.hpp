#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>

namespace pbisim {

// Exact rational arithmetic. mpq_class keeps results of arithmetic in
// canonical form (lowest terms, positive denominator); raw (num, den)
// construction does not, so all construction goes through make_rat /
// rat_from_string.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(const mpz_class& num, const mpz_class& den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p/q", an integer "p", or a finite decimal like "0.25" (converted
// exactly). Throws std::invalid_argument on anything else.
Rat rat_from_string(const std::string& text);

// "p/q", or just "p" when the denominator is 1.
std::string rat_to_string(const Rat& q);

std::size_t rat_hash(const Rat& q) noexcept;

struct RatHash {
    std::size_t operator()(const Rat& q) const noexcept { return rat_hash(q); }
};

}  // namespace pbisim
