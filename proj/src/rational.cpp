#include "pbisim/rational.hpp"

#include <stdexcept>

namespace pbisim {

namespace {

bool is_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
    std::string s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    Rat value;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!is_digits(num) || !is_digits(den))
            throw std::invalid_argument("malformed fraction '" + text + "'");
        mpz_class n(num), d(den);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        value = make_rat(n, d);
    } else if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!is_digits(whole) || !is_digits(frac))
            throw std::invalid_argument("malformed decimal '" + text + "'");
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        mpz_class n = mpz_class(whole) * scale + (frac.empty() ? mpz_class(0) : mpz_class(frac));
        value = make_rat(n, scale);
    } else {
        if (!is_digits(s)) throw std::invalid_argument("malformed number '" + text + "'");
        value = Rat(mpz_class(s));
    }
    if (negative) value = -value;
    return value;
}

std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::size_t rat_hash(const Rat& q) noexcept {
    // Fold both mpz values through a fixed 64-bit modulus.
    auto fold = [](const mpz_class& z) -> std::size_t {
        mpz_class m = z % mpz_class("18446744073709551557");
        std::size_t h = 0;
        mpz_class a = abs(m);
        while (a != 0) {
            h = h * 1000003u + mpz_class(a % 4294967296L).get_ui();
            a /= 4294967296L;
        }
        return z < 0 ? ~h : h;
    };
    std::size_t h1 = fold(q.get_num());
    std::size_t h2 = fold(q.get_den());
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

}  // namespace pbisim
