#include "fraccrit/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace fraccrit {

std::string to_string(const Rational& r) {
    // mpq_class(p, q) from integers skips canonicalization; arithmetic results never need it.
    Rational c = r;
    c.canonicalize();
    return c.get_str();
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    size_t end = s.size();
    while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    s = s.substr(start, end - start);
    if (s.empty()) throw std::invalid_argument("empty rational");
    size_t slash = s.find('/');
    auto digits_ok = [](const std::string& part, bool allow_sign) {
        size_t i = 0;
        if (allow_sign && i < part.size() && (part[i] == '-' || part[i] == '+')) ++i;
        if (i == part.size()) return false;
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
        return true;
    };
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!digits_ok(num, true) || !digits_ok(den, false))
        throw std::invalid_argument("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    Integer n(num), d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string join(const std::vector<Rational>& values, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        out += to_string(values[i]);
    }
    return out;
}

}  // namespace fraccrit
