#include "units.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace mems {

Coord parse_length_nm(std::string_view token) {
    if (token.empty()) throw ParseError("empty length value");
    long double scale_nm = 1e9L;  // plain numbers are meters
    std::string_view digits = token;
    char suffix = token.back();
    if (suffix == 'u' || suffix == 'n') {
        digits = token.substr(0, token.size() - 1);
        scale_nm = (suffix == 'u') ? 1e3L : 1.0L;
    }
    if (digits.empty()) throw ParseError("bad length value '" + std::string(token) + "'");
    double value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw ParseError("bad length value '" + std::string(token) + "'");
    long double nm = static_cast<long double>(value) * scale_nm;
    long double rounded = roundl(nm);
    if (fabsl(nm - rounded) > 1e-6L * (fabsl(nm) + 1.0L))
        throw ParseError("length '" + std::string(token) + "' is not on the nanometer grid");
    return static_cast<Coord>(rounded);
}

std::string format_um(Coord nm) {
    std::string out;
    unsigned long long mag;
    if (nm < 0) {
        out.push_back('-');
        mag = static_cast<unsigned long long>(-(nm + 1)) + 1ull;
    } else {
        mag = static_cast<unsigned long long>(nm);
    }
    unsigned long long whole = mag / 1000ull;
    unsigned long long frac = mag % 1000ull;
    out += std::to_string(whole);
    if (frac != 0) {
        char buf[4];
        buf[0] = static_cast<char>('0' + frac / 100);
        buf[1] = static_cast<char>('0' + (frac / 10) % 10);
        buf[2] = static_cast<char>('0' + frac % 10);
        buf[3] = '\0';
        int len = 3;
        while (len > 0 && buf[len - 1] == '0') --len;
        out.push_back('.');
        out.append(buf, buf + len);
    }
    out.push_back('u');
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(std::string_view token, const std::string& context) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad number '" + std::string(token) + "' for " + context);
    return value;
}

long long parse_int(std::string_view token, const std::string& context) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad integer '" + std::string(token) + "' for " + context);
    return value;
}

}  // namespace mems
