#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace control2 {

using Int = boost::multiprecision::cpp_int;

/// Base of every exception thrown by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition.
struct precondition_error : error {
    using error::error;
};

/// A configured size bound (coset count, iteration cap) was exceeded.
struct resource_limit_error : error {
    using error::error;
};

/// An internal identity that must hold by construction did not.
struct consistency_error : error {
    using error::error;
};

/// A 2-adic computation needs more precision than was supplied.
struct precision_error : error {
    using error::error;
};

inline std::int64_t pow2(int e) {
    if (e < 0 || e > 62) throw precondition_error("pow2: exponent out of range");
    return std::int64_t{1} << e;
}

/// Least non-negative residue of x modulo m > 0.
inline std::int64_t floor_mod(const Int& x, std::int64_t m) {
    Int r = x % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

inline std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

inline Int floor_mod(const Int& x, const Int& m) {
    Int r = x % m;
    if (r < 0) r += m;
    return r;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int abs(const Int& x) { return x < 0 ? Int(-x) : x; }

struct ExtGcd {
    Int g, x, y;  // g = a*x + b*y, g >= 0
};

inline ExtGcd ext_gcd(Int a, Int b) {
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = floor_div(a, b);
        Int t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) return {-a, -x0, -y0};
    return {a, x0, y0};
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline Int inverse_mod(const Int& a, const Int& m) {
    ExtGcd e = ext_gcd(floor_mod(a, m), m);
    if (e.g != 1) throw precondition_error("inverse_mod: not invertible");
    return floor_mod(e.x, m);
}

inline std::string to_string(const Int& x) { return x.str(); }

}  // namespace control2
