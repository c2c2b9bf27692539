#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace normclust {

/// Exact rational number. All solver arithmetic is exact; floating point
/// appears only in reporting (e.g. the real root of an Lp power sum).
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_u64(std::uint64_t v) {
    Rat r;
    mpz_import(r.get_num().get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return r;
}

/// Parses "7", "-3/4" or "12/8" (canonicalized).
inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    if (r.get_den() < 0) throw std::invalid_argument("negative denominator: " + s);
    return r;
}

/// "num/den", or just "num" for integers.
inline std::string rat_to_string(const Rat& r) {
    return r.get_str();
}

inline bool rat_is_integer(const Rat& r) { return r.get_den() == 1; }

inline mpz_class rat_floor(const Rat& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline mpz_class rat_ceil(const Rat& r) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// r^e for integer e >= 0.
inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat out;
    mpz_pow_ui(out.get_num().get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(out.get_den().get_mpz_t(), base.get_den().get_mpz_t(), e);
    out.canonicalize();
    return out;
}

inline double rat_to_double(const Rat& r) { return r.get_d(); }

}  // namespace normclust
