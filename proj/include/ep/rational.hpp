#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ep {

using Rational = mpq_class;
using RatVec = std::vector<Rational>;
using IntVec = std::vector<long>;

// Serialized form is "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& x) {
    Rational y = x;
    y.canonicalize();
    if (y.get_den() == 1) return y.get_num().get_str();
    return y.get_num().get_str() + "/" + y.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
    Rational r(s);
    r.canonicalize();
    return r;
}

// a/b in lowest terms; mpq_class(a, b) alone does not canonicalize.
inline Rational ratio(long a, long b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

inline long floor_long(const Rational& x) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    if (!q.fits_slong_p()) throw std::overflow_error("floor does not fit in long");
    return q.get_si();
}

inline long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Rational dot(const IntVec& a, const RatVec& x) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) s += Rational(a[i]) * x[i];
    return s;
}

inline long dot(const IntVec& a, const IntVec& b) {
    long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline IntVec negate(const IntVec& a) {
    IntVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline std::vector<std::string> to_strings(const RatVec& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(to_string(x));
    return out;
}

// Rank of a rational matrix given as rows, by Gaussian elimination.
inline int matrix_rank(std::vector<RatVec> rows) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows[0].size();
    int rank = 0;
    for (std::size_t c = 0; c < ncols && rank < static_cast<int>(rows.size()); ++c) {
        int piv = -1;
        for (std::size_t r = rank; r < rows.size(); ++r)
            if (rows[r][c] != 0) { piv = static_cast<int>(r); break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == rank || rows[r][c] == 0) continue;
            Rational f = rows[r][c] / rows[rank][c];
            for (std::size_t k = c; k < ncols; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

inline int matrix_rank(const std::vector<IntVec>& rows) {
    std::vector<RatVec> r;
    for (const auto& row : rows) {
        RatVec v;
        for (long x : row) v.emplace_back(x);
        r.push_back(std::move(v));
    }
    return matrix_rank(std::move(r));
}

// Solves M x = b for square invertible M.
inline RatVec solve(std::vector<RatVec> m, RatVec b) {
    const std::size_t n = m.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) throw std::domain_error("singular system");
        std::swap(m[c], m[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            b[r] -= f * b[c];
        }
    }
    RatVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
    return x;
}

inline long binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace ep
