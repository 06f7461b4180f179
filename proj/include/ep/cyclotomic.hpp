#pragma once

// Exact arithmetic in Q(zeta_n), in the power basis 1, z, ..., z^(phi-1)
// reduced modulo the n-th cyclotomic polynomial.

#include "ep/rational.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace ep {

inline std::vector<long> cyclotomic_polynomial(int n) {
    static std::map<int, std::vector<long>> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    if (n < 1) throw std::invalid_argument("cyclotomic_polynomial: n must be positive");
    // x^n - 1 divided by every Phi_d with d | n, d < n
    std::vector<long> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d) continue;
        auto den = cyclotomic_polynomial(d);
        const int dn = static_cast<int>(num.size()) - 1, dd = static_cast<int>(den.size()) - 1;
        std::vector<long> quo(dn - dd + 1, 0);
        for (int i = dn; i >= dd; --i) {
            long c = num[i];
            quo[i - dd] = c;
            if (c)
                for (int j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
        }
        num = quo;
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, num);
    return num;
}

inline int euler_phi(int n) {
    int r = n;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    if (n > 1) r -= r / n;
    return r;
}

class CyclotomicField {
public:
    static std::shared_ptr<const CyclotomicField> get(int n) {
        static std::map<int, std::shared_ptr<const CyclotomicField>> fields;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        auto it = fields.find(n);
        if (it != fields.end()) return it->second;
        auto f = std::shared_ptr<const CyclotomicField>(new CyclotomicField(n));
        fields.emplace(n, f);
        return f;
    }

    int conductor() const { return n_; }
    int degree() const { return phi_; }
    // z^k for 0 <= k < n as a sparse combination of basis powers.
    const std::vector<std::pair<int, long>>& power(int k) const { return powers_[((k % n_) + n_) % n_]; }

private:
    explicit CyclotomicField(int n) : n_(n) {
        auto poly = cyclotomic_polynomial(n);
        phi_ = static_cast<int>(poly.size()) - 1;
        std::vector<long> cur(phi_, 0);
        cur[0] = 1;
        for (int k = 0; k < n; ++k) {
            std::vector<std::pair<int, long>> sparse;
            for (int i = 0; i < phi_; ++i)
                if (cur[i]) sparse.emplace_back(i, cur[i]);
            powers_.push_back(sparse);
            // multiply by z and reduce with the monic modulus
            long top = cur[phi_ - 1];
            for (int i = phi_ - 1; i > 0; --i) cur[i] = cur[i - 1];
            cur[0] = 0;
            if (top)
                for (int i = 0; i < phi_; ++i) cur[i] -= top * poly[i];
        }
    }

    int n_;
    int phi_ = 1;
    std::vector<std::vector<std::pair<int, long>>> powers_;
};

class Cyclotomic {
public:
    Cyclotomic() : Cyclotomic(1) {}
    explicit Cyclotomic(int n) : field_(CyclotomicField::get(n).get()), c_(field_->degree()) {}
    Cyclotomic(int n, const Rational& r) : Cyclotomic(n) { c_[0] = r; }

    static Cyclotomic zero(int n) { return Cyclotomic(n); }
    static Cyclotomic one(int n) { return Cyclotomic(n, 1); }
    static Cyclotomic root_of_unity(int n, long k) {
        Cyclotomic x(n);
        for (auto [i, v] : x.field_->power(static_cast<int>(((k % n) + n) % n))) x.c_[i] = v;
        return x;
    }

    int conductor() const { return field_->conductor(); }
    const std::vector<Rational>& coefficients() const { return c_; }
    std::vector<Rational>& coefficients() { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }
    const Rational& rational_part() const { return c_[0]; }
    Rational rational_value() const {
        if (!is_rational()) throw std::domain_error("cyclotomic value is not rational");
        return c_[0];
    }

    Cyclotomic& operator+=(const Cyclotomic& o) {
        same_field(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (o.c_[i] != 0) c_[i] += o.c_[i];
        return *this;
    }
    Cyclotomic& operator-=(const Cyclotomic& o) {
        same_field(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (o.c_[i] != 0) c_[i] -= o.c_[i];
        return *this;
    }
    Cyclotomic& operator*=(const Rational& r) {
        for (auto& x : c_)
            if (x != 0) x *= r;
        return *this;
    }
    friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
    friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
    friend Cyclotomic operator*(Cyclotomic a, const Rational& r) { return a *= r; }
    Cyclotomic operator-() const {
        Cyclotomic r(*this);
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
        Cyclotomic r(a.conductor());
        add_product(r, a, b);
        return r;
    }
    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

    // acc += a * b
    static void add_product(Cyclotomic& acc, const Cyclotomic& a, const Cyclotomic& b) {
        acc.same_field(a);
        acc.same_field(b);
        const int phi = acc.field_->degree();
        if (a.is_rational() && b.is_rational()) {
            if (a.c_[0] != 0 && b.c_[0] != 0) acc.c_[0] += a.c_[0] * b.c_[0];
            return;
        }
        thread_local std::vector<Rational> prod;
        prod.assign(2 * phi - 1, Rational(0));
        bool high = false;
        for (int i = 0; i < phi; ++i) {
            if (a.c_[i] == 0) continue;
            for (int j = 0; j < phi; ++j) {
                if (b.c_[j] == 0) continue;
                prod[i + j] += a.c_[i] * b.c_[j];
                high |= (i + j >= phi);
            }
        }
        for (int k = 0; k < phi; ++k)
            if (prod[k] != 0) acc.c_[k] += prod[k];
        if (!high) return;
        for (int k = phi; k < 2 * phi - 1; ++k) {
            if (prod[k] == 0) continue;
            for (auto [i, v] : acc.field_->power(k)) acc.c_[i] += prod[k] * v;
        }
    }

    bool operator==(const Cyclotomic& o) const { return conductor() == o.conductor() && c_ == o.c_; }
    bool operator!=(const Cyclotomic& o) const { return !(*this == o); }

    // Image under z -> z^k, for k coprime to the conductor.
    Cyclotomic galois(long k) const {
        const int n = conductor();
        if (std::gcd(((k % n) + n) % n, (long)n) != 1 && n > 1)
            throw std::invalid_argument("galois: exponent not coprime to conductor");
        Cyclotomic r(n);
        for (int i = 0; i < static_cast<int>(c_.size()); ++i) {
            if (c_[i] == 0) continue;
            for (auto [j, v] : field_->power(static_cast<int>((((long)i * k) % n + n) % n))) r.c_[j] += c_[i] * v;
        }
        return r;
    }
    Cyclotomic conj() const { return galois(-1); }

    // Image in Q(zeta_m) for a multiple m of the conductor.
    Cyclotomic embed(int m) const {
        const int n = conductor();
        if (m % n) throw std::invalid_argument("embed: target conductor is not a multiple");
        if (m == n) return *this;
        Cyclotomic r(m);
        const int step = m / n;
        for (int i = 0; i < static_cast<int>(c_.size()); ++i) {
            if (c_[i] == 0) continue;
            for (auto [j, v] : r.field_->power(i * step)) r.c_[j] += c_[i] * v;
        }
        return r;
    }

    // Lexicographic comparison of coefficient vectors (same conductor).
    friend bool lex_less(const Cyclotomic& a, const Cyclotomic& b) {
        a.same_field(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
        return false;
    }

    std::vector<std::string> to_strings() const { return ep::to_strings(c_); }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            std::string coef = ep::to_string(c_[i]);
            if (!s.empty()) s += (coef[0] == '-') ? " - " : " + ";
            else if (coef[0] == '-') s += "-";
            if (coef[0] == '-') coef = coef.substr(1);
            if (i == 0) s += coef;
            else {
                if (coef != "1") s += coef + "*";
                s += "z" + (i == 1 ? std::string() : "^" + std::to_string(i));
            }
        }
        return s.empty() ? "0" : s;
    }

private:
    void same_field(const Cyclotomic& o) const {
        if (field_ != o.field_) throw std::invalid_argument("cyclotomic conductor mismatch");
    }

    const CyclotomicField* field_;
    std::vector<Rational> c_;
};

// True when x lies in the subfield Q(zeta_d), d | conductor.
inline bool in_subfield(const Cyclotomic& x, int d) {
    const int n = x.conductor();
    if (n % d) return false;
    for (long k = 1; k < n; ++k) {
        if (std::gcd(k, (long)n) != 1 || k % d != 1 % d) continue;
        if (x.galois(k) != x) return false;
    }
    return true;
}

// Coordinates of x (in Q(zeta_n)) with respect to Q(zeta_d), d | n, assuming
// x lies in that subfield.
inline Cyclotomic restrict_to(const Cyclotomic& x, int d) {
    const int n = x.conductor();
    if (n % d) throw std::invalid_argument("restrict_to: d does not divide the conductor");
    if (d == n) return x;
    const int phid = euler_phi(d), phin = euler_phi(n);
    std::vector<RatVec> m(phin, RatVec(phid));
    for (int j = 0; j < phid; ++j) {
        Cyclotomic b = Cyclotomic::root_of_unity(n, (long)j * (n / d));
        for (int i = 0; i < phin; ++i) m[i][j] = b.coefficients()[i];
    }
    // least squares is unnecessary: pick an invertible square subsystem
    std::vector<RatVec> rows;
    RatVec rhs;
    for (int i = 0; i < phin && static_cast<int>(rows.size()) < phid; ++i) {
        auto trial = rows;
        trial.push_back(m[i]);
        if (matrix_rank(trial) == static_cast<int>(trial.size())) {
            rows.push_back(m[i]);
            rhs.push_back(x.coefficients()[i]);
        }
    }
    RatVec sol = solve(rows, rhs);
    Cyclotomic r(d);
    for (int j = 0; j < phid; ++j) r.coefficients()[j] = sol[j];
    if (r.embed(n) != x) throw std::domain_error("restrict_to: value does not lie in the subfield");
    return r;
}

// Least d | n such that every value lies in Q(zeta_d).
inline int minimal_conductor(const std::vector<Cyclotomic>& values, int n) {
    for (int d = 1; d <= n; ++d) {
        if (n % d) continue;
        if (d % 4 == 2) continue;  // Q(zeta_2m) = Q(zeta_m) for odd m
        bool ok = true;
        for (const auto& v : values)
            if (!in_subfield(v, d)) { ok = false; break; }
        if (ok) return d;
    }
    return n;
}

}  // namespace ep
