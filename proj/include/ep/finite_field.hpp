#pragma once

// F_q = F_p[x]/(f) with f the least monic irreducible polynomial of degree e,
// where polynomials are ordered by their code sum c_i p^i. An element is stored
// by the same code, so 0 and 1 are the integers 0 and 1 and x is p.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ep {

class FiniteField {
public:
    static constexpr int kMaxOrder = 64;

    FiniteField(int p, int e) : p_(p), e_(e) {
        if (p < 2 || !is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
        if (e < 1) throw std::invalid_argument("extension degree must be positive");
        q_ = 1;
        for (int i = 0; i < e; ++i) q_ *= p;
        if (q_ > kMaxOrder) throw std::invalid_argument("field order exceeds " + std::to_string(kMaxOrder));
        find_modulus();
        build_tables();
    }

    static std::shared_ptr<const FiniteField> of_order(int q) {
        for (int p = 2; p <= q; ++p) {
            if (!is_prime(p)) continue;
            int e = 0, r = q;
            while (r % p == 0) {
                r /= p;
                ++e;
            }
            if (r == 1 && e > 0) return std::make_shared<const FiniteField>(p, e);
            if (q % p == 0) break;
        }
        throw std::invalid_argument("no field of order " + std::to_string(q));
    }

    int p() const { return p_; }
    int e() const { return e_; }
    int q() const { return q_; }
    // Coefficients of the modulus, constant term first, monic.
    const std::vector<int>& modulus() const { return modulus_; }

    int add(int a, int b) const { return add_[a * q_ + b]; }
    int sub(int a, int b) const { return add_[a * q_ + neg_[b]]; }
    int neg(int a) const { return neg_[a]; }
    int mul(int a, int b) const { return mul_[a * q_ + b]; }
    int inv(int a) const {
        if (a == 0) throw std::domain_error("inverse of zero");
        return inv_[a];
    }
    int primitive_element() const { return primitive_; }
    // Additive generators 1, x, ..., x^(e-1).
    std::vector<int> additive_basis() const {
        std::vector<int> b;
        int v = 1;
        for (int i = 0; i < e_; ++i, v *= p_) b.push_back(v);
        return b;
    }

    std::string modulus_string() const {
        std::string s;
        for (int i = e_; i >= 0; --i) {
            int c = modulus_[i];
            if (c == 0) continue;
            if (!s.empty()) s += " + ";
            if (i == 0 || c != 1) s += std::to_string(c);
            if (i > 0) s += (i == 1 ? "x" : "x^" + std::to_string(i));
        }
        return s;
    }

    static bool is_prime(int n) {
        if (n < 2) return false;
        for (int d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

private:
    std::vector<int> decode(int a) const {
        std::vector<int> c(e_);
        for (int i = 0; i < e_; ++i, a /= p_) c[i] = a % p_;
        return c;
    }
    int encode(const std::vector<int>& c) const {
        int a = 0;
        for (int i = e_ - 1; i >= 0; --i) a = a * p_ + c[i];
        return a;
    }

    // remainder of polynomial a modulo monic b over F_p
    std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& b) const {
        const int db = static_cast<int>(b.size()) - 1;
        for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
            int c = a[i] % p_;
            if (c == 0) continue;
            for (int j = 0; j <= db; ++j) a[i - db + j] = ((a[i - db + j] - c * b[j]) % p_ + p_) % p_;
        }
        a.resize(std::max(db, 0));
        return a;
    }

    bool irreducible(const std::vector<int>& f) const {
        const int deg = static_cast<int>(f.size()) - 1;
        for (int d = 1; d <= deg / 2; ++d) {
            int count = 1;
            for (int i = 0; i < d; ++i) count *= p_;
            for (int code = 0; code < count; ++code) {
                std::vector<int> g(d + 1);
                int c = code;
                for (int i = 0; i < d; ++i, c /= p_) g[i] = c % p_;
                g[d] = 1;
                auto r = poly_mod(f, g);
                bool zero = true;
                for (int x : r) zero &= (x == 0);
                if (zero) return false;
            }
        }
        return true;
    }

    void find_modulus() {
        for (int code = 0; code < q_; ++code) {
            std::vector<int> f = decode(code);
            f.push_back(1);
            if (e_ == 1 || irreducible(f)) {
                if (e_ > 1 && f[0] == 0) continue;
                modulus_ = f;
                return;
            }
        }
        throw std::logic_error("no irreducible polynomial found");
    }

    void build_tables() {
        add_.assign(q_ * q_, 0);
        mul_.assign(q_ * q_, 0);
        neg_.assign(q_, 0);
        inv_.assign(q_, 0);
        for (int a = 0; a < q_; ++a) {
            auto ca = decode(a);
            std::vector<int> cn(e_);
            for (int i = 0; i < e_; ++i) cn[i] = (p_ - ca[i]) % p_;
            neg_[a] = encode(cn);
            for (int b = 0; b < q_; ++b) {
                auto cb = decode(b);
                std::vector<int> s(e_);
                for (int i = 0; i < e_; ++i) s[i] = (ca[i] + cb[i]) % p_;
                add_[a * q_ + b] = encode(s);
                std::vector<int> prod(2 * e_ - 1, 0);
                for (int i = 0; i < e_; ++i)
                    for (int j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
                auto r = poly_mod(prod, modulus_);
                r.resize(e_, 0);
                mul_[a * q_ + b] = encode(r);
            }
        }
        for (int a = 1; a < q_; ++a)
            for (int b = 1; b < q_; ++b)
                if (mul_[a * q_ + b] == 1) inv_[a] = b;
        for (int g = 1; g < q_; ++g) {
            int x = g, ord = 1;
            while (x != 1) {
                x = mul_[x * q_ + g];
                ++ord;
            }
            if (ord == q_ - 1) {
                primitive_ = g;
                break;
            }
        }
    }

    int p_, e_, q_ = 1;
    std::vector<int> modulus_;
    std::vector<int> add_, mul_, neg_, inv_;
    int primitive_ = 1;
};

}  // namespace ep
