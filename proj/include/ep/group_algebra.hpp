#pragma once

// Functions on a finite group with convolution for the counting measure, and
// exact character tables by the Dixon-Schneider method.

#include "ep/cyclotomic.hpp"
#include "ep/finite_reductive.hpp"

#include <cmath>

namespace ep {

class AlgebraElement {
public:
    AlgebraElement(std::shared_ptr<const FiniteGroup> g, int conductor)
        : group_(std::move(g)), conductor_(conductor), c_(group_->order(), Cyclotomic(conductor)) {}

    static AlgebraElement delta(std::shared_ptr<const FiniteGroup> g, int conductor, int x) {
        AlgebraElement e(std::move(g), conductor);
        e.c_[x] = Cyclotomic::one(conductor);
        return e;
    }

    const FiniteGroup& group() const { return *group_; }
    std::shared_ptr<const FiniteGroup> group_ptr() const { return group_; }
    int conductor() const { return conductor_; }
    const Cyclotomic& operator[](int x) const { return c_[x]; }
    Cyclotomic& operator[](int x) { return c_[x]; }

    std::vector<int> support() const {
        std::vector<int> s;
        for (int i = 0; i < static_cast<int>(c_.size()); ++i)
            if (!c_[i].is_zero()) s.push_back(i);
        return s;
    }
    bool is_zero() const {
        for (const auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!o.c_[i].is_zero()) c_[i] += o.c_[i];
        return *this;
    }
    AlgebraElement& operator-=(const AlgebraElement& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!o.c_[i].is_zero()) c_[i] -= o.c_[i];
        return *this;
    }
    AlgebraElement& operator*=(const Rational& r) {
        for (auto& x : c_) x *= r;
        return *this;
    }
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(AlgebraElement a, const Rational& r) { return a *= r; }
    bool operator==(const AlgebraElement& o) const { return group_ == o.group_ && c_ == o.c_; }
    bool operator!=(const AlgebraElement& o) const { return !(*this == o); }

    void check(const AlgebraElement& o) const {
        if (group_ != o.group_) throw std::invalid_argument("algebra elements live on different groups");
        if (conductor_ != o.conductor_) throw std::invalid_argument("algebra elements use different conductors");
    }

private:
    std::shared_ptr<const FiniteGroup> group_;
    int conductor_;
    std::vector<Cyclotomic> c_;
};

// (f * g)(x) = sum_y f(y) g(y^-1 x)
inline AlgebraElement convolve(const AlgebraElement& f, const AlgebraElement& g) {
    f.check(g);
    const auto& G = f.group();
    AlgebraElement out(f.group_ptr(), f.conductor());
    const auto sf = f.support(), sg = g.support();
    for (int y : sf)
        for (int z : sg) Cyclotomic::add_product(out[G.mul(y, z)], f[y], g[z]);
    return out;
}

inline AlgebraElement subgroup_idempotent(std::shared_ptr<const FiniteGroup> g, int conductor, const std::vector<int>& h) {
    if (!g->is_subgroup(h)) throw std::invalid_argument("subgroup_idempotent: not a subgroup");
    AlgebraElement e(g, conductor);
    const Rational w = ratio(1, static_cast<long>(h.size()));
    for (int x : h) e[x] = Cyclotomic(conductor, w);
    return e;
}

namespace detail {

inline long mod_pow(long b, long e, long p) {
    long r = 1;
    b %= p;
    if (b < 0) b += p;
    while (e > 0) {
        if (e & 1) r = (__int128)r * b % p;
        b = (__int128)b * b % p;
        e >>= 1;
    }
    return r;
}
inline long mod_inv(long a, long p) { return mod_pow(((a % p) + p) % p, p - 2, p); }

inline bool is_prime_long(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

using ModMat = std::vector<std::vector<long>>;

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(ModMat& m, long p) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c]) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        long iv = mod_inv(m[r][c], p);
        for (auto& x : m[r]) x = x * iv % p;
        for (int i = 0; i < rows; ++i) {
            if (i == r || !m[i][c]) continue;
            long f = m[i][c];
            for (int j = 0; j < cols; ++j) m[i][j] = ((m[i][j] - f * m[r][j]) % p + p) % p;
        }
        pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    return pivots;
}

// Basis of {x : A x = 0} for a square matrix A.
inline ModMat nullspace(ModMat a, long p) {
    const int n = static_cast<int>(a.size());
    auto piv = rref(a, p);
    ModMat basis;
    std::vector<char> is_piv(n, 0);
    for (int c : piv) is_piv[c] = 1;
    for (int f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        std::vector<long> v(n, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = (p - a[i][f]) % p;
        basis.push_back(v);
    }
    return basis;
}

}  // namespace detail

struct CharacterTable {
    std::shared_ptr<const FiniteGroup> group;
    int conductor = 1;   // values lie in Q(zeta_conductor)
    long prime = 0;      // prime used for the modular eigenspace computation
    std::vector<int> class_sizes;
    std::vector<std::vector<Cyclotomic>> values;  // [character][class]
    std::vector<long> degrees;

    int size() const { return static_cast<int>(values.size()); }
    const Cyclotomic& value(int chi, int g) const { return values[chi][group->classes().class_of[g]]; }

    // Row and column orthogonality, checked exactly.
    bool orthogonality_holds() const {
        const int k = static_cast<int>(class_sizes.size());
        if (size() != k) return false;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                Cyclotomic s(conductor);
                for (int t = 0; t < k; ++t)
                    s += (values[a][t] * values[b][t].conj()) * Rational(class_sizes[t]);
                if (s != Cyclotomic(conductor, a == b ? group->order() : 0)) return false;
            }
        for (int s = 0; s < k; ++s)
            for (int t = 0; t < k; ++t) {
                Cyclotomic acc(conductor);
                for (int a = 0; a < k; ++a) acc += values[a][s] * values[a][t].conj();
                Rational expect = (s == t) ? ratio(group->order(), class_sizes[s]) : Rational(0);
                if (acc != Cyclotomic(conductor, expect)) return false;
            }
        return true;
    }
};

inline long dixon_schneider_prime(long order, long exponent) {
    const double bound = 2.0 * std::sqrt(static_cast<double>(order));
    for (long p = exponent + 1;; p += exponent)
        if (p > bound && detail::is_prime_long(p)) return p;
}

inline CharacterTable character_table(std::shared_ptr<const FiniteGroup> g) {
    using namespace detail;
    const auto& cl = g->classes();
    const int k = cl.count();
    const long N = g->order(), E = g->exponent();
    CharacterTable table;
    table.group = g;
    for (const auto& c : cl.classes) table.class_sizes.push_back(static_cast<int>(c.size()));
    const long p = dixon_schneider_prime(N, E);
    table.prime = p;

    // a[r][s][t] = #{x in C_r : x^-1 z_t in C_s}
    std::vector<long> a(static_cast<std::size_t>(k) * k * k, 0);
    auto A = [&](int r, int s, int t) -> long& { return a[(static_cast<std::size_t>(r) * k + s) * k + t]; };
    for (int t = 0; t < k; ++t) {
        const int z = cl.representative(t);
        for (int x = 0; x < N; ++x) ++A(cl.class_of[x], cl.class_of[g->mul(g->inv(x), z)], t);
    }

    // Split F_p^k into common eigenspaces of the class matrices (M_r)_{s,t} = a_rst.
    std::vector<ModMat> spaces;
    {
        ModMat id(k, std::vector<long>(k, 0));
        for (int i = 0; i < k; ++i) id[i][i] = 1;
        spaces.push_back(id);
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (int r = 1; r < k; ++r) {
            std::vector<ModMat> next;
            for (auto& basis : spaces) {
                const int d = static_cast<int>(basis.size());
                if (d == 1) {
                    next.push_back(basis);
                    continue;
                }
                auto piv = rref(basis, p);
                // action of M_r on the span, in coordinates read at the pivots
                ModMat act(d, std::vector<long>(d, 0));
                for (int j = 0; j < d; ++j) {
                    std::vector<long> img(k, 0);
                    for (int s = 0; s < k; ++s) {
                        long acc = 0;
                        for (int t = 0; t < k; ++t) acc += A(r, s, t) % p * basis[j][t] % p;
                        img[s] = acc % p;
                    }
                    for (int i = 0; i < d; ++i) act[i][j] = img[piv[i]];
                }
                int found = 0;
                for (long lam = 0; lam < p && found < d; ++lam) {
                    ModMat shifted = act;
                    for (int i = 0; i < d; ++i) shifted[i][i] = ((shifted[i][i] - lam) % p + p) % p;
                    auto ns = nullspace(shifted, p);
                    if (ns.empty()) continue;
                    ModMat sub;
                    for (const auto& c : ns) {
                        std::vector<long> v(k, 0);
                        for (int i = 0; i < d; ++i)
                            for (int t = 0; t < k; ++t) v[t] = (v[t] + c[i] * basis[i][t]) % p;
                        sub.push_back(v);
                    }
                    found += static_cast<int>(sub.size());
                    next.push_back(sub);
                }
                if (found != d) throw std::logic_error("character_table: class matrix not diagonalizable mod p");
            }
            spaces = std::move(next);
        }
        bool done = true;
        for (const auto& s : spaces) done &= (s.size() == 1);
        if (done) break;
        if (pass == 1) throw std::logic_error("character_table: eigenspaces did not split");
    }
    if (static_cast<int>(spaces.size()) != k) throw std::logic_error("character_table: wrong number of characters");

    std::vector<int> inv_class(k);
    for (int t = 0; t < k; ++t) inv_class[t] = cl.class_of[g->inv(cl.representative(t))];
    // power maps and element orders of representatives
    std::vector<int> rep_order(k);
    std::vector<std::vector<int>> power_class(k);
    for (int t = 0; t < k; ++t) {
        int x = 0;
        const int rep = cl.representative(t);
        do {
            power_class[t].push_back(cl.class_of[x]);
            x = g->mul(x, rep);
        } while (x != 0);
        rep_order[t] = static_cast<int>(power_class[t].size());
    }
    // primitive E-th root of unity mod p
    long gen = 2;
    {
        std::vector<long> factors;
        long m = p - 1;
        for (long d = 2; d * d <= m; ++d)
            if (m % d == 0) {
                factors.push_back(d);
                while (m % d == 0) m /= d;
            }
        if (m > 1) factors.push_back(m);
        for (;; ++gen) {
            bool ok = true;
            for (long f : factors) ok &= mod_pow(gen, (p - 1) / f, p) != 1;
            if (ok) break;
        }
    }
    const long w = mod_pow(gen, (p - 1) / E, p);

    std::vector<std::vector<Cyclotomic>> rows;
    std::vector<long> degs;
    for (auto& sp : spaces) {
        std::vector<long> om = sp[0];
        const long s0 = mod_inv(om[0], p);
        for (auto& x : om) x = x * s0 % p;
        long denom = 0;
        for (int t = 0; t < k; ++t)
            denom = (denom + om[t] * om[inv_class[t]] % p * mod_inv(table.class_sizes[t], p)) % p;
        const long deg2 = (N % p) * mod_inv(denom, p) % p;
        long deg = -1;
        for (long d = 1; 2 * d < p; ++d)
            if (d * d % p == deg2) { deg = d; break; }
        if (deg < 0) throw std::logic_error("character_table: degree not found");
        std::vector<long> chi(k);
        for (int t = 0; t < k; ++t) chi[t] = om[t] * deg % p * mod_inv(table.class_sizes[t], p) % p;
        std::vector<Cyclotomic> row;
        for (int t = 0; t < k; ++t) {
            const int e = rep_order[t];
            const long z = mod_pow(w, E / e, p);
            const long einv = mod_inv(e, p);
            std::vector<long> mult(e);
            long total = 0;
            for (int i = 0; i < e; ++i) {
                long acc = 0;
                for (int j = 0; j < e; ++j)
                    acc = (acc + chi[power_class[t][j]] * mod_pow(z, (long)(e - i) % e * j % e, p)) % p;
                mult[i] = acc * einv % p;
                if (mult[i] > deg) throw std::logic_error("character_table: eigenvalue multiplicity out of range");
                total += mult[i];
            }
            if (total != deg) throw std::logic_error("character_table: multiplicities do not sum to the degree");
            Cyclotomic v(static_cast<int>(E));
            for (int i = 0; i < e; ++i)
                if (mult[i]) v += Cyclotomic::root_of_unity(static_cast<int>(E), (long)i * (E / e)) * Rational(mult[i]);
            row.push_back(v);
        }
        rows.push_back(row);
        degs.push_back(deg);
    }

    std::vector<Cyclotomic> all;
    for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    const int cond = minimal_conductor(all, static_cast<int>(E));
    for (auto& r : rows)
        for (auto& v : r) v = restrict_to(v, cond);
    table.conductor = cond;

    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    auto trivial = [&](int i) {
        for (const auto& v : rows[i])
            if (v != Cyclotomic::one(cond)) return false;
        return true;
    };
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (degs[x] != degs[y]) return degs[x] < degs[y];
        bool tx = trivial(x), ty = trivial(y);
        if (tx != ty) return tx;
        for (int t = 0; t < k; ++t) {
            if (lex_less(rows[x][t], rows[y][t])) return true;
            if (lex_less(rows[y][t], rows[x][t])) return false;
        }
        return false;
    });
    for (int i : order) {
        table.values.push_back(rows[i]);
        table.degrees.push_back(degs[i]);
    }
    if (!table.orthogonality_holds()) throw std::logic_error("character_table: orthogonality fails");
    return table;
}

// Dimension of the U-fixed vectors: (1/|U|) sum_{u in U} chi(u).
inline Rational invariant_dim(const CharacterTable& t, int chi, const std::vector<int>& u) {
    Cyclotomic s(t.conductor);
    for (int x : u) s += t.value(chi, x);
    if (!s.is_rational()) throw std::domain_error("invariant_dim: irrational value");
    Rational d = s.rational_part() / Rational(static_cast<long>(u.size()));
    if (!is_integer(d) || d < 0) throw std::domain_error("invariant_dim: not a nonnegative integer: " + to_string(d));
    return d;
}

}  // namespace ep
