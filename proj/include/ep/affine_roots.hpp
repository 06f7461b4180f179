#pragma once

// Finite root systems in Bourbaki labelling and their affine roots.
//
// Coordinates. A root is stored as its integer coefficient vector in the
// simple roots. A point of the apartment is stored in the basis of fundamental
// coweights, so that alpha_i(x) = x_i and the pairing of a root with a point
// is the ordinary dot product. Long roots of C_n are 2e_n (alpha_n long), of
// B_n the short one is e_n; this is fixed for every output.

#include "ep/rational.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ep {

struct CartanType {
    char family = 'A';
    int rank = 1;

    std::string name() const { return std::string(1, family) + std::to_string(rank); }

    static CartanType parse(const std::string& s) {
        if (s.size() < 2) throw std::invalid_argument("unsupported Cartan type '" + s + "'");
        CartanType t;
        t.family = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        try {
            t.rank = std::stoi(s.substr(1));
        } catch (...) {
            throw std::invalid_argument("unsupported Cartan type '" + s + "'");
        }
        t.validate();
        return t;
    }

    void validate() const {
        bool ok = false;
        switch (family) {
            case 'A': ok = rank >= 1 && rank <= 4; break;
            case 'B':
            case 'C': ok = rank >= 2 && rank <= 4; break;
            case 'D': ok = rank == 4; break;
            case 'G': ok = rank == 2; break;
            case 'F': ok = rank == 4; break;
            default: ok = false;
        }
        if (!ok)
            throw std::invalid_argument("unsupported Cartan type (" + std::string(1, family) + ", " +
                                        std::to_string(rank) + ")");
    }

    bool operator==(const CartanType& o) const { return family == o.family && rank == o.rank; }
};

struct AffineRoot {
    IntVec gradient;
    long level = 0;

    Rational operator()(const RatVec& x) const { return dot(gradient, x) + Rational(level); }
    AffineRoot operator-() const { return {negate(gradient), -level}; }
    bool operator==(const AffineRoot& o) const { return level == o.level && gradient == o.gradient; }
    bool operator<(const AffineRoot& o) const {
        if (gradient != o.gradient) return gradient < o.gradient;
        return level < o.level;
    }
};

inline Rational affine_eval(const AffineRoot& psi, const RatVec& x) { return psi(x); }

// Weyl group element acting on roots (as a permutation of root indices) and on
// points in coweight coordinates (as an integer matrix, row-major).
struct WeylElement {
    std::vector<int> perm;
    std::vector<IntVec> matrix;
};

struct PositiveSystem {
    std::vector<int> roots;   // sorted root indices
    std::vector<int> simple;  // images of alpha_1..alpha_l, in order
    int weyl_index = 0;       // w with this system = w(Phi+)
};

class RootSystem {
public:
    explicit RootSystem(CartanType type) : type_(type) {
        type_.validate();
        build_gram();
        build_roots();
        build_weyl();
    }

    const CartanType& type() const { return type_; }
    int rank() const { return type_.rank; }

    const std::vector<IntVec>& roots() const { return roots_; }
    int num_roots() const { return static_cast<int>(roots_.size()); }
    int num_positive() const { return num_roots() / 2; }
    const IntVec& root(int i) const { return roots_.at(i); }
    bool is_positive(int i) const { return i < num_positive(); }
    int negative_of(int i) const { return i < num_positive() ? i + num_positive() : i - num_positive(); }

    int index_of(const IntVec& c) const {
        auto it = index_.find(c);
        return it == index_.end() ? -1 : it->second;
    }
    bool contains(const IntVec& c) const { return index_.count(c) > 0; }

    std::vector<IntVec> positive_roots() const {
        return {roots_.begin(), roots_.begin() + num_positive()};
    }
    std::vector<IntVec> simple_roots() const {
        std::vector<IntVec> s;
        for (int i = 0; i < rank(); ++i) {
            IntVec e(rank(), 0);
            e[i] = 1;
            s.push_back(e);
        }
        return s;
    }
    const IntVec& highest_root() const { return roots_[num_positive() - 1]; }
    int highest_root_index() const { return num_positive() - 1; }
    // Coefficients of the highest root, also the vertex denominators of the alcove.
    const IntVec& marks() const { return highest_root(); }

    // Gram matrix of the simple roots scaled by two, integral for every type.
    const std::vector<IntVec>& gram() const { return gram_; }
    const std::vector<RatVec>& simple_roots_ambient() const { return ambient_; }

    // alpha_j(gamma^vee) for j = 1..l: the coroot of root i in coweight coordinates.
    const IntVec& coroot(int i) const { return coroots_.at(i); }

    // <beta, gamma^vee> for arbitrary roots.
    long pairing(const IntVec& beta, int gamma_index) const { return dot(beta, coroot(gamma_index)); }

    long norm2(const IntVec& c) const {
        long s = 0;
        for (int i = 0; i < rank(); ++i)
            for (int j = 0; j < rank(); ++j) s += c[i] * gram_[i][j] * c[j];
        return s;
    }
    bool is_long(int i) const { return norm2(root(i)) == max_norm_; }

    std::vector<RatVec> fundamental_coweights() const {
        std::vector<RatVec> out;
        for (int i = 0; i < rank(); ++i) {
            RatVec v(rank(), Rational(0));
            v[i] = 1;
            out.push_back(v);
        }
        return out;
    }

    // The coweight lambda_i written in the ambient orthonormal frame of the
    // Bourbaki plates, i.e. the dual basis to the simple roots.
    std::vector<RatVec> fundamental_coweights_ambient() const {
        const int n = rank();
        const int dim = static_cast<int>(ambient_[0].size());
        std::vector<RatVec> g(n, RatVec(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                g[i][j] = Rational(gram_[i][j], 2);
                g[i][j].canonicalize();
            }
        std::vector<RatVec> out;
        for (int i = 0; i < n; ++i) {
            RatVec e(n, Rational(0));
            e[i] = 1;
            RatVec c = solve(g, e);
            RatVec v(dim, Rational(0));
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < dim; ++k) v[k] += c[j] * ambient_[j][k];
            out.push_back(v);
        }
        return out;
    }

    std::vector<AffineRoot> simple_affine_roots() const {
        std::vector<AffineRoot> out;
        out.push_back({negate(highest_root()), 1});
        for (const auto& a : simple_roots()) out.push_back({a, 0});
        return out;
    }

    // Reflection of a root in the simple root alpha_i.
    IntVec reflect_root(const IntVec& c, int i) const {
        IntVec r = c;
        long n = 0;
        for (int j = 0; j < rank(); ++j) n += gram_[i][j] * c[j];
        r[i] -= 2 * n / gram_[i][i];
        return r;
    }

    const std::vector<WeylElement>& weyl_group() const { return weyl_; }
    std::size_t weyl_order() const { return weyl_.size(); }
    const std::vector<PositiveSystem>& positive_systems() const { return positive_systems_; }

    // Coefficients of root index r in the simple roots of a positive system.
    IntVec coefficients_in(const PositiveSystem& ps, int r) const {
        const auto& w = weyl_[ps.weyl_index];
        for (int i = 0; i < num_roots(); ++i)
            if (w.perm[i] == r) return roots_[i];
        throw std::logic_error("root not in orbit");
    }

    bool is_closed_subset(const std::vector<int>& subset) const {
        std::set<int> s(subset.begin(), subset.end());
        for (int a : s)
            for (int b : s) {
                IntVec sum = roots_[a];
                for (int k = 0; k < rank(); ++k) sum[k] += roots_[b][k];
                int idx = index_of(sum);
                if (idx >= 0 && !s.count(idx)) return false;
            }
        return true;
    }

    // A parabolic subset is closed and contains one of every pair of opposite roots.
    bool is_parabolic_subset(const std::vector<int>& subset) const {
        std::set<int> s(subset.begin(), subset.end());
        for (int i = 0; i < num_positive(); ++i)
            if (!s.count(i) && !s.count(negative_of(i))) return false;
        return is_closed_subset(subset);
    }

private:
    void build_gram() {
        const int n = type_.rank;
        std::vector<RatVec> a;
        auto unit = [](int dim, int i) {
            RatVec v(dim, Rational(0));
            v[i] = 1;
            return v;
        };
        auto diff = [&](int dim, int i, int j) {
            RatVec v = unit(dim, i);
            v[j] -= 1;
            return v;
        };
        switch (type_.family) {
            case 'A':
                for (int i = 0; i < n; ++i) a.push_back(diff(n + 1, i, i + 1));
                break;
            case 'B':
                for (int i = 0; i + 1 < n; ++i) a.push_back(diff(n, i, i + 1));
                a.push_back(unit(n, n - 1));
                break;
            case 'C': {
                for (int i = 0; i + 1 < n; ++i) a.push_back(diff(n, i, i + 1));
                RatVec v = unit(n, n - 1);
                v[n - 1] = 2;
                a.push_back(v);
                break;
            }
            case 'D': {
                for (int i = 0; i + 1 < n; ++i) a.push_back(diff(n, i, i + 1));
                RatVec v = unit(n, n - 1);
                v[n - 2] = 1;
                a.push_back(v);
                break;
            }
            case 'G':
                a.push_back(diff(3, 0, 1));
                a.push_back({Rational(-2), Rational(1), Rational(1)});
                break;
            case 'F':
                a.push_back(diff(4, 1, 2));
                a.push_back(diff(4, 2, 3));
                a.push_back(unit(4, 3));
                a.push_back({Rational(1, 2), Rational(-1, 2), Rational(-1, 2), Rational(-1, 2)});
                break;
        }
        ambient_ = a;
        gram_.assign(n, IntVec(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t k = 0; k < a[i].size(); ++k) s += a[i][k] * a[j][k];
                s *= 2;
                if (!is_integer(s)) throw std::logic_error("non-integral Gram matrix");
                gram_[i][j] = s.get_num().get_si();
            }
    }

    void build_roots() {
        const int n = rank();
        std::set<IntVec> seen;
        std::vector<IntVec> frontier = simple_roots();
        for (auto& s : frontier) seen.insert(s);
        while (!frontier.empty()) {
            std::vector<IntVec> next;
            for (const auto& c : frontier)
                for (int i = 0; i < n; ++i) {
                    IntVec r = reflect_root(c, i);
                    if (seen.insert(r).second) next.push_back(r);
                }
            frontier = std::move(next);
        }
        std::vector<IntVec> pos;
        for (const auto& c : seen) {
            bool nonneg = std::all_of(c.begin(), c.end(), [](long x) { return x >= 0; });
            bool nonpos = std::all_of(c.begin(), c.end(), [](long x) { return x <= 0; });
            if (!nonneg && !nonpos) throw std::logic_error("root with mixed signs");
            if (nonneg) pos.push_back(c);
        }
        auto height = [](const IntVec& c) { return std::accumulate(c.begin(), c.end(), 0L); };
        std::sort(pos.begin(), pos.end(), [&](const IntVec& x, const IntVec& y) {
            if (height(x) != height(y)) return height(x) < height(y);
            return x > y;
        });
        roots_ = pos;
        for (const auto& c : pos) roots_.push_back(negate(c));
        for (int i = 0; i < num_roots(); ++i) index_[roots_[i]] = i;
        max_norm_ = 0;
        for (const auto& c : roots_) max_norm_ = std::max(max_norm_, norm2(c));
        coroots_.clear();
        for (const auto& c : roots_) {
            long nn = norm2(c);
            IntVec cv(n);
            for (int j = 0; j < n; ++j) {
                long g = 0;
                for (int k = 0; k < n; ++k) g += gram_[j][k] * c[k];
                if ((2 * g) % nn != 0) throw std::logic_error("non-integral coroot");
                cv[j] = 2 * g / nn;
            }
            coroots_.push_back(cv);
        }
    }

    void build_weyl() {
        const int n = rank();
        const int nr = num_roots();
        std::vector<std::vector<int>> gens;
        std::vector<std::vector<IntVec>> gen_mats;
        for (int i = 0; i < n; ++i) {
            std::vector<int> p(nr);
            for (int r = 0; r < nr; ++r) p[r] = index_of(reflect_root(roots_[r], i));
            gens.push_back(p);
            // s_i(x) = x - x_i alpha_i^vee on coweight coordinates.
            std::vector<IntVec> m(n, IntVec(n, 0));
            const IntVec& cv = coroots_[i];
            for (int r = 0; r < n; ++r) {
                m[r][r] = 1;
                m[r][i] -= cv[r];
            }
            gen_mats.push_back(m);
        }
        std::vector<int> id(nr);
        std::iota(id.begin(), id.end(), 0);
        std::vector<IntVec> idm(n, IntVec(n, 0));
        for (int i = 0; i < n; ++i) idm[i][i] = 1;
        std::map<std::vector<int>, int> seen;
        weyl_.push_back({id, idm});
        seen[id] = 0;
        for (std::size_t k = 0; k < weyl_.size(); ++k) {
            for (int i = 0; i < n; ++i) {
                // s_i * w
                std::vector<int> p(nr);
                for (int r = 0; r < nr; ++r) p[r] = gens[i][weyl_[k].perm[r]];
                if (seen.count(p)) continue;
                std::vector<IntVec> m(n, IntVec(n, 0));
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c)
                        for (int t = 0; t < n; ++t) m[r][c] += gen_mats[i][r][t] * weyl_[k].matrix[t][c];
                seen[p] = static_cast<int>(weyl_.size());
                weyl_.push_back({p, m});
            }
        }
        std::set<std::vector<int>> systems;
        for (std::size_t k = 0; k < weyl_.size(); ++k) {
            std::vector<int> img;
            for (int r = 0; r < num_positive(); ++r) img.push_back(weyl_[k].perm[r]);
            std::vector<int> sorted = img;
            std::sort(sorted.begin(), sorted.end());
            if (!systems.insert(sorted).second) continue;
            PositiveSystem ps;
            ps.roots = sorted;
            for (int i = 0; i < n; ++i) ps.simple.push_back(weyl_[k].perm[i]);
            ps.weyl_index = static_cast<int>(k);
            positive_systems_.push_back(ps);
        }
    }

    CartanType type_;
    std::vector<IntVec> gram_;
    std::vector<RatVec> ambient_;
    std::vector<IntVec> roots_;
    std::vector<IntVec> coroots_;
    std::map<IntVec, int> index_;
    long max_norm_ = 0;
    std::vector<WeylElement> weyl_;
    std::vector<PositiveSystem> positive_systems_;
};

inline RootSystem build_root_system(const CartanType& t) { return RootSystem(t); }

}  // namespace ep
