#pragma once

// Split finite groups of Lie type realised as matrix groups over F_q, with
// their standard parabolic subgroups, Levi factors and unipotent radicals.

#include "ep/finite_field.hpp"
#include "ep/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace ep {

// Square matrix of size at most 4 with entries in F_q, stored row-major in a
// fixed 4x4 array so equal matrices have equal bytes.
struct Mat {
    std::array<std::uint8_t, 16> a{};
    std::uint8_t& at(int r, int c) { return a[r * 4 + c]; }
    std::uint8_t at(int r, int c) const { return a[r * 4 + c]; }
    bool operator==(const Mat& o) const { return a == o.a; }
    bool operator<(const Mat& o) const { return a < o.a; }
};

struct MatHash {
    std::size_t operator()(const Mat& m) const {
        std::uint64_t lo, hi;
        std::memcpy(&lo, m.a.data(), 8);
        std::memcpy(&hi, m.a.data() + 8, 8);
        return std::hash<std::uint64_t>()(lo * 0x9E3779B97F4A7C15ULL ^ hi);
    }
};

inline Mat identity_mat(int n) {
    Mat m;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

inline Mat mat_mul(const FiniteField& F, int n, const Mat& x, const Mat& y) {
    Mat z;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            int a = x.at(i, k);
            if (a == 0) continue;
            for (int j = 0; j < n; ++j) {
                int b = y.at(k, j);
                if (b) z.at(i, j) = static_cast<std::uint8_t>(F.add(z.at(i, j), F.mul(a, b)));
            }
        }
    return z;
}

inline Mat mat_transpose(int n, const Mat& x) {
    Mat t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.at(i, j) = x.at(j, i);
    return t;
}

inline int mat_det(const FiniteField& F, int n, Mat x) {
    int det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (x.at(r, c)) { piv = r; break; }
        if (piv < 0) return 0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(x.at(piv, j), x.at(c, j));
            det = F.neg(det);
        }
        det = F.mul(det, x.at(c, c));
        int ic = F.inv(x.at(c, c));
        for (int r = c + 1; r < n; ++r) {
            int f = F.mul(x.at(r, c), ic);
            if (!f) continue;
            for (int j = c; j < n; ++j) x.at(r, j) = static_cast<std::uint8_t>(F.sub(x.at(r, j), F.mul(f, x.at(c, j))));
        }
    }
    return det;
}

inline Mat mat_inverse(const FiniteField& F, int n, Mat x) {
    Mat y = identity_mat(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (x.at(r, c)) { piv = r; break; }
        if (piv < 0) throw std::domain_error("singular matrix");
        for (int j = 0; j < n; ++j) {
            std::swap(x.at(piv, j), x.at(c, j));
            std::swap(y.at(piv, j), y.at(c, j));
        }
        int ic = F.inv(x.at(c, c));
        for (int j = 0; j < n; ++j) {
            x.at(c, j) = static_cast<std::uint8_t>(F.mul(x.at(c, j), ic));
            y.at(c, j) = static_cast<std::uint8_t>(F.mul(y.at(c, j), ic));
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || !x.at(r, c)) continue;
            int f = x.at(r, c);
            for (int j = 0; j < n; ++j) {
                x.at(r, j) = static_cast<std::uint8_t>(F.sub(x.at(r, j), F.mul(f, x.at(c, j))));
                y.at(r, j) = static_cast<std::uint8_t>(F.sub(y.at(r, j), F.mul(f, y.at(c, j))));
            }
        }
    }
    return y;
}

inline long default_size_cap() {
    if (const char* env = std::getenv("EP_SIZE_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 200000;
}

struct ConjugacyClasses {
    std::vector<std::vector<int>> classes;  // sorted members; classes ordered by least member
    std::vector<int> class_of;

    int count() const { return static_cast<int>(classes.size()); }
    int representative(int c) const { return classes[c].front(); }
};

// A finite group of n x n matrices enumerated once. Element 0 is the identity
// and all operations are by index.
class FiniteGroup {
public:
    static constexpr int kTableLimit = 2048;

    // Breadth-first closure of the generators starting at the identity.
    FiniteGroup(std::shared_ptr<const FiniteField> field, int n, const std::vector<Mat>& gens, std::string name,
                long cap = default_size_cap())
        : field_(std::move(field)), n_(n), name_(std::move(name)) {
        add_element(identity_mat(n_));
        std::deque<int> queue{0};
        while (!queue.empty()) {
            int i = queue.front();
            queue.pop_front();
            for (const auto& s : gens) {
                Mat m = mat_mul(*field_, n_, elements_[i], s);
                if (index_.count(m)) continue;
                if (static_cast<long>(elements_.size()) >= cap)
                    throw std::length_error(name_ + ": enumeration exceeds size cap " + std::to_string(cap));
                queue.push_back(add_element(m));
            }
        }
        for (const auto& s : gens) {
            int idx = index_of(s);
            if (idx != 0 && std::find(generators_.begin(), generators_.end(), idx) == generators_.end())
                generators_.push_back(idx);
        }
        finish();
    }

    // A group from an explicit element list that must be closed under products
    // and contain the identity; the identity is moved to the front.
    static std::shared_ptr<FiniteGroup> from_elements(std::shared_ptr<const FiniteField> field, int n,
                                                      const std::vector<Mat>& elems, std::string name) {
        auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup(std::move(field), n, std::move(name)));
        const Mat id = identity_mat(n);
        g->add_element(id);
        for (const auto& m : elems)
            if (!(m == id)) {
                if (g->index_.count(m)) throw std::invalid_argument("from_elements: repeated element");
                g->add_element(m);
            }
        if (static_cast<std::size_t>(g->order()) != elems.size())
            throw std::invalid_argument("from_elements: identity missing");
        for (int i = 0; i < g->order(); ++i)
            for (int j = 0; j < g->order(); ++j)
                if (g->index_of(mat_mul(*g->field_, n, g->elements_[i], g->elements_[j])) < 0)
                    throw std::invalid_argument("from_elements: not closed under multiplication");
        g->choose_generators();
        g->finish();
        return g;
    }

    const std::string& name() const { return name_; }
    const FiniteField& field() const { return *field_; }
    std::shared_ptr<const FiniteField> field_ptr() const { return field_; }
    int dim() const { return n_; }
    int order() const { return static_cast<int>(elements_.size()); }
    const Mat& element(int i) const { return elements_[i]; }
    const std::vector<Mat>& elements() const { return elements_; }
    const std::vector<int>& generators() const { return generators_; }

    int index_of(const Mat& m) const {
        auto it = index_.find(m);
        return it == index_.end() ? -1 : it->second;
    }
    int mul(int a, int b) const {
        if (!table_.empty()) return table_[static_cast<std::size_t>(a) * order() + b];
        return index_.at(mat_mul(*field_, n_, elements_[a], elements_[b]));
    }
    int inv(int a) const { return inverse_[a]; }
    int conj(int g, int x) const { return mul(mul(g, x), inverse_[g]); }  // g x g^-1
    int power(int g, long k) const {
        int r = 0;
        for (long i = 0; i < k; ++i) r = mul(r, g);
        return r;
    }
    int element_order(int g) const {
        int x = g, k = 1;
        while (x != 0) {
            x = mul(x, g);
            ++k;
        }
        return k;
    }
    const ConjugacyClasses& classes() const { return classes_; }
    long exponent() const { return exponent_; }

    bool is_subgroup(const std::vector<int>& h) const {
        std::vector<char> in(order(), 0);
        for (int x : h) in[x] = 1;
        if (h.empty() || !in[0]) return false;
        for (int x : h) {
            if (!in[inverse_[x]]) return false;
            for (int y : h)
                if (!in[mul(x, y)]) return false;
        }
        return true;
    }

private:
    FiniteGroup(std::shared_ptr<const FiniteField> field, int n, std::string name)
        : field_(std::move(field)), n_(n), name_(std::move(name)) {}

    int add_element(const Mat& m) {
        int idx = static_cast<int>(elements_.size());
        elements_.push_back(m);
        index_.emplace(m, idx);
        return idx;
    }

    // Greedy generating set: scan elements in index order and keep those
    // outside the subgroup generated so far.
    void choose_generators() {
        std::vector<char> in(order(), 0);
        std::vector<int> members{0};
        in[0] = 1;
        for (int i = 1; i < order(); ++i) {
            if (in[i]) continue;
            generators_.push_back(i);
            std::deque<int> queue(members.begin(), members.end());
            while (!queue.empty()) {
                int x = queue.front();
                queue.pop_front();
                for (int s : generators_) {
                    int y = index_.at(mat_mul(*field_, n_, elements_[x], elements_[s]));
                    if (!in[y]) {
                        in[y] = 1;
                        members.push_back(y);
                        queue.push_back(y);
                    }
                }
            }
        }
    }

    void finish() {
        const int N = order();
        if (N <= kTableLimit) {
            table_.resize(static_cast<std::size_t>(N) * N);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    table_[static_cast<std::size_t>(i) * N + j] = index_.at(mat_mul(*field_, n_, elements_[i], elements_[j]));
        }
        inverse_.resize(N);
        for (int i = 0; i < N; ++i) inverse_[i] = index_.at(mat_inverse(*field_, n_, elements_[i]));

        classes_.class_of.assign(N, -1);
        for (int i = 0; i < N; ++i) {
            if (classes_.class_of[i] >= 0) continue;
            const int c = classes_.count();
            std::vector<int> orbit{i};
            classes_.class_of[i] = c;
            for (std::size_t k = 0; k < orbit.size(); ++k)
                for (int s : generators_) {
                    int y = conj(s, orbit[k]);
                    if (classes_.class_of[y] < 0) {
                        classes_.class_of[y] = c;
                        orbit.push_back(y);
                    }
                }
            std::sort(orbit.begin(), orbit.end());
            classes_.classes.push_back(std::move(orbit));
        }
        exponent_ = 1;
        for (int c = 0; c < classes_.count(); ++c) exponent_ = std::lcm(exponent_, (long)element_order(classes_.representative(c)));
    }

    std::shared_ptr<const FiniteField> field_;
    int n_;
    std::string name_;
    std::vector<Mat> elements_;
    std::unordered_map<Mat, int, MatHash> index_;
    std::vector<int> generators_;
    std::vector<int> table_;
    std::vector<int> inverse_;
    ConjugacyClasses classes_;
    long exponent_ = 1;
};

enum class GroupKind { GL, SL, Sp4, SL2xSL2 };

struct GroupSpec {
    GroupKind kind = GroupKind::GL;
    int n = 2;  // matrix size
    int q = 2;

    std::string type_name() const {
        switch (kind) {
            case GroupKind::GL: return "GL" + std::to_string(n);
            case GroupKind::SL: return "SL" + std::to_string(n);
            case GroupKind::Sp4: return "Sp4";
            case GroupKind::SL2xSL2: return "SL2xSL2";
        }
        return "?";
    }
    std::string name() const { return type_name() + "(F" + std::to_string(q) + ")"; }

    // Accepts GL1..GL3, SL1..SL3, Sp4 and SL2xSL2.
    static GroupSpec parse(const std::string& type, int q) {
        GroupSpec s;
        s.q = q;
        if (type == "Sp4") {
            s.kind = GroupKind::Sp4;
            s.n = 4;
        } else if (type == "SL2xSL2") {
            s.kind = GroupKind::SL2xSL2;
            s.n = 4;
        } else if (type.size() == 3 && (type.rfind("GL", 0) == 0 || type.rfind("SL", 0) == 0) && type[2] >= '1' &&
                   type[2] <= '3') {
            s.kind = type[0] == 'G' ? GroupKind::GL : GroupKind::SL;
            s.n = type[2] - '0';
        } else {
            throw std::invalid_argument("unsupported group kind '" + type + "' (expected GL1-3, SL1-3, Sp4, SL2xSL2)");
        }
        return s;
    }

    mpz_class order_formula() const {
        mpz_class Q = q, r = 1;
        auto pw = [&](int k) {
            mpz_class v = 1;
            for (int i = 0; i < k; ++i) v *= Q;
            return v;
        };
        switch (kind) {
            case GroupKind::GL:
            case GroupKind::SL:
                for (int i = 0; i < n; ++i) r *= pw(n) - pw(i);
                if (kind == GroupKind::SL) r /= (Q - 1);
                return r;
            case GroupKind::Sp4: return pw(4) * (pw(2) - 1) * (pw(4) - 1);
            case GroupKind::SL2xSL2: r = Q * (pw(2) - 1); return r * r;
        }
        return r;
    }
};

// One root of the group: its coefficients in the simple roots and the matrix
// units making up x(t) = I + t * sum(sign * E_rc).
struct GroupRoot {
    IntVec coefficients;
    std::vector<std::array<int, 3>> entries;  // (row, col, sign)
};

struct ParabolicSubgroup {
    unsigned levi_subset = 0;  // bitmask over simple roots
    std::vector<int> elements;
    std::vector<int> radical;
    std::vector<int> levi;
};

// A standard Levi subgroup as a group in its own right, with the index maps to
// and from the ambient group.
struct LeviGroup {
    unsigned subset = 0;
    std::shared_ptr<FiniteGroup> group;
    std::vector<int> to_parent;
    std::unordered_map<int, int> from_parent;
};

class ReductiveGroup {
public:
    explicit ReductiveGroup(const GroupSpec& spec, long cap = default_size_cap())
        : spec_(spec), field_(FiniteField::of_order(spec.q)) {
        build_roots();
        const mpz_class expected = spec_.order_formula();
        if (expected > cap)
            throw std::length_error(spec_.name() + ": order " + expected.get_str() + " exceeds size cap " +
                                    std::to_string(cap));
        std::vector<Mat> gens;
        for (std::size_t b = 0; b < roots_.size(); ++b)
            for (int t : field_->additive_basis()) gens.push_back(root_element(static_cast<int>(b), t));
        if (spec_.kind == GroupKind::GL) {
            Mat d = identity_mat(spec_.n);
            d.at(0, 0) = static_cast<std::uint8_t>(field_->primitive_element());
            gens.push_back(d);
        }
        group_ = std::make_shared<FiniteGroup>(field_, spec_.n, gens, spec_.name(), cap);
        if (mpz_class(group_->order()) != expected)
            throw std::logic_error(spec_.name() + ": enumeration does not match the order formula");
    }

    const GroupSpec& spec() const { return spec_; }
    std::string name() const { return spec_.name(); }
    const FiniteField& field() const { return *field_; }
    std::shared_ptr<FiniteGroup> group_ptr() const { return group_; }
    const FiniteGroup& group() const { return *group_; }
    int rank() const { return static_cast<int>(simple_lower_.size()); }
    unsigned full_mask() const { return (1u << rank()) - 1; }
    const std::vector<GroupRoot>& roots() const { return roots_; }
    int positive_root_count() const { return static_cast<int>(roots_.size()) / 2; }
    // cartan()[i][j] = <alpha_i, alpha_j^vee>
    const std::vector<std::vector<int>>& cartan() const { return cartan_; }

    Mat root_element(int b, int t) const {
        Mat m = identity_mat(spec_.n);
        for (const auto& [r, c, sign] : roots_[b].entries)
            m.at(r, c) = static_cast<std::uint8_t>(sign > 0 ? t : field_->neg(t));
        return m;
    }

    // Block index of each matrix row for the Levi of the given subset.
    std::vector<int> blocks(unsigned subset) const {
        const int n = spec_.n;
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (int i = 0; i < rank(); ++i)
            if (subset & (1u << i))
                for (auto [r, c] : simple_lower_[i]) parent[find(r)] = find(c);
        std::vector<int> id(n), label(n, -1);
        int next = 0;
        for (int r = 0; r < n; ++r) {
            int root = find(r);
            if (label[root] < 0) label[root] = next++;
            id[r] = label[root];
        }
        for (int r = 1; r < n; ++r)
            if (id[r] < id[r - 1]) throw std::logic_error("non-contiguous Levi blocks");
        return id;
    }

    static bool in_parabolic(const Mat& m, const std::vector<int>& blk) {
        const int n = static_cast<int>(blk.size());
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (blk[r] > blk[c] && m.at(r, c)) return false;
        return true;
    }
    static bool in_levi(const Mat& m, const std::vector<int>& blk) {
        const int n = static_cast<int>(blk.size());
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (blk[r] != blk[c] && m.at(r, c)) return false;
        return true;
    }
    static bool in_radical(const Mat& m, const std::vector<int>& blk) {
        const int n = static_cast<int>(blk.size());
        if (!in_parabolic(m, blk)) return false;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (blk[r] == blk[c] && m.at(r, c) != (r == c ? 1 : 0)) return false;
        return true;
    }
    static Mat levi_projection(const Mat& m, const std::vector<int>& blk) {
        Mat out;
        const int n = static_cast<int>(blk.size());
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (blk[r] == blk[c]) out.at(r, c) = m.at(r, c);
        return out;
    }

    ParabolicSubgroup standard_parabolic(unsigned subset) const {
        check_subset(subset);
        const auto blk = blocks(subset);
        ParabolicSubgroup p;
        p.levi_subset = subset;
        for (int i = 0; i < group_->order(); ++i) {
            const Mat& m = group_->element(i);
            if (!in_parabolic(m, blk)) continue;
            p.elements.push_back(i);
            if (in_levi(m, blk)) p.levi.push_back(i);
            if (in_radical(m, blk)) p.radical.push_back(i);
        }
        return p;
    }

    std::vector<int> unipotent_radical(const ParabolicSubgroup& p) const { return p.radical; }

    // Levi projection of an element of P_subset, as an index of G.
    int levi_part(int g, unsigned subset) const {
        return group_->index_of(levi_projection(group_->element(g), blocks(subset)));
    }

    LeviGroup levi_group(unsigned subset) const {
        check_subset(subset);
        const auto blk = blocks(subset);
        LeviGroup L;
        L.subset = subset;
        if (subset == full_mask()) {
            L.group = group_;
            for (int i = 0; i < group_->order(); ++i) {
                L.to_parent.push_back(i);
                L.from_parent.emplace(i, i);
            }
            return L;
        }
        std::vector<Mat> elems;
        for (int i = 0; i < group_->order(); ++i)
            if (in_levi(group_->element(i), blk)) elems.push_back(group_->element(i));
        L.group = FiniteGroup::from_elements(field_, spec_.n, elems,
                                             spec_.name() + " Levi " + subset_name(subset));
        for (int i = 0; i < L.group->order(); ++i) {
            int g = group_->index_of(L.group->element(i));
            L.to_parent.push_back(g);
            L.from_parent.emplace(g, i);
        }
        return L;
    }

    std::string subset_name(unsigned subset) const {
        std::string s = "{";
        bool first = true;
        for (int i = 0; i < rank(); ++i)
            if (subset & (1u << i)) {
                s += (first ? "" : ",") + std::to_string(i + 1);
                first = false;
            }
        return s + "}";
    }

private:
    void check_subset(unsigned subset) const {
        if (subset & ~full_mask()) throw std::invalid_argument("subset is not contained in the simple roots");
    }

    void add_root_pair(IntVec coeff, std::vector<std::array<int, 3>> entries) {
        GroupRoot pos{coeff, entries};
        for (auto& e : entries) std::swap(e[0], e[1]);
        GroupRoot neg{negate(coeff), entries};
        pos_.push_back(pos);
        neg_.push_back(neg);
    }

    void build_roots() {
        const int n = spec_.n;
        switch (spec_.kind) {
            case GroupKind::GL:
            case GroupKind::SL:
                for (int len = 1; len < n; ++len)
                    for (int i = 0; i + len < n; ++i) {
                        IntVec c(n - 1, 0);
                        for (int k = i; k < i + len; ++k) c[k] = 1;
                        add_root_pair(c, {{i, i + len, 1}});
                    }
                for (int i = 0; i + 1 < n; ++i) simple_lower_.push_back({{i + 1, i}});
                cartan_.assign(n - 1, std::vector<int>(n - 1, 0));
                for (int i = 0; i + 1 < n; ++i) {
                    cartan_[i][i] = 2;
                    if (i + 2 < n) cartan_[i][i + 1] = cartan_[i + 1][i] = -1;
                }
                break;
            case GroupKind::Sp4:
                // form with J(0,3) = J(1,2) = 1 and J(2,1) = J(3,0) = -1
                add_root_pair({1, 0}, {{0, 1, 1}, {2, 3, -1}});
                add_root_pair({0, 1}, {{1, 2, 1}});
                add_root_pair({1, 1}, {{0, 2, 1}, {1, 3, 1}});
                add_root_pair({2, 1}, {{0, 3, 1}});
                simple_lower_ = {{{1, 0}, {3, 2}}, {{2, 1}}};
                cartan_ = {{2, -1}, {-2, 2}};
                break;
            case GroupKind::SL2xSL2:
                add_root_pair({1, 0}, {{0, 1, 1}});
                add_root_pair({0, 1}, {{2, 3, 1}});
                simple_lower_ = {{{1, 0}}, {{3, 2}}};
                cartan_ = {{2, 0}, {0, 2}};
                break;
        }
        roots_ = pos_;
        roots_.insert(roots_.end(), neg_.begin(), neg_.end());
    }

    GroupSpec spec_;
    std::shared_ptr<const FiniteField> field_;
    std::shared_ptr<FiniteGroup> group_;
    std::vector<GroupRoot> pos_, neg_, roots_;
    std::vector<std::vector<std::pair<int, int>>> simple_lower_;
    std::vector<std::vector<int>> cartan_;
};

inline std::shared_ptr<const ReductiveGroup> build_group(const std::string& kind, int q, long cap = default_size_cap()) {
    return std::make_shared<const ReductiveGroup>(GroupSpec::parse(kind, q), cap);
}

inline ParabolicSubgroup standard_parabolic(const ReductiveGroup& g, unsigned subset) {
    return g.standard_parabolic(subset);
}

}  // namespace ep
