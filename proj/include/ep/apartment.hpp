#pragma once

// Alcove geometry of the apartment. Chamber vertices are kept as integer
// vectors in coweight coordinates multiplied by a fixed scale (the lcm of the
// marks of the highest root), which makes every vertex of every alcove integral.
// Vertex j of a chamber is the image of vertex j of the fundamental alcove, and
// face j is the face opposite vertex j.

#include "ep/affine_roots.hpp"

#include <memory>
#include <optional>
#include <unordered_map>

namespace ep {

struct IntVecHash {
    std::size_t operator()(const IntVec& v) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (long x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

struct Facet {
    std::vector<IntVec> vertices;  // scaled coordinates, sorted
    long scale = 1;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
    bool operator==(const Facet& o) const { return vertices == o.vertices; }
    bool operator<(const Facet& o) const { return vertices < o.vertices; }

    bool contains(const Facet& o) const {
        return std::includes(vertices.begin(), vertices.end(), o.vertices.begin(), o.vertices.end());
    }

    std::vector<RatVec> rational_vertices() const {
        std::vector<RatVec> out;
        for (const auto& v : vertices) {
            RatVec r;
            for (long x : v) r.emplace_back(x, scale);
            for (auto& y : r) y.canonicalize();
            out.push_back(r);
        }
        return out;
    }

    RatVec barycenter() const {
        const std::size_t n = vertices.at(0).size();
        RatVec b(n, Rational(0));
        for (const auto& v : vertices)
            for (std::size_t i = 0; i < n; ++i) b[i] += v[i];
        for (auto& x : b) {
            x /= Rational(scale * static_cast<long>(vertices.size()));
            x.canonicalize();
        }
        return b;
    }
};

struct Chamber {
    std::vector<IntVec> vertices;  // scaled; vertex j has type j
    IntVec key;                    // floor of gamma(barycenter) over the positive roots

    bool operator==(const Chamber& o) const { return key == o.key; }
};

struct FaceRecord {
    int index = 0;       // face opposite vertex `index`
    Facet facet;
    AffineRoot wall;     // vanishing affine root with positive gradient
    AffineRoot outward;  // the sign of the wall that is positive beyond the face
    int wall_root = 0;   // index of grad(wall) in the root system
};

struct HeightProfile {
    std::vector<long> counts;  // one per positive root
    long total = 0;
};

struct ChildParent {
    std::vector<int> children;  // face indices
    std::vector<int> parents;
};

struct LeviRadicalSplit {
    std::vector<int> band_pairs;        // positive root indices of type (ii) pairs
    std::vector<int> separating_roots;  // oriented type (i) roots, i.e. Phi(C0, D)
};

class Ball {
public:
    std::vector<Chamber> chambers;
    std::vector<int> depth;
    std::vector<std::vector<int>> shells;
    std::unordered_map<IntVec, int, IntVecHash> index;

    int radius() const { return static_cast<int>(shells.size()) - 1; }
    std::size_t size() const { return chambers.size(); }
    std::size_t size_within(int m) const {
        std::size_t s = 0;
        for (int j = 0; j <= m && j <= radius(); ++j) s += shells[j].size();
        return s;
    }
    int find(const Chamber& c) const {
        auto it = index.find(c.key);
        return it == index.end() ? -1 : it->second;
    }
};

class Apartment {
public:
    explicit Apartment(std::shared_ptr<const RootSystem> rs) : rs_(std::move(rs)) {
        const int n = rs_->rank();
        scale_ = 1;
        for (long m : rs_->marks()) scale_ = std::lcm(scale_, m);
        std::vector<IntVec> verts;
        verts.push_back(IntVec(n, 0));
        for (int i = 0; i < n; ++i) {
            IntVec v(n, 0);
            v[i] = scale_ / rs_->marks()[i];
            verts.push_back(v);
        }
        c0_ = make_chamber(std::move(verts));
    }
    explicit Apartment(const CartanType& t) : Apartment(std::make_shared<const RootSystem>(t)) {}

    const RootSystem& roots() const { return *rs_; }
    std::shared_ptr<const RootSystem> roots_ptr() const { return rs_; }
    long scale() const { return scale_; }
    int rank() const { return rs_->rank(); }
    const Chamber& fundamental_chamber() const { return c0_; }

    Chamber make_chamber(std::vector<IntVec> verts) const {
        Chamber c;
        c.vertices = std::move(verts);
        IntVec sum(rank(), 0);
        for (const auto& v : c.vertices)
            for (int i = 0; i < rank(); ++i) sum[i] += v[i];
        const long den = scale_ * (rank() + 1);
        c.key.resize(rs_->num_positive());
        for (int r = 0; r < rs_->num_positive(); ++r) {
            long val = dot(rs_->root(r), sum);
            if (val % den == 0) throw std::logic_error("barycenter on a wall");
            c.key[r] = floor_div(val, den);
        }
        return c;
    }

    RatVec barycenter(const Chamber& c) const { return as_facet(c).barycenter(); }

    Facet as_facet(const Chamber& c) const { return make_facet(c.vertices); }

    Facet make_facet(std::vector<IntVec> verts) const {
        std::sort(verts.begin(), verts.end());
        return Facet{std::move(verts), scale_};
    }

    // Facet spanned by the vertices of c whose types are listed.
    Facet sub_facet(const Chamber& c, const std::vector<int>& types) const {
        std::vector<IntVec> v;
        for (int t : types) v.push_back(c.vertices.at(t));
        return make_facet(std::move(v));
    }

    // Floor of gamma(barycenter) for an arbitrary root index.
    long floor_value(const Chamber& c, int root_index) const {
        if (rs_->is_positive(root_index)) return c.key[root_index];
        return -c.key[rs_->negative_of(root_index)] - 1;
    }

    FaceRecord face(const Chamber& c, int j) const {
        const int n = rank();
        if (j < 0 || j > n) throw std::invalid_argument("face index out of range");
        for (int r = 0; r < rs_->num_positive(); ++r) {
            const IntVec& g = rs_->root(r);
            bool first = true;
            long val = 0;
            bool ok = true;
            for (int k = 0; k <= n && ok; ++k) {
                if (k == j) continue;
                long v = dot(g, c.vertices[k]);
                if (first) {
                    val = v;
                    first = false;
                } else if (v != val) {
                    ok = false;
                }
            }
            if (!ok || val % scale_ != 0) continue;
            FaceRecord f;
            f.index = j;
            std::vector<int> types;
            for (int k = 0; k <= n; ++k)
                if (k != j) types.push_back(k);
            f.facet = sub_facet(c, types);
            f.wall = AffineRoot{g, -val / scale_};
            f.wall_root = r;
            long at_opposite = dot(g, c.vertices[j]) - val;  // scaled wall value at vertex j
            f.outward = at_opposite < 0 ? f.wall : -f.wall;
            return f;
        }
        throw std::logic_error("face without a wall");
    }

    std::vector<FaceRecord> faces_of(const Chamber& c) const {
        std::vector<FaceRecord> out;
        for (int j = 0; j <= rank(); ++j) out.push_back(face(c, j));
        return out;
    }

    Chamber reflect_across(const Chamber& c, int j) const {
        return reflect_unchecked(c, face(c, j));
    }

    Chamber reflect_across(const Chamber& c, const FaceRecord& f) const {
        if (f.index < 0 || f.index > rank() || !(face(c, f.index).facet == f.facet))
            throw std::invalid_argument("face does not belong to chamber");
        return reflect_unchecked(c, f);
    }

    Chamber reflect_unchecked(const Chamber& c, const FaceRecord& f) const {
        std::vector<IntVec> verts = c.vertices;
        IntVec& v = verts[f.index];
        long wall_val = dot(f.wall.gradient, v) + f.wall.level * scale_;
        const IntVec& cv = rs_->coroot(f.wall_root);
        for (int i = 0; i < rank(); ++i) v[i] -= wall_val * cv[i];
        return make_chamber(std::move(verts));
    }

    long separation_count(const Chamber& a, const Chamber& b, int root_index) const {
        if (root_index < 0 || root_index >= rs_->num_roots())
            throw std::invalid_argument("not a root index");
        int r = rs_->is_positive(root_index) ? root_index : rs_->negative_of(root_index);
        return std::labs(a.key[r] - b.key[r]);
    }

    long separation_count(const Chamber& a, const Chamber& b, const IntVec& gamma) const {
        int idx = rs_->index_of(gamma);
        if (idx < 0) throw std::invalid_argument("gradient is not a root");
        return separation_count(a, b, idx);
    }

    HeightProfile height(const Chamber& c0, const Chamber& d) const {
        HeightProfile h;
        for (int r = 0; r < rs_->num_positive(); ++r) {
            h.counts.push_back(std::labs(c0.key[r] - d.key[r]));
            h.total += h.counts.back();
        }
        return h;
    }
    long height_total(const Chamber& c0, const Chamber& d) const {
        long t = 0;
        for (int r = 0; r < rs_->num_positive(); ++r) t += std::labs(c0.key[r] - d.key[r]);
        return t;
    }

    Ball ball(const Chamber& c0, int m) const {
        Ball b;
        b.chambers.push_back(c0);
        b.depth.push_back(0);
        b.index[c0.key] = 0;
        b.shells.push_back({0});
        for (int d = 0; d < m; ++d) {
            std::vector<int> next;
            for (int idx : b.shells[d]) {
                for (int j = 0; j <= rank(); ++j) {
                    Chamber n = reflect_across(b.chambers[idx], j);
                    if (b.index.count(n.key)) continue;
                    int id = static_cast<int>(b.chambers.size());
                    b.index[n.key] = id;
                    b.chambers.push_back(std::move(n));
                    b.depth.push_back(d + 1);
                    next.push_back(id);
                }
            }
            b.shells.push_back(std::move(next));
        }
        return b;
    }
    Ball ball(int m) const { return ball(c0_, m); }

    long gallery_distance(const Chamber& c0, const Chamber& d, long limit = 1000) const {
        if (c0 == d) return 0;
        std::unordered_map<IntVec, int, IntVecHash> seen;
        std::vector<Chamber> frontier{c0};
        seen[c0.key] = 0;
        for (long depth = 1; depth <= limit && !frontier.empty(); ++depth) {
            std::vector<Chamber> next;
            for (const auto& c : frontier)
                for (int j = 0; j <= rank(); ++j) {
                    Chamber n = reflect_across(c, j);
                    if (n == d) return depth;
                    if (seen.emplace(n.key, 0).second) next.push_back(std::move(n));
                }
            frontier = std::move(next);
        }
        throw std::runtime_error("gallery distance exceeds search limit");
    }

    ChildParent classify_faces(const Chamber& c0, const Chamber& d) const {
        ChildParent cp;
        long h = height_total(c0, d);
        for (int j = 0; j <= rank(); ++j) {
            long h2 = height_total(c0, reflect_across(d, j));
            if (h2 == h + 1)
                cp.children.push_back(j);
            else if (h2 == h - 1)
                cp.parents.push_back(j);
            else
                throw std::logic_error("adjacent height differs by more than one");
        }
        return cp;
    }

    // Vertex types of D_+ (the intersection of the child faces). Empty optional for C0.
    std::optional<std::vector<int>> d_plus_types(const Chamber& c0, const Chamber& d) const {
        if (c0 == d) return std::nullopt;
        ChildParent cp = classify_faces(c0, d);
        std::vector<int> types;
        for (int t = 0; t <= rank(); ++t)
            if (std::find(cp.children.begin(), cp.children.end(), t) == cp.children.end()) types.push_back(t);
        return types;
    }

    std::optional<Facet> d_plus(const Chamber& c0, const Chamber& d) const {
        auto t = d_plus_types(c0, d);
        if (!t) return std::nullopt;
        return sub_facet(d, *t);
    }

    // Vertex-type subsets of the facets in F_+(D), ordered by bitmask.
    std::vector<std::vector<int>> f_plus_types(const Chamber& c0, const Chamber& d) const {
        std::vector<int> base;
        if (auto t = d_plus_types(c0, d)) base = *t;
        std::vector<int> free;
        for (int k = 0; k <= rank(); ++k)
            if (std::find(base.begin(), base.end(), k) == base.end()) free.push_back(k);
        std::vector<std::vector<int>> out;
        for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
            std::vector<int> s = base;
            for (std::size_t i = 0; i < free.size(); ++i)
                if (mask & (1u << i)) s.push_back(free[i]);
            if (s.empty()) continue;
            std::sort(s.begin(), s.end());
            out.push_back(s);
        }
        return out;
    }

    std::vector<Facet> f_plus(const Chamber& c0, const Chamber& d) const {
        std::vector<Facet> out;
        for (const auto& t : f_plus_types(c0, d)) out.push_back(sub_facet(d, t));
        return out;
    }

    // All affine roots vanishing on E, sorted by gradient index; optionally
    // restricted to gradients in a positive system.
    std::vector<AffineRoot> facet_affine_roots(const Facet& e, const PositiveSystem* ps = nullptr) const {
        std::vector<AffineRoot> out;
        for (int r = 0; r < rs_->num_roots(); ++r) {
            if (ps && !std::binary_search(ps->roots.begin(), ps->roots.end(), r)) continue;
            const IntVec& g = rs_->root(r);
            long val = dot(g, e.vertices[0]);
            bool ok = val % scale_ == 0;
            for (std::size_t k = 1; k < e.vertices.size() && ok; ++k) ok = dot(g, e.vertices[k]) == val;
            if (ok) out.push_back(AffineRoot{g, -val / scale_});
        }
        return out;
    }

    // Sign of an affine root on a chamber: +1 or -1 (never zero on the interior).
    int sign_on(const AffineRoot& psi, const Chamber& c) const {
        Rational v = psi(barycenter(c));
        return v > 0 ? 1 : -1;
    }

    bool sector_membership(const Chamber& c0, const PositiveSystem& ps, const Chamber& d) const {
        for (int r : ps.roots)
            if (floor_value(d, r) < floor_value(c0, r)) return false;
        return true;
    }

    std::vector<int> sectors_containing(const Chamber& c0, const Chamber& d) const {
        std::vector<int> out;
        const auto& sys = rs_->positive_systems();
        for (std::size_t i = 0; i < sys.size(); ++i)
            if (sector_membership(c0, sys[i], d)) out.push_back(static_cast<int>(i));
        return out;
    }

    LeviRadicalSplit levi_radical_split(const Chamber& c0, const Chamber& d) const {
        LeviRadicalSplit s;
        for (int r = 0; r < rs_->num_positive(); ++r) {
            long diff = d.key[r] - c0.key[r];
            if (diff == 0)
                s.band_pairs.push_back(r);
            else
                s.separating_roots.push_back(diff > 0 ? r : rs_->negative_of(r));
        }
        std::sort(s.separating_roots.begin(), s.separating_roots.end());
        return s;
    }

    // Affine isometries x -> w x + t preserving the fundamental alcove, returned
    // as (Weyl index, scaled translation).
    std::vector<std::pair<int, IntVec>> alcove_symmetries() const {
        std::vector<std::pair<int, IntVec>> out;
        std::vector<IntVec> base = c0_.vertices;
        std::sort(base.begin(), base.end());
        const auto& W = rs_->weyl_group();
        for (std::size_t k = 0; k < W.size(); ++k) {
            for (const auto& t : c0_.vertices) {
                std::vector<IntVec> img;
                for (const auto& v : c0_.vertices) img.push_back(apply_affine(static_cast<int>(k), t, v));
                std::sort(img.begin(), img.end());
                if (img == base) out.emplace_back(static_cast<int>(k), t);
            }
        }
        return out;
    }

    IntVec apply_affine(int weyl_index, const IntVec& t, const IntVec& v) const {
        const auto& m = rs_->weyl_group()[weyl_index].matrix;
        IntVec r(rank(), 0);
        for (int i = 0; i < rank(); ++i) {
            for (int j = 0; j < rank(); ++j) r[i] += m[i][j] * v[j];
            r[i] += t[i];
        }
        return r;
    }

    Chamber apply_affine(int weyl_index, const IntVec& t, const Chamber& c) const {
        std::vector<IntVec> verts;
        for (const auto& v : c.vertices) verts.push_back(apply_affine(weyl_index, t, v));
        return make_chamber(std::move(verts));
    }

private:
    std::shared_ptr<const RootSystem> rs_;
    long scale_ = 1;
    Chamber c0_;
};

}  // namespace ep
