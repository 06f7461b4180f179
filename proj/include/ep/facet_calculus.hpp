#pragma once

// Counting facets of a simplex covered by a set of its faces, the complement
// facets F(Y), and the finiteness scan for permissible sets of walls.

#include "ep/apartment.hpp"

#include <sstream>

namespace ep {

// Number of k-facets lying in the union of m faces of an l-simplex.
inline long union_k_facet_count(int l, int m, int k) {
    if (l < 0 || m < 1 || m > l + 1 || k < 0 || k > l)
        throw std::invalid_argument("union_k_facet_count: parameters out of range");
    long s = 0;
    for (int r = 1; r <= m; ++r) {
        long term = binomial(l + 1 - r, k + 1) * binomial(m, r);
        s += (r % 2 == 1) ? term : -term;
    }
    return s;
}

// Direct count over vertex subsets. The chosen faces are those opposite the
// vertices 0..m-1; a vertex subset lies in the union iff it misses one of them.
inline long union_k_facet_count_enumerated(int l, int m, int k) {
    if (l < 0 || m < 1 || m > l + 1 || k < 0 || k > l)
        throw std::invalid_argument("union_k_facet_count: parameters out of range");
    const unsigned full = (1u << (l + 1)) - 1;
    const unsigned chosen = (1u << m) - 1;
    long count = 0;
    for (unsigned s = 1; s <= full; ++s) {
        if (__builtin_popcount(s) != k + 1) continue;
        if ((s & chosen) != chosen) ++count;
    }
    return count;
}

struct SimplexCensus {
    int l = 0;
    int m = 0;
    std::vector<long> union_counts;             // by k, from the formula
    std::vector<long> union_counts_enumerated;  // by k, by enumeration
    std::vector<long> complement_counts;        // by codimension j, C(l+1-m, j)
    std::vector<long> complement_counts_enumerated;
    long complement_total = 0;
    long complement_total_enumerated = 0;

    bool consistent() const {
        return union_counts == union_counts_enumerated && complement_counts == complement_counts_enumerated &&
               complement_total == complement_total_enumerated && complement_total == (1L << (l + 1 - m));
    }
};

inline SimplexCensus complement_census(int l, int m) {
    if (l < 0 || m < 1 || m > l + 1) throw std::invalid_argument("complement_census: parameters out of range");
    SimplexCensus c;
    c.l = l;
    c.m = m;
    for (int k = 0; k <= l; ++k) {
        c.union_counts.push_back(union_k_facet_count(l, m, k));
        c.union_counts_enumerated.push_back(union_k_facet_count_enumerated(l, m, k));
    }
    c.complement_counts.assign(l + 1, 0);
    c.complement_counts_enumerated.assign(l + 1, 0);
    for (int j = 0; j <= l; ++j) c.complement_counts[j] = binomial(l + 1 - m, j);
    c.complement_total = 1L << (l + 1 - m);
    const unsigned full = (1u << (l + 1)) - 1;
    const unsigned chosen = (1u << m) - 1;
    for (unsigned s = 1; s <= full; ++s) {
        if ((s & chosen) != chosen) continue;  // lies in the union
        int dim = __builtin_popcount(s) - 1;
        ++c.complement_counts_enumerated[l - dim];
        ++c.complement_total_enumerated;
    }
    return c;
}

// F(Y) for every subset Y of the complementary faces W. Faces are given by the
// index of their opposite vertex. Entry i corresponds to the i-th subset of W in
// bitmask order, so entry 0 is F(empty) = D.
struct ComplementFacet {
    std::vector<int> removed_faces;  // Y
    std::vector<int> vertex_types;   // vertices of F(Y)
    Facet facet;
};

inline std::vector<ComplementFacet> complement_facets(const Apartment& apt, const Chamber& d,
                                                      const std::vector<int>& faces) {
    const int n = apt.rank();
    if (faces.empty()) throw std::invalid_argument("complement_facets: empty face set");
    std::vector<int> w;
    for (int j = 0; j <= n; ++j)
        if (std::find(faces.begin(), faces.end(), j) == faces.end()) w.push_back(j);
    for (int f : faces)
        if (f < 0 || f > n) throw std::invalid_argument("complement_facets: face index out of range");
    std::vector<ComplementFacet> out;
    for (unsigned mask = 0; mask < (1u << w.size()); ++mask) {
        ComplementFacet cf;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (mask & (1u << i)) cf.removed_faces.push_back(w[i]);
        // intersecting faces removes their opposite vertices
        for (int t = 0; t <= n; ++t)
            if (std::find(cf.removed_faces.begin(), cf.removed_faces.end(), t) == cf.removed_faces.end())
                cf.vertex_types.push_back(t);
        cf.facet = apt.sub_facet(d, cf.vertex_types);
        out.push_back(std::move(cf));
    }
    return out;
}

struct PermissibleSet {
    std::vector<AffineRoot> pairs;  // one representative of each pair, positive gradient
};

struct PermissibleScan {
    int rmax = 0;
    std::vector<long> count_within;  // qualifying chambers in Ball(r), r = 0..2*rmax
    std::vector<int> chambers;       // indices into the ball of radius 2*rmax
    long incident = 0;               // incident chambers in the largest ball
    bool stable = false;             // count at rmax equals count at 2*rmax
    Ball ball;
};

inline AffineRoot normalize_pair(const RootSystem& rs, const AffineRoot& psi) {
    int idx = rs.index_of(psi.gradient);
    if (idx < 0) throw std::invalid_argument("affine root gradient is not a root");
    return rs.is_positive(idx) ? psi : -psi;
}

inline std::string describe(const AffineRoot& psi) {
    std::ostringstream s;
    s << "(";
    for (std::size_t i = 0; i < psi.gradient.size(); ++i) s << (i ? "," : "") << psi.gradient[i];
    s << ")" << (psi.level >= 0 ? "+" : "") << psi.level;
    return s.str();
}

inline PermissibleSet make_permissible(const RootSystem& rs, const std::vector<AffineRoot>& pairs) {
    PermissibleSet x;
    for (const auto& p : pairs) x.pairs.push_back(normalize_pair(rs, p));
    std::vector<IntVec> grads;
    for (const auto& p : x.pairs) grads.push_back(p.gradient);
    if (matrix_rank(grads) != static_cast<int>(grads.size())) {
        std::string msg = "not permissible: linearly dependent gradients";
        for (const auto& p : x.pairs) msg += " " + describe(p);
        throw std::invalid_argument(msg);
    }
    return x;
}

inline std::vector<AffineRoot> chamber_walls(const Apartment& apt, const Chamber& d, const std::vector<int>& faces) {
    std::vector<AffineRoot> out;
    for (int j : faces) out.push_back(apt.face(d, j).wall);
    std::sort(out.begin(), out.end());
    return out;
}

inline PermissibleScan permissible_scan(const Apartment& apt, const PermissibleSet& x, const Chamber& c0, int rmax) {
    PermissibleScan scan;
    scan.rmax = rmax;
    scan.ball = apt.ball(c0, 2 * rmax);
    std::vector<AffineRoot> target = x.pairs;
    std::sort(target.begin(), target.end());
    scan.count_within.assign(2 * rmax + 1, 0);
    for (std::size_t i = 0; i < scan.ball.size(); ++i) {
        const auto& d = scan.ball.chambers[i];
        std::vector<int> all(apt.rank() + 1);
        std::iota(all.begin(), all.end(), 0);
        auto walls = chamber_walls(apt, d, all);
        if (!std::includes(walls.begin(), walls.end(), target.begin(), target.end())) continue;
        ++scan.incident;
        if (d == c0) continue;
        auto cp = apt.classify_faces(c0, d);
        if (chamber_walls(apt, d, cp.children) != target) continue;
        scan.chambers.push_back(static_cast<int>(i));
        for (int r = scan.ball.depth[i]; r <= 2 * rmax; ++r) ++scan.count_within[r];
    }
    if (scan.incident == 0) {
        std::string msg = "not permissible: no incident chamber within radius " + std::to_string(2 * rmax);
        for (const auto& p : x.pairs) msg += " " + describe(p);
        throw std::invalid_argument(msg);
    }
    scan.stable = scan.count_within[rmax] == scan.count_within[2 * rmax];
    return scan;
}

}  // namespace ep
