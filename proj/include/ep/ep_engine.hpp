#pragma once

// The Euler-Poincare engine. It ties the apartment geometry to the finite
// reductive quotients: the residue at a facet E of a chamber D is a finite
// group whose Borel subgroup corresponds to D, and the facets K with
// E <= K <= D correspond to the standard parabolics P_{A(K)}, where A(K) is
// the set of walls of D containing K.
//
// On top of that correspondence the engine provides
//   * certificates for the vanishing of the shell increment at a chamber,
//     together with the exact residue-level convolution that they predict,
//   * a graded model of the depth-r quotients, and
//   * truncated Euler-Poincare sums over balls of chambers.

#include "ep/apartment.hpp"
#include "ep/facet_calculus.hpp"
#include "ep/harish_chandra.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <set>

namespace ep {

// ---------------------------------------------------------------------------
// Residues

namespace detail {

// Integer coordinates of target in the span of basis (which must be linearly
// independent). Throws when the target is outside the span or the
// coordinates are not integral.
inline IntVec integer_coordinates(const std::vector<IntVec>& basis, const IntVec& target) {
    const int r = static_cast<int>(basis.size());
    if (r == 0) {
        for (long x : target)
            if (x) throw std::domain_error("vector outside an empty span");
        return {};
    }
    const int n = static_cast<int>(target.size());
    std::vector<RatVec> rows;
    RatVec rhs;
    for (int i = 0; i < n && static_cast<int>(rows.size()) < r; ++i) {
        RatVec row;
        for (int j = 0; j < r; ++j) row.emplace_back(basis[j][i]);
        auto trial = rows;
        trial.push_back(row);
        if (matrix_rank(trial) == static_cast<int>(trial.size())) {
            rows.push_back(row);
            rhs.emplace_back(target[i]);
        }
    }
    if (static_cast<int>(rows.size()) < r) throw std::domain_error("dependent basis");
    RatVec sol = solve(rows, rhs);
    IntVec out;
    for (const auto& x : sol) {
        if (!is_integer(x)) throw std::domain_error("non-integral coordinates");
        out.push_back(x.get_num().get_si());
    }
    for (int i = 0; i < n; ++i) {
        long s = 0;
        for (int j = 0; j < r; ++j) s += out[j] * basis[j][i];
        if (s != target[i]) throw std::domain_error("vector outside the span");
    }
    return out;
}

inline bool has_type(const std::vector<int>& types, int t) {
    return std::find(types.begin(), types.end(), t) != types.end();
}

inline std::string join_types(const std::vector<int>& types) {
    std::string s = "{";
    for (std::size_t i = 0; i < types.size(); ++i) s += (i ? "," : "") + std::to_string(types[i]);
    return s + "}";
}

}  // namespace detail

struct ResidueDatum {
    Chamber chamber;
    std::vector<int> facet_types;
    Facet facet;
    std::vector<int> walls;               // faces of the chamber that contain the facet
    std::vector<AffineRoot> simple;       // wall roots, positive on the chamber
    std::vector<AffineRoot> roots;        // every affine root vanishing on the facet
    std::vector<IntVec> coefficients;     // of each root in `simple`
    std::vector<std::vector<int>> cartan;  // cartan[i][j] = <b_i, b_j^vee>

    int rank() const { return static_cast<int>(walls.size()); }
    unsigned full_mask() const { return (1u << rank()) - 1; }

    // A(K) for a facet K of the chamber containing the facet: the walls that contain K.
    unsigned subset_for(const std::vector<int>& k_types) const {
        for (int t : facet_types)
            if (!detail::has_type(k_types, t)) throw std::invalid_argument("facet does not contain the residue facet");
        unsigned a = 0;
        for (int i = 0; i < rank(); ++i)
            if (!detail::has_type(k_types, walls[i])) a |= 1u << i;
        return a;
    }

    // Vertex types of the facet K with A(K) = a.
    std::vector<int> types_for(unsigned a) const {
        std::vector<int> t = facet_types;
        for (int i = 0; i < rank(); ++i)
            if (!(a & (1u << i))) t.push_back(walls[i]);
        std::sort(t.begin(), t.end());
        return t;
    }

    int find_root(const IntVec& c) const {
        for (std::size_t i = 0; i < coefficients.size(); ++i)
            if (coefficients[i] == c) return static_cast<int>(i);
        return -1;
    }

    // Dynkin label, components joined by "x" in order of their least node.
    std::string dynkin() const {
        const int n = rank();
        if (n == 0) return "trivial";
        std::vector<int> comp(n, -1);
        int nc = 0;
        for (int s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::vector<int> stack{s};
            comp[s] = nc;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (int v = 0; v < n; ++v)
                    if (cartan[u][v] != 0 && comp[v] < 0) {
                        comp[v] = nc;
                        stack.push_back(v);
                    }
            }
            ++nc;
        }
        std::string out;
        for (int c = 0; c < nc; ++c) {
            std::vector<int> nodes;
            for (int i = 0; i < n; ++i)
                if (comp[i] == c) nodes.push_back(i);
            const int k = static_cast<int>(nodes.size());
            int max_bond = 1, edges = 0;
            std::vector<int> degree(n, 0);
            for (int a : nodes)
                for (int b : nodes)
                    if (a < b && cartan[a][b] != 0) {
                        max_bond = std::max(max_bond, cartan[a][b] * cartan[b][a]);
                        ++edges;
                        ++degree[a];
                        ++degree[b];
                    }
            std::string name;
            if (max_bond == 3) name = "G2";
            else if (max_bond == 1) {
                bool path = edges == k - 1 && *std::max_element(degree.begin(), degree.end()) <= 2;
                name = (path ? "A" : "D") + std::to_string(k);
            } else if (k == 2) name = "C2";
            else {
                // the end node on the double bond is long in type C and short in type B
                name = "B" + std::to_string(k);
                for (int a : nodes)
                    for (int b : nodes)
                        if (cartan[a][b] == -2 && degree[a] == 1) name = "C" + std::to_string(k);
            }
            out += (out.empty() ? "" : "x") + name;
        }
        return out;
    }
};

inline ResidueDatum residue_datum(const Apartment& apt, const Chamber& d, const std::vector<int>& e_types) {
    const RootSystem& rs = apt.roots();
    ResidueDatum rd;
    rd.chamber = d;
    rd.facet_types = e_types;
    std::sort(rd.facet_types.begin(), rd.facet_types.end());
    if (rd.facet_types.empty()) throw std::invalid_argument("empty facet");
    for (int t : rd.facet_types)
        if (t < 0 || t > apt.rank()) throw std::invalid_argument("vertex type out of range");
    rd.facet = apt.sub_facet(d, rd.facet_types);
    std::vector<IntVec> grads;
    for (int j = 0; j <= apt.rank(); ++j) {
        if (detail::has_type(rd.facet_types, j)) continue;
        rd.walls.push_back(j);
        AffineRoot psi = -apt.face(d, j).outward;
        rd.simple.push_back(psi);
        grads.push_back(psi.gradient);
    }
    rd.roots = apt.facet_affine_roots(rd.facet);
    for (const auto& psi : rd.roots) {
        IntVec c = detail::integer_coordinates(grads, psi.gradient);
        bool nonneg = true, nonpos = true;
        for (long x : c) {
            nonneg &= x >= 0;
            nonpos &= x <= 0;
        }
        if (!nonneg && !nonpos) throw std::logic_error("residue root with mixed signs");
        rd.coefficients.push_back(c);
    }
    const int n = rd.rank();
    rd.cartan.assign(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rd.cartan[i][j] = static_cast<int>(rs.pairing(grads[i], rs.index_of(grads[j])));
    return rd;
}

struct ResidueInstance {
    bool supported = false;
    std::string dynkin;
    std::string reason;  // why the residue was skipped
    std::shared_ptr<const ReductiveGroup> group;
    std::vector<int> perm;  // residue simple root i -> group simple root perm[i]

    unsigned group_subset(unsigned a) const {
        unsigned s = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            if (a & (1u << i)) s |= 1u << perm[i];
        return s;
    }
    int group_root(const IntVec& c) const {
        IntVec g(perm.size(), 0);
        for (std::size_t i = 0; i < perm.size(); ++i) g[perm[i]] = c[i];
        const auto& roots = group->roots();
        for (std::size_t b = 0; b < roots.size(); ++b)
            if (roots[b].coefficients == g) return static_cast<int>(b);
        return -1;
    }
};

// Outcome of sum_A (-1)^|A| e_{P_A,L} * e_V for one subgroup V of a residue.
struct ResidueVanishing {
    std::string group;
    std::vector<int> generating_roots;  // group root indices generating V
    int subgroup_order = 1;
    std::optional<unsigned> standard_radical;  // A with V = rad(P_A), if any
    bool radical_sum_zero = false;             // the same sum with e_{rad P_A}
    std::vector<bool> class_zero;              // one entry per cuspidal class
    bool all_zero() const {
        if (!radical_sum_zero) return false;
        for (bool z : class_zero)
            if (!z) return false;
        return true;
    }
};

inline std::vector<int> generated_subgroup(const FiniteGroup& g, const std::vector<int>& gens) {
    std::vector<char> seen(g.order(), 0);
    std::vector<int> out{0};
    seen[0] = 1;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int s : gens) {
            int y = g.mul(out[i], s);
            if (!seen[y]) {
                seen[y] = 1;
                out.push_back(y);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

// Memoizes residue groups, their Harish-Chandra data and residue-level
// vanishing computations. Not thread-safe.
class ResidueLibrary {
public:
    explicit ResidueLibrary(long cap = default_size_cap()) : cap_(cap) {}

    std::shared_ptr<const ReductiveGroup> group(const std::string& type, int q) {
        const std::string key = type + "/" + std::to_string(q);
        auto it = groups_.find(key);
        if (it != groups_.end()) return it->second;
        auto g = build_group(type, q, cap_);
        groups_.emplace(key, g);
        return g;
    }

    std::shared_ptr<const HarishChandraData> harish_chandra(const std::shared_ptr<const ReductiveGroup>& g) {
        auto it = hc_.find(g->name());
        if (it != hc_.end()) return it->second;
        auto h = std::make_shared<const HarishChandraData>(g);
        hc_.emplace(g->name(), h);
        return h;
    }

    ResidueInstance instantiate(const ResidueDatum& rd, int q) {
        ResidueInstance inst;
        inst.dynkin = rd.dynkin();
        const int n = rd.rank();
        for (const auto& [type, cartan] : candidates(n)) {
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                bool ok = true;
                for (int i = 0; i < n && ok; ++i)
                    for (int j = 0; j < n && ok; ++j) ok = rd.cartan[i][j] == cartan[perm[i]][perm[j]];
                if (!ok) continue;
                try {
                    inst.group = group(type, q);
                } catch (const std::exception& e) {
                    inst.reason = e.what();
                    return inst;
                }
                if (inst.group->cartan() != cartan) throw std::logic_error("unexpected Cartan matrix for " + type);
                inst.perm = perm;
                inst.supported = true;
                return inst;
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        inst.reason = "residue of type " + inst.dynkin + " has no supported group";
        return inst;
    }

    // V is generated by the root subgroups of the listed group roots.
    ResidueVanishing vanishing(const ResidueInstance& inst, std::vector<int> roots) {
        if (!inst.supported) throw std::invalid_argument("unsupported residue");
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        std::string key = inst.group->name();
        for (int b : roots) key += "," + std::to_string(b);
        auto it = vanishing_.find(key);
        if (it != vanishing_.end()) return it->second;

        const ReductiveGroup& g = *inst.group;
        const FiniteGroup& G = g.group();
        auto hc = harish_chandra(inst.group);
        ResidueVanishing res;
        res.group = g.name();
        res.generating_roots = roots;
        std::vector<int> gens;
        for (int b : roots)
            for (int t : g.field().additive_basis()) gens.push_back(G.index_of(g.root_element(b, t)));
        const auto v = generated_subgroup(G, gens);
        res.subgroup_order = static_cast<int>(v.size());
        for (unsigned A = 0; A <= g.full_mask(); ++A)
            if (g.standard_parabolic(A).radical == v) res.standard_radical = A;
        const auto eV = subgroup_idempotent(hc->finite_group(), hc->conductor(), v);
        const auto& parts = parabolic_parts(*hc);
        AlgebraElement rad_sum(hc->finite_group(), hc->conductor());
        for (unsigned A = 0; A <= g.full_mask(); ++A) {
            if (rank_sign(A) > 0) rad_sum += parts.radicals[A];
            else rad_sum -= parts.radicals[A];
        }
        res.radical_sum_zero = convolve(rad_sum, eV).is_zero();
        for (std::size_t c = 0; c < hc->classes().size(); ++c) {
            AlgebraElement s(hc->finite_group(), hc->conductor());
            for (unsigned A = 0; A <= g.full_mask(); ++A) {
                if (rank_sign(A) > 0) s += parts.blocks[c][A];
                else s -= parts.blocks[c][A];
            }
            res.class_zero.push_back(convolve(s, eV).is_zero());
        }
        vanishing_.emplace(key, res);
        return res;
    }

private:
    struct ParabolicParts {
        std::vector<AlgebraElement> radicals;            // e_{rad P_A}
        std::vector<std::vector<AlgebraElement>> blocks;  // [class][A] -> e_{P_A,L}
    };

    const ParabolicParts& parabolic_parts(const HarishChandraData& hc) {
        auto it = parts_.find(hc.group().name());
        if (it != parts_.end()) return it->second;
        ParabolicParts p;
        const unsigned full = hc.group().full_mask();
        for (unsigned A = 0; A <= full; ++A) p.radicals.push_back(hc.radical_idempotent(A));
        for (std::size_t c = 0; c < hc.classes().size(); ++c) {
            std::vector<AlgebraElement> row;
            for (unsigned A = 0; A <= full; ++A)
                row.push_back(convolve(hc.block_idempotent(A, static_cast<int>(c)), p.radicals[A]));
            p.blocks.push_back(std::move(row));
        }
        return parts_.emplace(hc.group().name(), std::move(p)).first->second;
    }

    static std::vector<std::pair<std::string, std::vector<std::vector<int>>>> candidates(int n) {
        switch (n) {
            case 0: return {{"SL1", {}}};
            case 1: return {{"SL2", {{2}}}};
            case 2:
                return {{"SL3", {{2, -1}, {-1, 2}}}, {"Sp4", {{2, -1}, {-2, 2}}}, {"SL2xSL2", {{2, 0}, {0, 2}}}};
            default: return {};
        }
    }

    long cap_;
    std::map<std::string, std::shared_ptr<const ReductiveGroup>> groups_;
    std::map<std::string, std::shared_ptr<const HarishChandraData>> hc_;
    std::map<std::string, ParabolicParts> parts_;
    std::map<std::string, ResidueVanishing> vanishing_;
};

inline ResidueInstance instantiate_residue(const ResidueDatum& rd, int q, ResidueLibrary& lib) {
    return lib.instantiate(rd, q);
}

// Residue-level check for the subgroup generated by the root subgroups of the
// given affine roots (all vanishing on the residue facet).
inline ResidueVanishing residue_vanishing(const ResidueDatum& rd, const ResidueInstance& inst,
                                          const std::vector<AffineRoot>& generators, ResidueLibrary& lib) {
    std::vector<int> group_roots;
    for (const auto& psi : generators) {
        auto it = std::find(rd.roots.begin(), rd.roots.end(), psi);
        if (it == rd.roots.end()) throw std::invalid_argument("affine root does not vanish on the residue facet");
        int b = inst.group_root(rd.coefficients[it - rd.roots.begin()]);
        if (b < 0) throw std::logic_error("residue root without a group root");
        group_roots.push_back(b);
    }
    return lib.vanishing(inst, group_roots);
}

// Checks that K -> P_{A(K)} reverses inclusion and is injective, using the
// element sets of the parabolics of the instantiated residue.
inline VerificationReport facet_parabolic_correspondence(const ResidueDatum& rd, const ResidueInstance& inst) {
    VerificationReport rep;
    rep.group = inst.group->name();
    const unsigned full = rd.full_mask();
    std::vector<std::vector<int>> p;
    for (unsigned a = 0; a <= full; ++a) p.push_back(inst.group->standard_parabolic(inst.group_subset(a)).elements);
    for (unsigned a = 0; a <= full; ++a)
        for (unsigned b = 0; b <= full; ++b) {
            const auto ka = rd.types_for(a), kb = rd.types_for(b);
            const bool facet_le = std::includes(kb.begin(), kb.end(), ka.begin(), ka.end());
            const bool group_ge = std::includes(p[a].begin(), p[a].end(), p[b].begin(), p[b].end());
            rep.checks.push_back({"order-reversing", "K=" + detail::join_types(ka) + " K'=" + detail::join_types(kb),
                                  facet_le == group_ge});
            if (a < b) rep.checks.push_back({"injective", "A=" + std::to_string(a) + " B=" + std::to_string(b), p[a] != p[b]});
        }
    return rep;
}

// Depth-zero shell increment at D for the subgroup V of the residue at D_+:
// sum over K in F_+(D) of (-1)^dim K e_{P_{A(K)},L} * e_V.
inline ResidueVanishing depth_zero_shell_vanishing(const Apartment& apt, const Chamber& c0, const Chamber& d, int q,
                                                   const std::vector<AffineRoot>& v_generators, ResidueLibrary& lib) {
    auto types = apt.d_plus_types(c0, d);
    if (!types) throw std::invalid_argument("the base chamber has no shell increment");
    ResidueDatum rd = residue_datum(apt, d, *types);
    ResidueInstance inst = lib.instantiate(rd, q);
    if (!inst.supported) throw std::runtime_error(inst.reason);
    return residue_vanishing(rd, inst, v_generators, lib);
}

inline VerificationReport peter_weyl_partition(const Apartment& apt, const Chamber& d, const std::vector<int>& e_types,
                                               int q, ResidueLibrary& lib, std::uint64_t seed = 1) {
    ResidueDatum rd = residue_datum(apt, d, e_types);
    ResidueInstance inst = lib.instantiate(rd, q);
    if (!inst.supported) throw std::runtime_error(inst.reason);
    auto hc = lib.harish_chandra(inst.group);
    VerificationReport rep = verify_block_partition(*hc, seed);
    rep.append(facet_parabolic_correspondence(rd, inst));
    rep.group = inst.group->name();
    return rep;
}

// ---------------------------------------------------------------------------
// Certificates for the vanishing of shell increments

struct DplusCertificate {
    Chamber chamber;
    long height = 0;
    std::vector<int> d_plus_types;
    bool exceptional = true;
    int positive_system = -1;
    long threshold = 3;               // rho + 2 unless overridden
    std::vector<int> far_simple;      // positions i in ps.simple with ht^{+-alpha_i} >= threshold
    std::optional<AffineRoot> witness;
    std::vector<AffineRoot> radical;  // Psi(D_+, Phi+) roots with positive coefficient on far_simple
};

namespace detail {

inline long far_weight(const RootSystem& rs, const PositiveSystem& ps, const IntVec& grad, const std::vector<int>& far) {
    IntVec lam = rs.coefficients_in(ps, rs.index_of(grad));
    long s = 0;
    for (int i : far) s += lam[i];
    return s;
}

inline bool try_positive_system(const Apartment& apt, const Chamber& c0, int ps_index, const Facet& dplus,
                                DplusCertificate& cert) {
    const RootSystem& rs = apt.roots();
    const PositiveSystem& ps = rs.positive_systems().at(ps_index);
    std::vector<int> far;
    for (int i = 0; i < rs.rank(); ++i)
        if (apt.separation_count(c0, cert.chamber, ps.simple[i]) >= cert.threshold) far.push_back(i);
    if (far.empty()) return false;
    std::vector<AffineRoot> radical;
    for (const auto& psi : apt.facet_affine_roots(dplus, &ps))
        if (far_weight(rs, ps, psi.gradient, far) > 0) radical.push_back(psi);
    if (radical.empty()) return false;
    cert.exceptional = false;
    cert.positive_system = ps_index;
    cert.far_simple = far;
    cert.witness = radical.front();
    cert.radical = radical;
    return true;
}

}  // namespace detail

// With ps_only set, only that positive system is tried (and the chamber must
// lie in its sector); otherwise the systems whose sectors contain D are tried
// in index order and the first one yielding a witness is used.
// A negative threshold means the default rho + 2.
inline DplusCertificate dplus_certificate(const Apartment& apt, const Chamber& c0, const Chamber& d, int rho,
                                          std::optional<int> ps_only = std::nullopt, long threshold = -1) {
    if (rho < 0) throw std::invalid_argument("rho must be nonnegative");
    auto types = apt.d_plus_types(c0, d);
    if (!types) throw std::invalid_argument("the base chamber has no certificate");
    DplusCertificate cert;
    cert.chamber = d;
    cert.height = apt.height_total(c0, d);
    cert.threshold = threshold < 0 ? rho + 2 : threshold;
    cert.d_plus_types = *types;
    const Facet dplus = apt.sub_facet(d, *types);
    std::vector<int> systems;
    if (ps_only) {
        if (!apt.sector_membership(c0, apt.roots().positive_systems().at(*ps_only), d))
            throw std::invalid_argument("chamber outside the sector of the positive system");
        systems.push_back(*ps_only);
    } else {
        systems = apt.sectors_containing(c0, d);
    }
    for (int s : systems)
        if (detail::try_positive_system(apt, c0, s, dplus, cert)) break;
    return cert;
}

// Independent re-check of a certificate from its stated data.
inline bool verify_certificate(const Apartment& apt, const Chamber& c0, const DplusCertificate& cert) {
    if (cert.exceptional) return false;
    const RootSystem& rs = apt.roots();
    const PositiveSystem& ps = rs.positive_systems().at(cert.positive_system);
    if (!apt.sector_membership(c0, ps, cert.chamber) || !cert.witness) return false;
    for (int i : cert.far_simple)
        if (apt.separation_count(c0, cert.chamber, ps.simple[i]) < cert.threshold) return false;
    const AffineRoot& w = *cert.witness;
    const Facet dplus = apt.sub_facet(cert.chamber, cert.d_plus_types);
    for (const auto& v : dplus.vertices)
        if (dot(w.gradient, v) + w.level * apt.scale() != 0) return false;
    int idx = rs.index_of(w.gradient);
    if (idx < 0 || !std::binary_search(ps.roots.begin(), ps.roots.end(), idx)) return false;
    IntVec lam = rs.coefficients_in(ps, idx);
    for (int i : cert.far_simple)
        if (lam[i] > 0) return true;
    return false;
}

// Residue-level convolution predicted by a certificate. The roots psi of the
// certificate are negative on D; V is generated by the root groups of -psi,
// which make up the radical of a D-standard parabolic of the residue at D_+.
inline ResidueVanishing certificate_residue_check(const Apartment& apt, const Chamber& c0, const DplusCertificate& cert,
                                                  int q, ResidueLibrary& lib) {
    if (cert.exceptional) throw std::invalid_argument("exceptional chamber has no certificate");
    std::vector<AffineRoot> gens;
    for (const auto& psi : cert.radical) gens.push_back(-psi);
    return depth_zero_shell_vanishing(apt, c0, cert.chamber, q, gens, lib);
}

struct DplusScan {
    int rho = 1;
    int radius = 0;
    std::vector<long> certified_per_shell;
    std::vector<long> exceptional_per_shell;
    std::vector<int> exceptional;  // ball indices, in ball order
    std::map<int, long> by_positive_system;
    std::vector<DplusCertificate> certificates;  // ball order, C0 omitted
    std::vector<int> ball_index;                 // of each certificate

    long exceptional_within(const Ball& ball, int m) const {
        long n = 0;
        for (int i : exceptional) n += ball.depth[i] <= m;
        return n;
    }
};

inline DplusScan dplus_scan(const Apartment& apt, const Ball& ball, int rho, long threshold = -1) {
    DplusScan scan;
    scan.rho = rho;
    scan.radius = ball.radius();
    scan.certified_per_shell.assign(ball.radius() + 1, 0);
    scan.exceptional_per_shell.assign(ball.radius() + 1, 0);
    const Chamber& c0 = ball.chambers.at(0);
    for (int m = 1; m <= ball.radius(); ++m)
        for (int i : ball.shells[m]) {
            auto cert = dplus_certificate(apt, c0, ball.chambers[i], rho, std::nullopt, threshold);
            if (cert.exceptional) {
                ++scan.exceptional_per_shell[m];
                scan.exceptional.push_back(i);
            } else {
                ++scan.certified_per_shell[m];
                ++scan.by_positive_system[cert.positive_system];
            }
            scan.certificates.push_back(std::move(cert));
            scan.ball_index.push_back(i);
        }
    return scan;
}

// Census of one sector: chambers of the ball lying in S(C0, Phi+), each
// certified with that positive system or exceptional.
struct ExceptionalCensus {
    int positive_system = 0;
    int rho = 1;
    std::vector<long> sector_per_shell;
    std::vector<long> certified_per_shell;
    std::vector<long> exceptional_per_shell;
    std::vector<Chamber> exceptional;
    std::vector<int> exceptional_depth;

    long exceptional_within(int m) const {
        long n = 0;
        for (int d : exceptional_depth) n += d <= m;
        return n;
    }
    // No new exceptional chamber between radius r and the end of the scan.
    bool stable_from(int r) const {
        for (std::size_t m = r + 1; m < exceptional_per_shell.size(); ++m)
            if (exceptional_per_shell[m]) return false;
        return true;
    }
};

inline ExceptionalCensus exceptional_enumeration(const Apartment& apt, const Ball& ball, int ps_index, int rho,
                                                 long threshold = -1) {
    ExceptionalCensus cen;
    cen.positive_system = ps_index;
    cen.rho = rho;
    const int R = ball.radius();
    cen.sector_per_shell.assign(R + 1, 0);
    cen.certified_per_shell.assign(R + 1, 0);
    cen.exceptional_per_shell.assign(R + 1, 0);
    const Chamber& c0 = ball.chambers.at(0);
    const PositiveSystem& ps = apt.roots().positive_systems().at(ps_index);
    for (int m = 1; m <= R; ++m)
        for (int i : ball.shells[m]) {
            const Chamber& d = ball.chambers[i];
            if (!apt.sector_membership(c0, ps, d)) continue;
            ++cen.sector_per_shell[m];
            auto cert = dplus_certificate(apt, c0, d, rho, ps_index, threshold);
            if (cert.exceptional) {
                ++cen.exceptional_per_shell[m];
                cen.exceptional.push_back(d);
                cen.exceptional_depth.push_back(m);
            } else {
                ++cen.certified_per_shell[m];
            }
        }
    return cen;
}

struct SymmetryCheck {
    int symmetry = 0;  // index into alcove_symmetries()
    int from = 0, to = 0;
    bool holds = false;
};

// Each alcove symmetry (w, t) carries the sector of Phi+ to the sector of
// w(Phi+); the exceptional sets must correspond.
inline std::vector<SymmetryCheck> census_symmetry(const Apartment& apt, const std::vector<ExceptionalCensus>& censuses) {
    const RootSystem& rs = apt.roots();
    const auto& systems = rs.positive_systems();
    std::vector<SymmetryCheck> out;
    const auto syms = apt.alcove_symmetries();
    auto keys_of = [](const std::vector<Chamber>& cs) {
        std::set<IntVec> s;
        for (const auto& c : cs) s.insert(c.key);
        return s;
    };
    for (std::size_t k = 0; k < syms.size(); ++k) {
        const auto& [w, t] = syms[k];
        const auto& perm = rs.weyl_group()[w].perm;
        for (const auto& cen : censuses) {
            std::vector<int> img;
            for (int r : systems[cen.positive_system].roots) img.push_back(perm[r]);
            std::sort(img.begin(), img.end());
            int target = -1;
            for (std::size_t j = 0; j < systems.size(); ++j)
                if (systems[j].roots == img) target = static_cast<int>(j);
            const ExceptionalCensus* other = nullptr;
            for (const auto& c2 : censuses)
                if (c2.positive_system == target) other = &c2;
            if (!other) continue;
            std::vector<Chamber> mapped;
            for (const auto& c : cen.exceptional) mapped.push_back(apt.apply_affine(w, t, c));
            SymmetryCheck chk;
            chk.symmetry = static_cast<int>(k);
            chk.from = cen.positive_system;
            chk.to = target;
            chk.holds = keys_of(mapped) == keys_of(other->exceptional) &&
                        cen.exceptional_per_shell == other->exceptional_per_shell;
            out.push_back(chk);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Graded model of depth-r quotients
//
// At E = D_+ each coordinate is an affine root phi vanishing on E. For a facet
// K of F_+(D), S_K is the set of phi that are nonnegative on D and positive at
// some vertex of K; the idempotent of G_{K,r+} in the quotient G_{E,r}/G_{E,r+}
// is the average over the coordinates in S_K, so convolution is union.

struct GradedQuotientModel {
    std::vector<AffineRoot> coordinates;
    std::vector<std::vector<int>> facets;  // vertex types, F_+(D) in bitmask order
    std::vector<std::uint64_t> s;          // S_K for each facet

    int index_of(const std::vector<int>& types) const {
        for (std::size_t i = 0; i < facets.size(); ++i)
            if (facets[i] == types) return static_cast<int>(i);
        return -1;
    }
};

inline GradedQuotientModel graded_quotient_model(const Apartment& apt, const Chamber& c0, const Chamber& d) {
    auto types = apt.d_plus_types(c0, d);
    if (!types) throw std::invalid_argument("the base chamber has no graded model");
    GradedQuotientModel m;
    m.coordinates = apt.facet_affine_roots(apt.sub_facet(d, *types));
    if (m.coordinates.size() > 64) throw std::length_error("too many coordinates for the graded model");
    m.facets = apt.f_plus_types(c0, d);
    for (const auto& k : m.facets) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < m.coordinates.size(); ++i) {
            const auto& phi = m.coordinates[i];
            if (apt.sign_on(phi, d) < 0) continue;
            for (int t : k)
                if (dot(phi.gradient, d.vertices[t]) + phi.level * apt.scale() > 0) {
                    bits |= std::uint64_t(1) << i;
                    break;
                }
        }
        m.s.push_back(bits);
    }
    return m;
}

struct DepthRShellCheck {
    int r = 1;
    int coordinates = 0;
    int facets = 0;
    int comparable_pairs = 0;
    bool monotone = true;        // K <= K' implies S_K in S_K'
    bool absorption = true;      // e_{K,r+} * e_{K',r+} = e_{K',r+} for K <= K'
    int admissible = 0;          // facets V != D_+ tested
    bool vanishing = true;       // the alternating sum against each V is zero
    bool holds() const { return monotone && absorption && vanishing; }
};

inline DepthRShellCheck depth_r_shell_vanishing(const Apartment& apt, const Chamber& c0, const Chamber& d, int r) {
    if (r < 1) throw std::invalid_argument("depth must be a positive integer");
    const GradedQuotientModel m = graded_quotient_model(apt, c0, d);
    DepthRShellCheck chk;
    chk.r = r;
    chk.coordinates = static_cast<int>(m.coordinates.size());
    chk.facets = static_cast<int>(m.facets.size());
    const int n = chk.facets;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const auto &ka = m.facets[a], &kb = m.facets[b];
            if (!std::includes(kb.begin(), kb.end(), ka.begin(), ka.end())) continue;
            ++chk.comparable_pairs;
            chk.monotone &= (m.s[a] & ~m.s[b]) == 0;
            chk.absorption &= (m.s[a] | m.s[b]) == m.s[b];
        }
    for (int v = 1; v < n; ++v) {  // facet 0 is D_+ itself
        ++chk.admissible;
        std::map<std::uint64_t, long> coeff;
        for (int k = 0; k < n; ++k) {
            const long sign = (static_cast<int>(m.facets[k].size()) - 1) % 2 ? -1 : 1;
            coeff[m.s[k] | m.s[v]] += sign;
        }
        for (const auto& [key, c] : coeff) chk.vanishing &= c == 0;
    }
    return chk;
}

// The alternating sum against a single V in F_+(D); V = D_+ is rejected.
inline bool depth_r_vanishing_for(const Apartment& apt, const Chamber& c0, const Chamber& d, int r,
                                  std::vector<int> v_types) {
    if (r < 1) throw std::invalid_argument("depth must be a positive integer");
    const GradedQuotientModel m = graded_quotient_model(apt, c0, d);
    std::sort(v_types.begin(), v_types.end());
    const int v = m.index_of(v_types);
    if (v < 0) throw std::invalid_argument("V is not a facet of F_+(D)");
    if (v == 0) throw std::invalid_argument("V must differ from D_+");
    std::map<std::uint64_t, long> coeff;
    for (std::size_t k = 0; k < m.facets.size(); ++k)
        coeff[m.s[k] | m.s[v]] += (m.facets[k].size() - 1) % 2 ? -1 : 1;
    for (const auto& [key, c] : coeff)
        if (c) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Truncated Euler-Poincare sums over balls

struct TraceOptions {
    std::string mode = "depth-r";  // or "depth-zero"
    int r = 1;                     // depth of the sum (depth-r mode)
    int rho = 1;                   // depth of the probe G_{x0,rho} (depth-r mode)
    std::vector<int> probe_types;  // probe facet of C0 (depth-zero mode); empty means C0
    int q = 2;                     // residue field (depth-zero mode)
    int radius = 6;
};

struct TruncatedTrace {
    TraceOptions options;
    std::vector<long> new_facets;       // per shell
    std::vector<long> increment_terms;  // nonzero formal terms in each increment
    std::vector<long> partial_terms;    // support of each partial sum
    bool facet_partition = true;        // new facets = disjoint union of F_+(D)
    long residue_nonzero = 0;           // depth-zero: chambers with a nonzero residue increment
    long residue_skipped = 0;           // depth-zero: unsupported residues
    bool equals_probe = false;          // depth-zero: the final sum is the probe facet alone
    std::vector<std::pair<Facet, long>> value;  // depth-zero: final formal value

    // Least m such that every increment beyond m vanishes; -1 if the last one does not.
    int stabilization_radius() const {
        int m = static_cast<int>(increment_terms.size()) - 1;
        if (m < 0 || increment_terms[m] != 0) return -1;
        while (m > 0 && increment_terms[m] == 0) --m;
        return m;
    }
    bool stabilized() const { return stabilization_radius() >= 0; }
};

namespace detail {

inline std::vector<std::vector<int>> all_type_subsets(int n) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << (n + 1)); ++mask) {
        std::vector<int> t;
        for (int k = 0; k <= n; ++k)
            if (mask & (1u << k)) t.push_back(k);
        out.push_back(t);
    }
    return out;
}

template <class Key>
long add_terms(std::map<Key, long>& acc, const std::map<Key, long>& inc) {
    long nonzero = 0;
    for (const auto& [k, c] : inc) {
        if (c == 0) continue;
        ++nonzero;
        long& v = acc[k];
        v += c;
        if (v == 0) acc.erase(k);
    }
    return nonzero;
}

}  // namespace detail

inline TruncatedTrace truncated_sum_stabilization(const Apartment& apt, const TraceOptions& opt, ResidueLibrary* lib = nullptr) {
    if (opt.mode != "depth-r" && opt.mode != "depth-zero") throw std::invalid_argument("unknown trace mode " + opt.mode);
    if (opt.radius < 0) throw std::invalid_argument("radius must be nonnegative");
    if (opt.mode == "depth-r" && opt.r < 1) throw std::invalid_argument("depth must be a positive integer");
    const RootSystem& rs = apt.roots();
    const int n = apt.rank();
    const Chamber& c0 = apt.fundamental_chamber();
    const Ball ball = apt.ball(c0, opt.radius);
    TruncatedTrace tr;
    tr.options = opt;

    // depth-r data: thresholds f(gamma) = least n with gamma(x) + n > r, and the probe's
    // least n with gamma(x0) + n >= rho
    const RatVec x0 = apt.barycenter(c0);
    IntVec probe(rs.num_roots());
    for (int g = 0; g < rs.num_roots(); ++g) probe[g] = -floor_long(dot(rs.root(g), x0) - Rational(opt.rho));
    auto threshold_term = [&](const Facet& k) {
        const RatVec x = k.barycenter();
        IntVec t(rs.num_roots());
        for (int g = 0; g < rs.num_roots(); ++g)
            t[g] = std::min(floor_long(Rational(opt.r) - dot(rs.root(g), x)) + 1, probe[g]);
        return t;
    };

    // depth-zero data
    std::vector<int> probe_types = opt.probe_types;
    if (probe_types.empty())
        for (int k = 0; k <= n; ++k) probe_types.push_back(k);
    std::sort(probe_types.begin(), probe_types.end());
    const Facet probe_facet = apt.sub_facet(c0, probe_types);
    const RatVec xf = probe_facet.barycenter();
    std::unique_ptr<ResidueLibrary> own;
    if (opt.mode == "depth-zero" && !lib) {
        own = std::make_unique<ResidueLibrary>();
        lib = own.get();
    }
    auto join = [&](const Chamber& d, const std::vector<int>& k) {
        std::vector<IntVec> v;
        for (int t : k) v.push_back(d.vertices[t]);
        for (const auto& p : probe_facet.vertices)
            if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
        return apt.make_facet(std::move(v));
    };

    std::map<IntVec, long> sum_r;
    std::map<Facet, long> sum_0;
    std::set<Facet> seen;
    const auto every_type = detail::all_type_subsets(n);
    for (int m = 0; m <= ball.radius(); ++m) {
        std::map<IntVec, long> inc_r;
        std::map<Facet, long> inc_0;
        std::set<Facet> fresh;
        long residue_terms = 0;
        for (int i : ball.shells[m])
            for (const auto& k : apt.f_plus_types(c0, ball.chambers[i])) {
                Facet f = apt.sub_facet(ball.chambers[i], k);
                if (seen.count(f) || !fresh.insert(f).second) tr.facet_partition = false;
            }
        for (int i : ball.shells[m])
            for (const auto& k : every_type) {
                Facet f = apt.sub_facet(ball.chambers[i], k);
                if (!seen.count(f) && !fresh.count(f)) tr.facet_partition = false;
            }
        for (int i : ball.shells[m]) {
            const Chamber& d = ball.chambers[i];
            const auto fplus = apt.f_plus_types(c0, d);
            if (opt.mode == "depth-r") {
                for (const auto& k : fplus) {
                    const long sign = (k.size() - 1) % 2 ? -1 : 1;
                    inc_r[threshold_term(apt.sub_facet(d, k))] += sign;
                }
                continue;
            }
            const Facet dbar = apt.as_facet(d);
            if (m == 0 || dbar.contains(probe_facet)) {
                // e_{G+_K} * e_{G+_F} = e_{G+_{K v F}} for facets of one chamber
                for (const auto& k : fplus) {
                    const long sign = (k.size() - 1) % 2 ? -1 : 1;
                    inc_0[join(d, k)] += sign;
                }
                continue;
            }
            ResidueDatum rd = residue_datum(apt, d, *apt.d_plus_types(c0, d));
            ResidueInstance inst = lib->instantiate(rd, opt.q);
            if (!inst.supported) {
                ++tr.residue_skipped;
                ++residue_terms;
                continue;
            }
            std::vector<AffineRoot> gens;
            for (const auto& phi : rd.roots)
                if (apt.sign_on(phi, d) > 0 && phi(xf) > 0) gens.push_back(phi);
            if (!residue_vanishing(rd, inst, gens, *lib).radical_sum_zero) {
                ++tr.residue_nonzero;
                ++residue_terms;
            }
        }
        seen.insert(fresh.begin(), fresh.end());
        tr.new_facets.push_back(static_cast<long>(fresh.size()));
        long terms = opt.mode == "depth-r" ? detail::add_terms(sum_r, inc_r) : detail::add_terms(sum_0, inc_0);
        tr.increment_terms.push_back(terms + residue_terms);
        tr.partial_terms.push_back(static_cast<long>(opt.mode == "depth-r" ? sum_r.size() : sum_0.size()));
    }
    if (opt.mode == "depth-zero") {
        for (const auto& [f, c] : sum_0) tr.value.emplace_back(f, c);
        tr.equals_probe = tr.residue_nonzero == 0 && tr.residue_skipped == 0 && sum_0.size() == 1 &&
                          sum_0.begin()->first == probe_facet && sum_0.begin()->second == 1;
    }
    return tr;
}

}  // namespace ep
