#pragma once

// Harish-Chandra theory of a finite reductive group: cuspidal characters of
// the standard Levi subgroups, cuspidal classes up to conjugacy, the block
// idempotents e_{M,L} and e_{Q,L}, and exact checks of the vanishing
// identities for alternating sums of parabolic idempotents.

#include "ep/group_algebra.hpp"

#include <random>

namespace ep {

inline int subset_size(unsigned s) { return __builtin_popcount(s); }
inline int rank_sign(unsigned s) { return subset_size(s) % 2 ? -1 : 1; }

// A character of the Levi L_C is cuspidal when its invariants under the
// radical of every proper standard parabolic of L_C vanish.
inline bool is_cuspidal(const ReductiveGroup& g, const LeviGroup& levi, const CharacterTable& table, int chi) {
    const unsigned C = levi.subset;
    for (unsigned B = 0; B <= C; ++B) {
        if ((B & C) != B || B == C) continue;
        std::vector<int> u;
        const auto blk = g.blocks(B);
        for (int i = 0; i < levi.group->order(); ++i)
            if (ReductiveGroup::in_radical(levi.group->element(i), blk)) u.push_back(i);
        if (invariant_dim(table, chi, u) != 0) return false;
    }
    return true;
}

struct LeviData {
    unsigned subset = 0;
    LeviGroup levi;
    CharacterTable table;
    std::vector<int> cuspidal;  // character indices
};

struct CuspidalClass {
    int index = 0;
    unsigned levi_subset = 0;  // representative pair (L_C, sigma)
    int character = 0;
    std::vector<std::pair<unsigned, int>> members;  // all standard pairs in the class
    // certificate: for each member, an element g of G with g L_rep g^-1 = L_member
    // carrying the representative character to the member's
    std::vector<int> conjugators;
};

struct IdentityCheck {
    std::string identity;
    std::string instance;
    bool holds = false;
};

struct VerificationReport {
    std::string group;
    std::vector<IdentityCheck> checks;
    bool all_hold() const {
        for (const auto& c : checks)
            if (!c.holds) return false;
        return true;
    }
    void append(const VerificationReport& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
};

class HarishChandraData {
public:
    explicit HarishChandraData(std::shared_ptr<const ReductiveGroup> g) : g_(std::move(g)) {
        const unsigned full = g_->full_mask();
        conductor_ = 1;
        for (unsigned C = 0; C <= full; ++C) {
            LeviData d;
            d.subset = C;
            d.levi = g_->levi_group(C);
            d.table = character_table(d.levi.group);
            for (int chi = 0; chi < d.table.size(); ++chi)
                if (is_cuspidal(*g_, d.levi, d.table, chi)) d.cuspidal.push_back(chi);
            conductor_ = std::lcm(conductor_, d.table.conductor);
            levis_.push_back(std::move(d));
        }
        build_classes();
        build_blocks();
    }

    const ReductiveGroup& group() const { return *g_; }
    std::shared_ptr<const FiniteGroup> finite_group() const { return g_->group_ptr(); }
    int conductor() const { return conductor_; }
    const std::vector<LeviData>& levis() const { return levis_; }
    const LeviData& levi(unsigned C) const { return levis_.at(C); }
    const std::vector<CuspidalClass>& classes() const { return classes_; }
    // Characters of L_M lying in the block of class cls.
    const std::vector<int>& block_characters(unsigned M, int cls) const { return blocks_.at(M).at(cls); }
    // Membership computed with opposite parabolics disagreeing with the standard choice.
    const std::vector<std::string>& independence_discrepancies() const { return discrepancies_; }

    Cyclotomic embed(const Cyclotomic& v) const { return v.embed(conductor_); }

    AlgebraElement radical_idempotent(unsigned A) const {
        return subgroup_idempotent(finite_group(), conductor_, g_->standard_parabolic(A).radical);
    }

    // e_{M,L}(x) = (1/|M|) sum over tau in the block of deg(tau) tau(x^-1), on x in L_M.
    AlgebraElement block_idempotent(unsigned M, int cls) const {
        const auto& d = levis_.at(M);
        const auto& L = *d.levi.group;
        AlgebraElement e(finite_group(), conductor_);
        const Rational w = ratio(1, L.order());
        for (int tau : block_characters(M, cls)) {
            const auto& row = d.table.values[tau];
            std::vector<Cyclotomic> scaled;
            for (const auto& v : row) scaled.push_back(embed(v) * (w * Rational(d.table.degrees[tau])));
            for (int x = 0; x < L.order(); ++x) e[d.levi.to_parent[x]] += scaled[L.classes().class_of[L.inv(x)]];
        }
        return e;
    }

    AlgebraElement parabolic_block_idempotent(unsigned Q, int cls) const {
        return convolve(block_idempotent(Q, cls), radical_idempotent(Q));
    }

private:
    // Does g conjugate L_C onto L_D?
    bool conjugates_levi(int g, unsigned C, unsigned D) const {
        const auto& G = g_->group();
        const auto& LC = levis_[C].levi;
        const auto& LD = levis_[D].levi;
        for (int s : LC.group->generators())
            if (!LD.from_parent.count(G.conj(g, LC.to_parent[s]))) return false;
        return true;
    }

    void build_classes() {
        const auto& G = g_->group();
        std::vector<std::pair<unsigned, int>> pairs;
        for (const auto& d : levis_)
            for (int chi : d.cuspidal) pairs.emplace_back(d.subset, chi);
        std::sort(pairs.begin(), pairs.end(), [](auto a, auto b) {
            if (subset_size(a.first) != subset_size(b.first)) return subset_size(a.first) < subset_size(b.first);
            return a < b;
        });
        const int n = static_cast<int>(pairs.size());
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::vector<int> via(n, 0);  // conjugator from the root of the component, when known
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (int i = 0; i < n; ++i) {
            if (find(i) != i) continue;
            const auto [C, sigma] = pairs[i];
            const auto& dc = levis_[C];
            for (int j = i + 1; j < n; ++j) {
                if (find(j) != j) continue;
                const auto [D, tau] = pairs[j];
                if (levis_[D].levi.group->order() != dc.levi.group->order() || subset_size(C) != subset_size(D)) continue;
                const auto& dd = levis_[D];
                for (int x = 0; x < G.order(); ++x) {
                    if (!conjugates_levi(x, C, D)) continue;
                    bool same = true;
                    for (int c = 0; c < dc.levi.group->classes().count() && same; ++c) {
                        int y = G.conj(x, dc.levi.to_parent[dc.levi.group->classes().representative(c)]);
                        int yc = dd.levi.group->classes().class_of[dd.levi.from_parent.at(y)];
                        same = embed(dc.table.values[sigma][c]) == embed(dd.table.values[tau][yc]);
                    }
                    if (same) {
                        parent[j] = i;
                        via[j] = x;
                        break;
                    }
                }
            }
        }
        std::vector<int> root_to_class(n, -1);
        for (int i = 0; i < n; ++i) {
            int r = find(i);
            if (root_to_class[r] < 0) {
                root_to_class[r] = static_cast<int>(classes_.size());
                CuspidalClass c;
                c.index = root_to_class[r];
                c.levi_subset = pairs[r].first;
                c.character = pairs[r].second;
                classes_.push_back(c);
            }
            auto& c = classes_[root_to_class[r]];
            c.members.push_back(pairs[i]);
            c.conjugators.push_back(i == r ? 0 : via[i]);
        }
    }

    // counts_[M][B][cM][cB] = #{x in P_B cap L_M : x in class cM of L_M, Levi part in class cB of L_B}
    // for B a subset of M; the second table uses the opposite parabolic.
    using CountTable = std::vector<std::vector<long>>;
    CountTable inner_counts(unsigned M, unsigned B, bool opposite) const {
        const auto& dm = levis_[M];
        const auto& db = levis_[B];
        const auto blk = g_->blocks(B);
        CountTable cnt(dm.levi.group->classes().count(), std::vector<long>(db.levi.group->classes().count(), 0));
        for (int i = 0; i < dm.levi.group->order(); ++i) {
            const Mat& m = dm.levi.group->element(i);
            const Mat probe = opposite ? mat_transpose(g_->spec().n, m) : m;
            if (!ReductiveGroup::in_parabolic(probe, blk)) continue;
            int lp = g_->group().index_of(ReductiveGroup::levi_projection(m, blk));
            int lb = db.levi.from_parent.at(lp);
            ++cnt[dm.levi.group->classes().class_of[i]][db.levi.group->classes().class_of[lb]];
        }
        return cnt;
    }

    // <Res tau, infl sigma> over P_B cap L_M, up to the positive factor |P_B cap L_M|.
    bool pairs_nontrivially(unsigned M, int tau, unsigned B, int sigma, const CountTable& cnt) const {
        const auto& dm = levis_[M];
        const auto& db = levis_[B];
        Cyclotomic s(conductor_);
        for (std::size_t cm = 0; cm < cnt.size(); ++cm)
            for (std::size_t cb = 0; cb < cnt[cm].size(); ++cb)
                if (cnt[cm][cb])
                    s += embed(dm.table.values[tau][cm]) * embed(db.table.values[sigma][cb]).conj() * Rational(cnt[cm][cb]);
        return !s.is_zero();
    }

    void build_blocks() {
        const unsigned full = g_->full_mask();
        const int ncls = static_cast<int>(classes_.size());
        blocks_.assign(full + 1, std::vector<std::vector<int>>(ncls));
        for (unsigned M = 0; M <= full; ++M) {
            const auto& dm = levis_[M];
            std::vector<std::vector<char>> member(ncls, std::vector<char>(dm.table.size(), 0));
            std::vector<std::vector<char>> member_op = member;
            for (unsigned B = 0; B <= M; ++B) {
                if ((B & M) != B) continue;
                const auto cnt = inner_counts(M, B, false);
                const auto cnt_op = inner_counts(M, B, true);
                for (int c = 0; c < ncls; ++c)
                    for (auto [C, sigma] : classes_[c].members) {
                        if (C != B) continue;
                        for (int tau = 0; tau < dm.table.size(); ++tau) {
                            if (!member[c][tau] && pairs_nontrivially(M, tau, B, sigma, cnt)) member[c][tau] = 1;
                            if (!member_op[c][tau] && pairs_nontrivially(M, tau, B, sigma, cnt_op)) member_op[c][tau] = 1;
                        }
                    }
            }
            for (int tau = 0; tau < dm.table.size(); ++tau) {
                int count = 0;
                for (int c = 0; c < ncls; ++c) {
                    count += member[c][tau];
                    if (member[c][tau] != member_op[c][tau])
                        discrepancies_.push_back(g_->name() + ": Levi " + g_->subset_name(M) + " character " +
                                                 std::to_string(tau) + " class " + std::to_string(c));
                }
                if (count != 1)
                    discrepancies_.push_back(g_->name() + ": Levi " + g_->subset_name(M) + " character " +
                                             std::to_string(tau) + " lies in " + std::to_string(count) + " blocks");
            }
            for (int c = 0; c < ncls; ++c)
                for (int tau = 0; tau < dm.table.size(); ++tau)
                    if (member[c][tau]) blocks_[M][c].push_back(tau);
        }
    }

    std::shared_ptr<const ReductiveGroup> g_;
    int conductor_ = 1;
    std::vector<LeviData> levis_;
    std::vector<CuspidalClass> classes_;
    std::vector<std::vector<std::vector<int>>> blocks_;
    std::vector<std::string> discrepancies_;
};

// Radical alternating sum for R strictly containing Q:
// (sum over A in R of (-1)^|A| e_{rad P_A}) * e_{rad P_Q} = 0.
inline IdentityCheck verify_radical_vanishing(const ReductiveGroup& g, unsigned R, unsigned Q) {
    if ((Q & R) != Q || Q == R) throw std::invalid_argument("verify_radical_vanishing: R must strictly contain Q");
    auto G = g.group_ptr();
    AlgebraElement sum(G, 1);
    for (unsigned A = 0; A <= R; ++A) {
        if ((A & R) != A) continue;
        auto e = subgroup_idempotent(G, 1, g.standard_parabolic(A).radical);
        if (rank_sign(A) > 0) sum += e;
        else sum -= e;
    }
    auto prod = convolve(sum, subgroup_idempotent(G, 1, g.standard_parabolic(Q).radical));
    return {"radical-alternating-sum", "R=" + g.subset_name(R) + " Q=" + g.subset_name(Q), prod.is_zero()};
}

inline VerificationReport verify_radical_sums_all(const ReductiveGroup& g) {
    VerificationReport rep;
    rep.group = g.name();
    for (unsigned R = 0; R <= g.full_mask(); ++R)
        for (unsigned Q = 0; Q <= R; ++Q)
            if ((Q & R) == Q && Q != R) rep.checks.push_back(verify_radical_vanishing(g, R, Q));
    return rep;
}

// The block identities for one cuspidal class.
inline VerificationReport verify_block_identities(const HarishChandraData& hc, int cls) {
    const auto& g = hc.group();
    const unsigned full = g.full_mask();
    VerificationReport rep;
    rep.group = g.name();
    const std::string tag = "class " + std::to_string(cls);
    const auto eG = hc.block_idempotent(full, cls);
    std::vector<AlgebraElement> eP, eV;
    for (unsigned A = 0; A <= full; ++A) {
        eP.push_back(hc.parabolic_block_idempotent(A, cls));
        eV.push_back(hc.radical_idempotent(A));
    }
    for (unsigned Q = 0; Q <= full; ++Q)
        rep.checks.push_back({"block-times-radical", tag + " Q=" + g.subset_name(Q), convolve(eG, eV[Q]) == eP[Q]});
    AlgebraElement alternating(hc.finite_group(), hc.conductor());
    for (unsigned A = 0; A <= full; ++A) {
        if (rank_sign(A) > 0) alternating += eP[A];
        else alternating -= eP[A];
    }
    for (unsigned Q = 0; Q < full; ++Q) {
        const auto& sum = alternating;
        rep.checks.push_back({"block-alternating-sum", tag + " Q=" + g.subset_name(Q), convolve(sum, eV[Q]).is_zero()});
    }
    for (unsigned R = 0; R <= full; ++R)
        for (unsigned Q = 0; Q <= R; ++Q) {
            if ((Q & R) != Q || Q == R) continue;
            AlgebraElement sum(hc.finite_group(), hc.conductor());
            for (unsigned A = 0; A <= R; ++A) {
                if ((A & R) != A) continue;
                if (rank_sign(A) > 0) sum += eP[A];
                else sum -= eP[A];
            }
            rep.checks.push_back(
                {"block-alternating-sum-above-R", tag + " R=" + g.subset_name(R) + " Q=" + g.subset_name(Q), convolve(sum, eV[Q]).is_zero()});
        }
    return rep;
}

// Partition of unity, orthogonality, idempotence and centrality of the blocks,
// and the per-parabolic partition sum_L e_{Q,L} = e_{rad Q}.
inline VerificationReport verify_block_partition(const HarishChandraData& hc, std::uint64_t seed = 1) {
    const auto& g = hc.group();
    const unsigned full = g.full_mask();
    const int n = static_cast<int>(hc.classes().size());
    auto G = hc.finite_group();
    VerificationReport rep;
    rep.group = g.name();
    std::vector<AlgebraElement> e;
    for (int c = 0; c < n; ++c) e.push_back(hc.block_idempotent(full, c));
    AlgebraElement total(G, hc.conductor());
    for (const auto& x : e) total += x;
    rep.checks.push_back({"partition-of-unity", "sum of e_G over classes = delta_1",
                          total == AlgebraElement::delta(G, hc.conductor(), 0)});
    std::mt19937_64 rng(seed);
    for (int a = 0; a < n; ++a) {
        rep.checks.push_back({"idempotent", "class " + std::to_string(a), convolve(e[a], e[a]) == e[a]});
        for (int b = a + 1; b < n; ++b)
            rep.checks.push_back({"orthogonal", "classes " + std::to_string(a) + "," + std::to_string(b),
                                  convolve(e[a], e[b]).is_zero()});
        AlgebraElement f(G, hc.conductor());
        std::uniform_int_distribution<int> pick(0, G->order() - 1), coef(-3, 3);
        for (int k = 0; k < 6; ++k) f[pick(rng)] += Cyclotomic(hc.conductor(), coef(rng));
        rep.checks.push_back({"central", "class " + std::to_string(a), convolve(e[a], f) == convolve(f, e[a])});
    }
    for (unsigned Q = 0; Q <= full; ++Q) {
        AlgebraElement s(G, hc.conductor());
        for (int c = 0; c < n; ++c) s += hc.parabolic_block_idempotent(Q, c);
        rep.checks.push_back({"parabolic-partition", "Q=" + g.subset_name(Q), s == hc.radical_idempotent(Q)});
    }
    return rep;
}

}  // namespace ep
