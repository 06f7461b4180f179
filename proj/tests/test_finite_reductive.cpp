#include "ep/finite_reductive.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace ep;

namespace {

// Brute-force class count: orbits under conjugation by every element.
int brute_class_count(const FiniteGroup& g) {
    std::vector<char> seen(g.order(), 0);
    int count = 0;
    for (int x = 0; x < g.order(); ++x) {
        if (seen[x]) continue;
        ++count;
        for (int h = 0; h < g.order(); ++h) seen[g.conj(h, x)] = 1;
    }
    return count;
}

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(FiniteField, ModulusIsLeastIrreducible) {
    EXPECT_EQ(FiniteField(2, 2).modulus(), (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(FiniteField(2, 3).modulus(), (std::vector<int>{1, 1, 0, 1}));
    EXPECT_EQ(FiniteField(3, 2).modulus(), (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(FiniteField(2, 4).modulus(), (std::vector<int>{1, 1, 0, 0, 1}));
    EXPECT_EQ(FiniteField(2, 3).modulus_string(), "x^3 + x + 1");
}

TEST(FiniteField, AxiomsHold) {
    for (int q : {2, 3, 4, 5, 7, 8, 9, 16, 25, 27}) {
        auto F = FiniteField::of_order(q);
        ASSERT_EQ(F->q(), q);
        for (int a = 0; a < q; ++a) {
            EXPECT_EQ(F->add(a, F->neg(a)), 0);
            if (a) {
                EXPECT_EQ(F->mul(a, F->inv(a)), 1);
            }
            for (int b = 0; b < q; ++b) {
                EXPECT_EQ(F->mul(a, b), F->mul(b, a));
                for (int c = 0; c < q; c += 3)
                    EXPECT_EQ(F->mul(a, F->add(b, c)), F->add(F->mul(a, b), F->mul(a, c)));
            }
        }
        std::set<int> powers;
        int x = 1;
        for (int k = 0; k < q - 1; ++k, x = F->mul(x, F->primitive_element())) powers.insert(x);
        EXPECT_EQ(static_cast<int>(powers.size()), q - 1);
    }
    EXPECT_THROW(FiniteField::of_order(6), std::invalid_argument);
    EXPECT_THROW(FiniteField::of_order(128), std::invalid_argument);
}

TEST(FiniteReductive, OrdersMatchFormula) {
    struct Case { const char* kind; int q; long order; };
    for (auto c : {Case{"GL2", 2, 6}, Case{"SL2", 3, 24}, Case{"Sp4", 2, 720}, Case{"SL3", 2, 168},
                   Case{"GL2", 3, 48}, Case{"GL2", 4, 180}, Case{"SL2", 5, 120}, Case{"GL3", 2, 168},
                   Case{"SL2xSL2", 2, 36}, Case{"SL2xSL2", 3, 576}, Case{"GL1", 5, 4}, Case{"SL1", 3, 1},
                   Case{"Sp4", 3, 51840}}) {
        auto g = build_group(c.kind, c.q);
        EXPECT_EQ(g->group().order(), c.order) << g->name();
        EXPECT_EQ(g->spec().order_formula(), c.order);
        EXPECT_EQ(g->group().element(0), identity_mat(g->spec().n));
    }
}

TEST(FiniteReductive, SymplecticFormPreserved) {
    auto g = build_group("Sp4", 3);
    const auto& F = g->field();
    Mat J;
    J.at(0, 3) = 1;
    J.at(1, 2) = 1;
    J.at(2, 1) = static_cast<std::uint8_t>(F.neg(1));
    J.at(3, 0) = static_cast<std::uint8_t>(F.neg(1));
    for (int i = 0; i < g->group().order(); i += 97) {
        const Mat& x = g->group().element(i);
        EXPECT_EQ(mat_mul(F, 4, mat_mul(F, 4, mat_transpose(4, x), J), x), J);
    }
}

TEST(FiniteReductive, SizeCapRejection) {
    try {
        build_group("GL3", 4, 1000);
        FAIL() << "expected rejection";
    } catch (const std::length_error& e) {
        EXPECT_NE(std::string(e.what()).find("181440"), std::string::npos);
    }
    EXPECT_THROW(GroupSpec::parse("G2", 2), std::invalid_argument);
}

TEST(FiniteReductive, ClosureAndInverses) {
    auto g = build_group("SL2", 3);
    const auto& G = g->group();
    std::vector<int> all(G.order());
    std::iota(all.begin(), all.end(), 0);
    EXPECT_TRUE(G.is_subgroup(all));
    for (int i = 0; i < G.order(); ++i) EXPECT_EQ(G.mul(i, G.inv(i)), 0);
}

TEST(FiniteReductive, ConjugacyClasses) {
    struct Case { const char* kind; int q; int classes; };
    for (auto c : {Case{"GL2", 2, 3}, Case{"SL2", 3, 7}, Case{"GL2", 3, 8}, Case{"SL3", 2, 6}, Case{"Sp4", 2, 11}}) {
        auto g = build_group(c.kind, c.q);
        const auto& cl = g->group().classes();
        EXPECT_EQ(cl.count(), c.classes) << g->name();
        EXPECT_EQ(cl.count(), brute_class_count(g->group()));
        EXPECT_EQ(cl.classes[0], std::vector<int>{0});
        std::size_t total = 0;
        for (const auto& k : cl.classes) total += k.size();
        EXPECT_EQ(static_cast<int>(total), g->group().order());
    }
}

TEST(FiniteReductive, ParabolicExtremes) {
    for (auto [kind, q] : {std::pair{"GL2", 2}, {"SL3", 2}, {"Sp4", 2}, {"SL2", 3}, {"SL2xSL2", 2}}) {
        auto g = build_group(kind, q);
        auto P0 = g->standard_parabolic(0);
        auto PD = g->standard_parabolic(g->full_mask());
        EXPECT_EQ(static_cast<int>(PD.elements.size()), g->group().order());
        EXPECT_EQ(PD.radical, std::vector<int>{0});
        // Borel = upper triangular elements
        for (int i = 0; i < g->group().order(); ++i) {
            const Mat& m = g->group().element(i);
            bool upper = true;
            for (int r = 0; r < g->spec().n; ++r)
                for (int c = 0; c < r; ++c) upper &= m.at(r, c) == 0;
            EXPECT_EQ(upper, std::binary_search(P0.elements.begin(), P0.elements.end(), i));
        }
        // the radical of B is the upper unitriangular part
        long qpow = 1;
        for (int k = 0; k < g->positive_root_count(); ++k) qpow *= q;
        EXPECT_EQ(static_cast<long>(P0.radical.size()), qpow);
    }
    // the torus of SL3(F2) is trivial, so the Borel is the unitriangular group
    EXPECT_EQ(build_group("SL3", 2)->standard_parabolic(0).elements.size(), 8u);
    EXPECT_EQ(build_group("GL3", 3)->standard_parabolic(0).elements.size(), 8u * 27u);
    EXPECT_EQ(build_group("SL2", 5)->standard_parabolic(0).radical.size(), 5u);
}

TEST(FiniteReductive, ParabolicLattice) {
    for (auto [kind, q] : {std::pair{"SL3", 2}, {"Sp4", 2}, {"GL3", 2}, {"SL2xSL2", 3}, {"SL3", 3}}) {
        auto g = build_group(kind, q);
        const auto& G = g->group();
        std::vector<ParabolicSubgroup> P;
        for (unsigned a = 0; a <= g->full_mask(); ++a) P.push_back(g->standard_parabolic(a));
        for (unsigned a = 0; a <= g->full_mask(); ++a) {
            EXPECT_TRUE(G.is_subgroup(P[a].elements));
            EXPECT_TRUE(G.is_subgroup(P[a].radical));
            EXPECT_TRUE(G.is_subgroup(P[a].levi));
            EXPECT_EQ(P[a].radical.size() * P[a].levi.size(), P[a].elements.size());
            // |rad P_A| = q^{#(positive roots outside A)}
            long expected = 1;
            for (int b = 0; b < g->positive_root_count(); ++b) {
                bool inside = true;
                for (int i = 0; i < g->rank(); ++i)
                    if (g->roots()[b].coefficients[i] != 0 && !(a & (1u << i))) inside = false;
                if (!inside) expected *= q;
            }
            EXPECT_EQ(static_cast<long>(P[a].radical.size()), expected);
            // radical normal in P, unique factorization P = L * rad
            for (int x : P[a].elements)
                for (int u : P[a].radical)
                    ASSERT_TRUE(std::binary_search(P[a].radical.begin(), P[a].radical.end(), G.conj(x, u)));
            std::set<int> products;
            for (int l : P[a].levi)
                for (int u : P[a].radical) products.insert(G.mul(l, u));
            EXPECT_EQ(products.size(), P[a].elements.size());
            // Levi projection is a homomorphism onto the Levi
            for (int x : P[a].elements) {
                int lx = g->levi_part(x, a);
                ASSERT_TRUE(std::binary_search(P[a].levi.begin(), P[a].levi.end(), lx));
            }
            for (unsigned b = 0; b <= g->full_mask(); ++b) {
                std::vector<int> meet;
                std::set_intersection(P[a].elements.begin(), P[a].elements.end(), P[b].elements.begin(),
                                      P[b].elements.end(), std::back_inserter(meet));
                EXPECT_EQ(meet, P[a & b].elements);
                if ((a & b) == a) {
                    EXPECT_TRUE(subset_of(P[a].elements, P[b].elements));
                    EXPECT_TRUE(subset_of(P[b].radical, P[a].radical));
                }
            }
        }
    }
}

TEST(FiniteReductive, LeviGroups) {
    auto g = build_group("Sp4", 2);
    for (unsigned a = 0; a <= g->full_mask(); ++a) {
        auto L = g->levi_group(a);
        auto P = g->standard_parabolic(a);
        EXPECT_EQ(L.to_parent, P.levi);
        EXPECT_EQ(L.to_parent[0], 0);
    }
    EXPECT_EQ(g->levi_group(1).group->order(), 6);
    EXPECT_EQ(g->levi_group(0).group->order(), 1);
}

TEST(FiniteReductive, CartanMatrices) {
    EXPECT_EQ(build_group("Sp4", 2)->cartan(), (std::vector<std::vector<int>>{{2, -1}, {-2, 2}}));
    EXPECT_EQ(build_group("SL3", 2)->cartan(), (std::vector<std::vector<int>>{{2, -1}, {-1, 2}}));
    EXPECT_EQ(build_group("SL2xSL2", 2)->cartan(), (std::vector<std::vector<int>>{{2, 0}, {0, 2}}));
    EXPECT_EQ(build_group("SL2", 2)->rank(), 1);
    EXPECT_EQ(build_group("SL1", 2)->rank(), 0);
}
