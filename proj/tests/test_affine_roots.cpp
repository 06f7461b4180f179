#include "ep/affine_roots.hpp"

#include <gtest/gtest.h>

using namespace ep;

namespace {

RootSystem rs(const char* name) { return RootSystem(CartanType::parse(name)); }

}  // namespace

TEST(CartanTypeTest, AdmittedAndRejected) {
    for (const char* ok : {"A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4"})
        EXPECT_NO_THROW(CartanType::parse(ok)) << ok;
    for (const char* bad : {"A5", "B1", "C1", "D3", "D5", "G3", "F2", "E6", "X"}) {
        try {
            CartanType::parse(bad);
            ADD_FAILURE() << bad;
        } catch (const std::invalid_argument& e) {
            EXPECT_NE(std::string(e.what()).find("unsupported"), std::string::npos);
        }
    }
}

TEST(RootSystemTest, RootCounts) {
    // Frozen counts from reflection-closure enumeration.
    const std::vector<std::pair<const char*, int>> expected = {
        {"A1", 2},  {"A2", 6},  {"A3", 12}, {"A4", 20}, {"B2", 8},  {"B3", 18}, {"B4", 32},
        {"C2", 8},  {"C3", 18}, {"C4", 32}, {"D4", 24}, {"G2", 12}, {"F4", 48}};
    for (const auto& [name, n] : expected) EXPECT_EQ(rs(name).num_roots(), n) << name;
}

TEST(RootSystemTest, WeylOrders) {
    const std::vector<std::pair<const char*, std::size_t>> expected = {
        {"A1", 2}, {"A2", 6}, {"A3", 24}, {"B2", 8}, {"C3", 48}, {"D4", 192}, {"G2", 12}, {"F4", 1152}};
    for (const auto& [name, n] : expected) {
        auto r = rs(name);
        EXPECT_EQ(r.weyl_order(), n) << name;
        EXPECT_EQ(r.positive_systems().size(), n) << name;
    }
}

TEST(RootSystemTest, HighestRoots) {
    EXPECT_EQ(rs("A2").highest_root(), (IntVec{1, 1}));
    EXPECT_EQ(rs("C2").highest_root(), (IntVec{2, 1}));
    EXPECT_EQ(rs("B2").highest_root(), (IntVec{1, 2}));
    EXPECT_EQ(rs("G2").highest_root(), (IntVec{3, 2}));
    EXPECT_EQ(rs("F4").highest_root(), (IntVec{2, 3, 4, 2}));
    EXPECT_EQ(rs("D4").highest_root(), (IntVec{1, 2, 1, 1}));
    EXPECT_EQ(rs("C3").highest_root(), (IntVec{2, 2, 1}));
    EXPECT_EQ(rs("B3").highest_root(), (IntVec{1, 2, 2}));
}

TEST(RootSystemTest, LongRootConventionC2) {
    auto r = rs("C2");
    EXPECT_FALSE(r.is_long(r.index_of({1, 0})));
    EXPECT_TRUE(r.is_long(r.index_of({0, 1})));
    EXPECT_TRUE(r.is_long(r.index_of({2, 1})));
}

TEST(RootSystemTest, StructuralInvariants) {
    for (const char* name : {"A1", "A3", "B3", "C4", "D4", "G2", "F4"}) {
        auto r = rs(name);
        const int n = r.rank();
        for (int i = 0; i < r.num_positive(); ++i) {
            EXPECT_EQ(r.root(r.negative_of(i)), negate(r.root(i)));
            for (long c : r.root(i)) EXPECT_GE(c, 0);
        }
        for (int i = 0; i < n; ++i) {
            IntVec e(n, 0);
            e[i] = 1;
            EXPECT_TRUE(r.is_positive(r.index_of(e)));
            for (const auto& c : r.roots()) EXPECT_TRUE(r.contains(r.reflect_root(c, i)));
        }
        // coweight pairing equals the simple-root coefficient
        auto cw = r.fundamental_coweights();
        for (int a = 0; a < n; ++a)
            for (int g = 0; g < r.num_positive(); ++g)
                EXPECT_EQ(dot(r.root(g), cw[a]), Rational(r.root(g)[a]));
    }
}

TEST(RootSystemTest, AmbientCoweightsAreDualBasis) {
    for (const char* name : {"A1", "A2", "C2", "G2", "F4", "D4"}) {
        auto r = rs(name);
        auto lam = r.fundamental_coweights_ambient();
        const auto& alpha = r.simple_roots_ambient();
        for (int i = 0; i < r.rank(); ++i)
            for (int j = 0; j < r.rank(); ++j) {
                Rational s = 0;
                for (std::size_t k = 0; k < lam[i].size(); ++k) s += lam[i][k] * alpha[j][k];
                EXPECT_EQ(s, Rational(i == j ? 1 : 0)) << name;
            }
    }
    auto a1 = rs("A1");
    EXPECT_EQ(a1.fundamental_coweights_ambient()[0], (RatVec{Rational(1, 2), Rational(-1, 2)}));
}

TEST(RootSystemTest, C2CoweightValuesOnPositiveRoots) {
    auto r = rs("C2");
    auto cw = r.fundamental_coweights();
    // expansion coefficients of (1,0),(0,1),(1,1),(2,1)
    std::vector<std::pair<long, long>> exp = {{1, 0}, {0, 1}, {1, 1}, {2, 1}};
    for (int g = 0; g < r.num_positive(); ++g) {
        EXPECT_EQ(dot(r.root(g), cw[0]), Rational(exp[g].first));
        EXPECT_EQ(dot(r.root(g), cw[1]), Rational(exp[g].second));
    }
}

TEST(AffineRootTest, Evaluation) {
    auto r = rs("A2");
    auto d0 = r.simple_affine_roots();
    ASSERT_EQ(d0.size(), 3u);
    RatVec origin(2, Rational(0));
    EXPECT_EQ(affine_eval(d0[0], origin), Rational(1));
    EXPECT_EQ(d0[0].gradient, (IntVec{-1, -1}));
    for (int i = 1; i <= 2; ++i) EXPECT_EQ(affine_eval(d0[i], origin), Rational(0));
    AffineRoot psi{{1, 0}, 3};
    RatVec x{Rational(2, 3), Rational(-5, 7)};
    EXPECT_EQ((-psi)(x), -psi(x));
    EXPECT_EQ(psi(x), Rational(11, 3));
    int nonzero_levels = 0;
    for (const auto& p : d0) nonzero_levels += p.level != 0;
    EXPECT_EQ(nonzero_levels, 1);
    auto a1 = rs("A1").simple_affine_roots();
    EXPECT_EQ(a1[0], (AffineRoot{{-1}, 1}));
    EXPECT_EQ(a1[1], (AffineRoot{{1}, 0}));
}

TEST(AffineRootTest, C2AlcoveHasPositiveVolume) {
    auto r = rs("C2");
    auto d0 = r.simple_affine_roots();
    // vertices: solve each pair of walls for equality
    std::vector<RatVec> verts;
    for (int skip = 0; skip < 3; ++skip) {
        std::vector<RatVec> m;
        RatVec b;
        for (int i = 0; i < 3; ++i) {
            if (i == skip) continue;
            RatVec row;
            for (long c : d0[i].gradient) row.emplace_back(c);
            m.push_back(row);
            b.emplace_back(-d0[i].level);
        }
        verts.push_back(solve(m, b));
    }
    Rational det = (verts[1][0] - verts[0][0]) * (verts[2][1] - verts[0][1]) -
                   (verts[1][1] - verts[0][1]) * (verts[2][0] - verts[0][0]);
    EXPECT_NE(det, 0);
    EXPECT_EQ(matrix_rank(std::vector<IntVec>{d0[0].gradient, d0[1].gradient, d0[2].gradient}), 2);
}

TEST(RootSystemTest, ParabolicSubsets) {
    auto r = rs("A2");
    std::vector<int> pos{0, 1, 2};
    EXPECT_TRUE(r.is_parabolic_subset(pos));
    std::vector<int> levi{0, r.negative_of(0)};
    EXPECT_TRUE(r.is_closed_subset(levi));
    EXPECT_FALSE(r.is_parabolic_subset(levi));
}
