#include "ep/facet_calculus.hpp"

#include <gtest/gtest.h>

using namespace ep;

TEST(SimplexCensusTest, FrozenExamples) {
    EXPECT_EQ(union_k_facet_count(2, 2, 0), 3);
    EXPECT_EQ(union_k_facet_count(2, 3, 1), 3);
    for (int l = 1; l <= 6; ++l)
        for (int k = 0; k <= l; ++k) EXPECT_EQ(union_k_facet_count(l, 1, k), binomial(l, k + 1));
    EXPECT_EQ(complement_census(2, 1).complement_total, 4);
    auto full = complement_census(3, 4);
    EXPECT_EQ(full.complement_total, 1);
    EXPECT_EQ(full.complement_counts_enumerated[0], 1);
    for (int l = 1; l <= 6; ++l) EXPECT_EQ(complement_census(l, l).complement_total_enumerated, 2);
}

TEST(SimplexCensusTest, FormulaMatchesEnumeration) {
    for (int l = 0; l <= 6; ++l)
        for (int m = 1; m <= l + 1; ++m) {
            auto c = complement_census(l, m);
            EXPECT_TRUE(c.consistent()) << l << " " << m;
            for (int k = 0; k <= l; ++k)
                EXPECT_EQ(union_k_facet_count(l, m, k), union_k_facet_count_enumerated(l, m, k));
        }
}

TEST(SimplexCensusTest, RejectsOutOfRange) {
    EXPECT_THROW(union_k_facet_count(2, 0, 0), std::invalid_argument);
    EXPECT_THROW(union_k_facet_count(2, 4, 0), std::invalid_argument);
    EXPECT_THROW(union_k_facet_count(2, 1, 3), std::invalid_argument);
    EXPECT_THROW(complement_census(2, 5), std::invalid_argument);
}

TEST(ComplementFacetsTest, LatticeAndConventions) {
    Apartment apt(CartanType::parse("A3"));
    auto ball = apt.ball(3);
    const auto& d = ball.chambers.back();
    for (std::vector<int> faces : {std::vector<int>{0}, {1, 2}, {0, 1, 3}, {0, 1, 2, 3}}) {
        auto cf = complement_facets(apt, d, faces);
        const std::size_t expected = 1u << (apt.rank() + 1 - faces.size());
        ASSERT_EQ(cf.size(), expected);
        EXPECT_TRUE(cf[0].removed_faces.empty());
        EXPECT_EQ(cf[0].facet, apt.as_facet(d));
        // the minimal facet is the full intersection of the complementary faces
        const auto& last = cf.back();
        EXPECT_EQ(static_cast<int>(last.removed_faces.size()), apt.rank() + 1 - static_cast<int>(faces.size()));
        for (const auto& a : cf)
            for (const auto& b : cf) {
                bool subset = std::includes(b.removed_faces.begin(), b.removed_faces.end(), a.removed_faces.begin(),
                                            a.removed_faces.end());
                if (subset) {
                    EXPECT_TRUE(a.facet.contains(b.facet));
                }
            }
    }
    EXPECT_THROW(complement_facets(apt, d, {}), std::invalid_argument);
}

TEST(PermissibleTest, RejectsDependentGradients) {
    RootSystem rs(CartanType::parse("C2"));
    try {
        make_permissible(rs, {AffineRoot{{1, 0}, 0}, AffineRoot{{-1, 0}, 3}});
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("dependent"), std::string::npos);
    }
    EXPECT_THROW(make_permissible(rs, {AffineRoot{{1, 2}, 0}}), std::invalid_argument);
}

TEST(PermissibleTest, RankOneStabilizes) {
    Apartment apt(CartanType::parse("A1"));
    for (long n : {0L, 1L, 3L, -2L}) {
        auto x = make_permissible(apt.roots(), {AffineRoot{{1}, n}});
        auto scan = permissible_scan(apt, x, apt.fundamental_chamber(), 8);
        EXPECT_TRUE(scan.stable);
        // the wall x = -n is a child face of [-n, -n+1] only when that alcove is not C0
        EXPECT_EQ(scan.count_within.back(), n == 0 ? 0 : 1);
    }
}

TEST(PermissibleTest, FullRankHasAtMostOneChamber) {
    for (const char* name : {"A2", "C2", "G2"}) {
        Apartment apt(CartanType::parse(name));
        auto ball = apt.ball(4);
        for (std::size_t i = 0; i < ball.size(); i += 3) {
            const auto& d = ball.chambers[i];
            for (int skip = 0; skip <= apt.rank(); ++skip) {
                std::vector<AffineRoot> walls;
                for (int j = 0; j <= apt.rank(); ++j)
                    if (j != skip) walls.push_back(apt.face(d, j).wall);
                auto x = make_permissible(apt.roots(), walls);
                auto scan = permissible_scan(apt, x, apt.fundamental_chamber(), 5);
                EXPECT_LE(scan.count_within.back(), 1) << name;
                EXPECT_GE(scan.incident, 1);
            }
        }
    }
}

TEST(PermissibleTest, C2FixturesStabilize) {
    Apartment apt(CartanType::parse("C2"));
    const std::vector<std::vector<AffineRoot>> fixtures = {
        {AffineRoot{{1, 0}, 0}},
        {AffineRoot{{0, 1}, -2}},
        {AffineRoot{{1, 1}, 1}},
        {AffineRoot{{2, 1}, -3}},
        {AffineRoot{{1, 0}, -1}, AffineRoot{{0, 1}, 0}},
        {AffineRoot{{1, 1}, -2}, AffineRoot{{2, 1}, -3}},
    };
    for (const auto& f : fixtures) {
        auto x = make_permissible(apt.roots(), f);
        auto scan = permissible_scan(apt, x, apt.fundamental_chamber(), 10);
        EXPECT_TRUE(scan.stable) << describe(f[0]);
    }
}

TEST(PermissibleTest, NonIncidentSetRejected) {
    // two perpendicular walls through the special vertex are never faces of one alcove
    Apartment apt(CartanType::parse("C2"));
    auto x = make_permissible(apt.roots(), {AffineRoot{{1, 0}, 0}, AffineRoot{{1, 1}, 0}});
    EXPECT_THROW(permissible_scan(apt, x, apt.fundamental_chamber(), 4), std::invalid_argument);
}
