#include "ep/harish_chandra.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace ep;

namespace {

std::shared_ptr<const HarishChandraData> hc_for(const std::string& kind, int q) {
    static std::map<std::pair<std::string, int>, std::shared_ptr<const HarishChandraData>> cache;
    auto key = std::make_pair(kind, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto hc = std::make_shared<const HarishChandraData>(build_group(kind, q));
    cache.emplace(key, hc);
    return hc;
}

std::multiset<long> degrees_of(const CharacterTable& t) { return {t.degrees.begin(), t.degrees.end()}; }

}  // namespace

TEST(Cyclotomic, PolynomialsAndRoots) {
    EXPECT_EQ(cyclotomic_polynomial(1), (std::vector<long>{-1, 1}));
    EXPECT_EQ(cyclotomic_polynomial(12), (std::vector<long>{1, 0, -1, 0, 1}));
    EXPECT_EQ(cyclotomic_polynomial(15), (std::vector<long>{1, -1, 0, 1, -1, 1, 0, -1, 1}));
    for (int n : {1, 2, 3, 4, 5, 6, 8, 9, 12, 15, 20, 24, 60, 84}) {
        EXPECT_EQ(static_cast<int>(cyclotomic_polynomial(n).size()) - 1, euler_phi(n));
        Cyclotomic z = Cyclotomic::root_of_unity(n, 1), acc = Cyclotomic::one(n), sum(n);
        for (int k = 0; k < n; ++k) {
            sum += acc;
            acc *= z;
        }
        EXPECT_EQ(acc, Cyclotomic::one(n));
        EXPECT_EQ(sum, Cyclotomic(n, n == 1 ? 1 : 0));
        EXPECT_EQ(z * z.conj(), Cyclotomic::one(n));
    }
}

TEST(Cyclotomic, EmbeddingAndSubfields) {
    // sqrt(-3) = 2 z3 + 1 lies in Q(zeta_3) and in Q(zeta_12) but not in Q(i)
    Cyclotomic s = Cyclotomic::root_of_unity(3, 1) * Rational(2) + Cyclotomic::one(3);
    EXPECT_EQ(s * s, Cyclotomic(3, -3));
    Cyclotomic t = s.embed(12);
    EXPECT_EQ(t * t, Cyclotomic(12, -3));
    EXPECT_TRUE(in_subfield(t, 3));
    EXPECT_FALSE(in_subfield(t, 4));
    EXPECT_EQ(restrict_to(t, 3), s);
    EXPECT_EQ(minimal_conductor({t, Cyclotomic(12, 5)}, 12), 3);
    EXPECT_EQ(minimal_conductor({Cyclotomic::root_of_unity(12, 6)}, 12), 1);
    EXPECT_THROW(Cyclotomic::one(3) + Cyclotomic::one(4), std::invalid_argument);
    EXPECT_THROW(restrict_to(Cyclotomic::root_of_unity(12, 1), 3), std::domain_error);
    EXPECT_EQ(Cyclotomic(5, Rational(-3, 4)).to_string(), "-3/4");
}

TEST(GroupAlgebra, ConvolutionBasics) {
    auto g = build_group("SL2", 3);
    auto G = g->group_ptr();
    for (int x = 0; x < G->order(); x += 5)
        for (int y = 0; y < G->order(); y += 7)
            EXPECT_EQ(convolve(AlgebraElement::delta(G, 1, x), AlgebraElement::delta(G, 1, y)),
                      AlgebraElement::delta(G, 1, G->mul(x, y)));
    auto B = g->standard_parabolic(0);
    auto eU = subgroup_idempotent(G, 1, B.radical);
    EXPECT_EQ(convolve(eU, eU), eU);
    auto eG = subgroup_idempotent(G, 1, g->standard_parabolic(1).elements);
    EXPECT_EQ(convolve(eG, eG), eG);
    EXPECT_EQ(subgroup_idempotent(G, 1, {0}), AlgebraElement::delta(G, 1, 0));
    EXPECT_EQ(subgroup_idempotent(G, 1, B.elements).support().size(), B.elements.size());
    EXPECT_THROW(subgroup_idempotent(G, 1, {0, 1}), std::invalid_argument);
    // associativity on a few random elements
    AlgebraElement f(G, 3), h(G, 3), k(G, 3);
    for (int i = 0; i < 5; ++i) {
        f[(7 * i + 1) % 24] += Cyclotomic::root_of_unity(3, i);
        h[(5 * i + 2) % 24] += Cyclotomic(3, i - 2);
        k[(11 * i + 3) % 24] += Cyclotomic::root_of_unity(3, 2 * i + 1);
    }
    EXPECT_EQ(convolve(convolve(f, h), k), convolve(f, convolve(h, k)));
}

TEST(CharacterTables, SymmetricGroupOnThree) {
    auto g = build_group("GL2", 2);
    auto t = character_table(g->group_ptr());
    EXPECT_EQ(degrees_of(t), (std::multiset<long>{1, 1, 2}));
    EXPECT_EQ(t.conductor, 1);
    // classical table of S3 indexed by element order
    std::map<int, std::vector<long>> by_order = {{1, {1, 1, 2}}, {2, {1, -1, 0}}, {3, {1, 1, -1}}};
    for (int x = 0; x < g->group().order(); ++x) {
        int o = g->group().element_order(x);
        for (int chi = 0; chi < 3; ++chi) EXPECT_EQ(t.value(chi, x), Cyclotomic(1, by_order[o][chi]));
    }
}

TEST(CharacterTables, ClassicalDegrees) {
    struct Case { const char* kind; int q; std::multiset<long> degrees; };
    for (const auto& c : {Case{"SL2", 3, {1, 1, 1, 2, 2, 2, 3}}, Case{"GL2", 3, {1, 1, 2, 2, 2, 3, 3, 4}},
                          Case{"SL3", 2, {1, 3, 3, 6, 7, 8}}, Case{"Sp4", 2, {1, 1, 5, 5, 5, 5, 9, 9, 10, 10, 16}},
                          Case{"SL2xSL2", 2, {1, 1, 1, 1, 2, 2, 2, 2, 4}}}) {
        auto g = build_group(c.kind, c.q);
        auto t = character_table(g->group_ptr());
        EXPECT_EQ(degrees_of(t), c.degrees) << g->name();
        EXPECT_EQ(t.size(), g->group().classes().count());
        long s = 0;
        for (long d : t.degrees) s += d * d;
        EXPECT_EQ(s, g->group().order());
        EXPECT_TRUE(t.orthogonality_holds());
        EXPECT_EQ(t.degrees[0], 1);
        for (const auto& v : t.values[0]) EXPECT_EQ(v, Cyclotomic::one(t.conductor));
        EXPECT_EQ((t.prime - 1) % g->group().exponent(), 0);
        EXPECT_GT(t.prime * t.prime, 4L * g->group().order());
    }
    EXPECT_EQ(character_table(build_group("SL3", 2)->group_ptr()).conductor, 7);
}

TEST(CharacterTables, InvariantDimensions) {
    auto g = build_group("GL2", 2);
    auto t = character_table(g->group_ptr());
    auto U = g->standard_parabolic(0).radical;
    EXPECT_EQ(invariant_dim(t, 0, U), 1);
    EXPECT_EQ(invariant_dim(t, 1, U), 0);  // sign
    for (auto [kind, q] : {std::pair{"GL2", 3}, {"SL3", 2}, {"Sp4", 2}}) {
        auto h = build_group(kind, q);
        auto th = character_table(h->group_ptr());
        for (unsigned a = 0; a <= h->full_mask(); ++a) {
            auto V = h->standard_parabolic(a).radical;
            Rational s = 0;
            for (int chi = 0; chi < th.size(); ++chi) {
                EXPECT_EQ(invariant_dim(th, 0, V), 1);
                s += invariant_dim(th, chi, V) * th.degrees[chi];
            }
            EXPECT_EQ(s, ratio(h->group().order(), static_cast<long>(V.size())));
        }
    }
}

TEST(HarishChandra, CuspidalCountGL2) {
    for (int q : {2, 3, 4, 5}) {
        auto g = build_group("GL2", q);
        auto L = g->levi_group(g->full_mask());
        auto t = character_table(L.group);
        int count = 0;
        for (int chi = 0; chi < t.size(); ++chi)
            if (is_cuspidal(*g, L, t, chi)) {
                ++count;
                EXPECT_EQ(t.degrees[chi], q - 1);
            }
        EXPECT_EQ(count, q * (q - 1) / 2) << "q=" << q;
    }
}

TEST(HarishChandra, ClassCensus) {
    auto hc = hc_for("GL2", 2);
    ASSERT_EQ(hc->classes().size(), 2u);
    EXPECT_EQ(hc->classes()[0].levi_subset, 0u);
    EXPECT_EQ(hc->classes()[0].character, 0);
    EXPECT_EQ(hc->classes()[1].levi_subset, 1u);
    // principal block of GL2(F2): trivial and the degree-2 character
    std::vector<long> degs;
    for (int tau : hc->block_characters(1, 0)) degs.push_back(hc->levi(1).table.degrees[tau]);
    EXPECT_EQ(degs, (std::vector<long>{1, 2}));

    auto hc3 = hc_for("GL2", 3);
    // torus characters up to swapping, plus three cuspidals
    EXPECT_EQ(hc3->classes().size(), 6u);
    int torus = 0;
    for (const auto& c : hc3->classes()) torus += c.levi_subset == 0;
    EXPECT_EQ(torus, 3);
    for (const auto& c : hc3->classes())
        if (c.levi_subset == 0 && c.members.size() == 2) {
            EXPECT_EQ(hc3->block_characters(1, c.index).size(), 1u);
            EXPECT_EQ(hc3->levi(1).table.degrees[hc3->block_characters(1, c.index)[0]], 4);
        }
    for (const auto* h : {hc.get(), hc3.get(), hc_for("SL3", 2).get(), hc_for("Sp4", 2).get()})
        EXPECT_TRUE(h->independence_discrepancies().empty()) << h->independence_discrepancies().front();
}

TEST(HarishChandra, PrincipalBorelIdempotentIsBorelAverage) {
    auto hc = hc_for("GL2", 3);
    const auto& g = hc->group();
    auto eB = hc->parabolic_block_idempotent(0, 0);
    EXPECT_EQ(eB, subgroup_idempotent(hc->finite_group(), hc->conductor(), g.standard_parabolic(0).elements));
    // a class with Levi G gives zero on proper parabolics
    for (const auto& c : hc->classes())
        if (c.levi_subset == g.full_mask()) {
            EXPECT_TRUE(hc->parabolic_block_idempotent(0, c.index).is_zero());
        }
}

TEST(HarishChandra, RadicalAlternatingSums) {
    for (auto [kind, q] : {std::pair{"GL2", 2}, {"SL3", 2}, {"Sp4", 2}, {"SL2xSL2", 2}}) {
        auto g = build_group(kind, q);
        auto rep = verify_radical_sums_all(*g);
        EXPECT_TRUE(rep.all_hold()) << g->name();
        const std::size_t expected = g->rank() == 1 ? 1 : 5;
        EXPECT_EQ(rep.checks.size(), expected);
        EXPECT_THROW(verify_radical_vanishing(*g, g->full_mask(), g->full_mask()), std::invalid_argument);
    }
    // the alternating sum alone is not zero
    auto g = build_group("GL2", 2);
    auto G = g->group_ptr();
    auto s = subgroup_idempotent(G, 1, g->standard_parabolic(0).radical) -
             subgroup_idempotent(G, 1, g->standard_parabolic(1).radical);
    EXPECT_FALSE(convolve(s, AlgebraElement::delta(G, 1, 0)).is_zero());
}

TEST(HarishChandra, BlockIdentitiesSmallGroups) {
    for (auto [kind, q] : {std::pair{"GL2", 2}, {"GL2", 3}, {"SL2", 3}, {"SL3", 2}, {"SL2xSL2", 2}}) {
        auto hc = hc_for(kind, q);
        for (std::size_t c = 0; c < hc->classes().size(); ++c) {
            auto rep = verify_block_identities(*hc, static_cast<int>(c));
            for (const auto& chk : rep.checks) EXPECT_TRUE(chk.holds) << rep.group << " " << chk.identity << " " << chk.instance;
        }
        auto part = verify_block_partition(*hc, 7);
        for (const auto& chk : part.checks) EXPECT_TRUE(chk.holds) << part.group << " " << chk.identity << " " << chk.instance;
    }
}
