#include <gtest/gtest.h>

#include <random>

#include "fieldmap/error.hpp"
#include "fieldmap/fields.hpp"
#include "support.hpp"

using namespace fieldmap;
using fmtest::close;
using fmtest::make_store;

namespace {

CorpusStore four_term_store() {
    const auto& four = fmtest::expected()["four_term"];
    std::vector<fmtest::Occ> occ;
    for (const auto& [label, n] : four["occurrences"].items()) occ.push_back({label, 2000, n.get<Count>()});
    std::vector<fmtest::Cooc> co;
    for (const auto& p : four["cooccurrences"])
        co.push_back({p[0].get<std::string>(), p[1].get<std::string>(), 2000, p[2].get<Count>()});
    return make_store(occ, co);
}

Community community_of(const CorpusStore& store, std::vector<std::string> labels) {
    Community c;
    for (const auto& l : labels) c.members.push_back(store.require(l));
    std::ranges::sort(c.members);
    return c;
}

}  // namespace

TEST(Indexes, SingletonFieldIsOne) {
    const auto store = make_store({{"a", 2000, 4}, {"b", 2000, 4}}, {{"a", "b", 2000, 1}});
    const Community c = community_of(store, {"a"});
    const ProximityParams p{3.0, 0.0, {2000, 2000}};
    EXPECT_EQ(specificity_index(store, c, store.require("a"), p), 1.0);
    EXPECT_EQ(genericity_index(store, c, store.require("a"), p), 1.0);
}

TEST(Indexes, IdenticalMarginalsGiveEqualIndexes) {
    const auto store = make_store({{"a", 2000, 6}, {"b", 2000, 6}}, {{"a", "b", 2000, 4}});
    const Community c = community_of(store, {"a", "b"});
    for (double alpha : {0.1, 1.0, 2.5}) {
        const ProximityParams p{alpha, 0.0, {2000, 2000}};
        for (const char* w : {"a", "b"})
            EXPECT_EQ(specificity_index(store, c, store.require(w), p), genericity_index(store, c, store.require(w), p));
    }
}

TEST(Indexes, FourTermOracle) {
    const auto& four = fmtest::expected()["four_term"];
    const auto store = four_term_store();
    const Community c = community_of(store, {"w1", "w2", "w3", "w4"});
    const ProximityParams p{four["alpha"].get<double>(), 0.0, {2000, 2000}};
    for (const auto& [label, want] : four["indexes"].items()) {
        const TermId w = store.require(label);
        EXPECT_TRUE(close(specificity_index(store, c, w, p), want["i_s"].get<double>())) << label;
        EXPECT_TRUE(close(genericity_index(store, c, w, p), want["i_g"].get<double>())) << label;
    }
}

TEST(Indexes, NonMemberAndAbsentMember) {
    const auto store = make_store({{"a", 2000, 4}, {"b", 2000, 4}, {"c", 2001, 4}}, {{"a", "b", 2000, 1}});
    const ProximityParams p{1.0, 0.0, {2000, 2000}};
    EXPECT_THROW(specificity_index(store, community_of(store, {"a"}), store.require("b"), p), ParameterError);
    try {
        genericity_index(store, community_of(store, {"a", "c"}), store.require("a"), p);
        FAIL();
    } catch (const UndefinedTermError& e) {
        EXPECT_EQ(e.term(), store.require("c").index());
    }
}

// i_g at alpha equals i_s at 1/alpha; bounds and the self-term floor hold.
TEST(Indexes, RandomFieldsDualityAndBounds) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<Count> n(1, 300);
    std::uniform_real_distribution<double> log_alpha(std::log(0.05), std::log(20.0));
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t size = 2 + trial % 6;
        std::vector<fmtest::Occ> occ;
        std::vector<Count> marg;
        for (std::size_t i = 0; i < size; ++i) {
            marg.push_back(n(rng));
            occ.push_back({"t" + std::to_string(i), 2000, marg.back()});
        }
        std::vector<fmtest::Cooc> co;
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = i + 1; j < size; ++j)
                co.push_back({"t" + std::to_string(i), "t" + std::to_string(j), 2000,
                              std::uniform_int_distribution<Count>(0, std::min(marg[i], marg[j]))(rng)});
        const auto store = make_store(occ, co);
        Community c;
        for (std::size_t i = 0; i < size; ++i) c.members.push_back(TermId(static_cast<std::uint32_t>(i)));
        const double alpha = std::exp(log_alpha(rng));
        const ProximityParams p{alpha, 0.0, {2000, 2000}};
        for (TermId w : c.members) {
            const double ig = genericity_index(store, c, w, p);
            const double is = specificity_index(store, c, w, p);
            EXPECT_TRUE(close(ig, specificity_index(store, c, w, dual_params(p))));
            for (double v : {ig, is}) {
                EXPECT_GE(v, 1.0 / static_cast<double>(size));
                EXPECT_LE(v, 1.0);
            }
        }
    }
}

TEST(IntraWeight, SumsOverOtherMembers) {
    const auto store = four_term_store();
    const auto counts = store.window_counts({2000, 2000});
    const Community c = community_of(store, {"w1", "w2", "w3"});
    EXPECT_EQ(intra_weight(counts, c.members, store.require("w1")), 17u);
    EXPECT_EQ(intra_weight(counts, c.members, store.require("w3")), 11u);
}

TEST(PreviousWindow, Conventions) {
    EXPECT_EQ(previous_window({2002, 2005}, PeriodConvention::adjacent), (TimeWindow{1998, 2001}));
    EXPECT_EQ(previous_window({2002, 2005}, PeriodConvention::shared_boundary), (TimeWindow{1999, 2002}));
    EXPECT_EQ(previous_window({2000, 2000}, PeriodConvention::adjacent), (TimeWindow{1999, 1999}));
}

TEST(Growth, Ratios) {
    const auto store = make_store({{"a", 2000, 10}, {"a", 2001, 25}, {"b", 2000, 7}, {"b", 2001, 7},
                                   {"c", 2000, 0}, {"c", 2001, 3}},
                                  {});
    const Community c = community_of(store, {"a", "b", "c"});
    EXPECT_EQ(term_growth(store, c.members, store.require("a"), {2001, 2001}), 2.5);
    EXPECT_EQ(term_growth(store, c.members, store.require("b"), {2001, 2001}), 1.0);
    EXPECT_FALSE(term_growth(store, c.members, store.require("c"), {2001, 2001}));
    EXPECT_THROW(term_growth(store, c.members, store.require("a"), {2000, 2000}), RangeError);
    EXPECT_THROW(term_growth(store, c.members, store.require("a"), {2000, 2001}), RangeError);
}

TEST(Growth, SharedBoundaryCountsTheFirstYearTwice) {
    const auto store = make_store({{"a", 2000, 2}, {"a", 2001, 4}, {"a", 2002, 8}}, {});
    const std::vector<TermId> field{store.require("a")};
    EXPECT_EQ(term_growth(store, field, field[0], {2001, 2002}, {PeriodConvention::shared_boundary}), 2.0);
    EXPECT_THROW(term_growth(store, field, field[0], {2001, 2002}, {PeriodConvention::adjacent}), RangeError);
}

TEST(Growth, IntraCooccurrenceBasis) {
    const auto store = make_store({{"a", 2000, 5}, {"b", 2000, 5}, {"a", 2001, 9}, {"b", 2001, 9}},
                                  {{"a", "b", 2000, 2}, {"a", "b", 2001, 6}});
    const std::vector<TermId> field{store.require("a"), store.require("b")};
    EXPECT_EQ(term_growth(store, field, field[0], {2001, 2001}, {PeriodConvention::adjacent, GrowthBasis::intra_cooccurrences}),
              3.0);
    EXPECT_EQ(parse_growth_basis("intra_cooccurrences"), GrowthBasis::intra_cooccurrences);
    EXPECT_THROW(parse_growth_basis("citations"), ParameterError);
}

TEST(GrowthColor, Ramp) {
    EXPECT_EQ(growth_color(2.5), "#b2182b");
    EXPECT_EQ(growth_color(40.0), "#b2182b");
    EXPECT_EQ(growth_color(1.0), "#ffffff");
    EXPECT_EQ(growth_color(0.0), "#2166ac");
    EXPECT_EQ(growth_color(std::nullopt), "#cccccc");
    EXPECT_NE(growth_color(0.5), growth_color(1.0));
    EXPECT_NE(growth_color(1.75), growth_color(2.5));
}

TEST(BuildField, IdenticalCountsTieOnLabel) {
    const auto store = make_store({{"c", 2000, 5}, {"a", 2000, 5}, {"b", 2000, 5}},
                                  {{"a", "b", 2000, 3}, {"a", "c", 2000, 3}, {"b", "c", 2000, 3}});
    const Community c = community_of(store, {"a", "b", "c"});
    const auto f = build_field(store, c, {2.0, 0.0, {2000, 2000}});
    for (const auto& m : f.members) {
        EXPECT_EQ(m.specificity, f.members[0].specificity);
        EXPECT_EQ(m.genericity, f.members[0].genericity);
        EXPECT_FALSE(m.growth);  // no previous period in the corpus
    }
    EXPECT_EQ(store.label(f.label_generic), "a");
    EXPECT_EQ(store.label(f.label_specific), "a");
}

// Labels follow max index, then max intra_weight, then the smaller label.
TEST(BuildField, LabelRuleOnFixtureProfiles) {
    const auto store = fmtest::fixture_store();
    const auto& fx = fmtest::expected()["fixture"];
    for (double alpha : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        for (const auto& want : fx["fields"]) {
            Community c;
            for (const auto& l : want["members"]) c.members.push_back(store.require(l.get<std::string>()));
            std::ranges::sort(c.members);
            const auto f = build_field(store, c, {alpha, 0.0, {2002, 2005}});
            auto best = [&](auto index) {
                auto ranked = f.members;
                std::ranges::sort(ranked, [&](const TermFieldProfile& l, const TermFieldProfile& r) {
                    if (index(l) != index(r)) return index(l) > index(r);
                    if (l.intra_weight != r.intra_weight) return l.intra_weight > r.intra_weight;
                    return store.label(l.term) < store.label(r.term);
                });
                return ranked.front().term;
            };
            EXPECT_EQ(f.label_generic, best([](const TermFieldProfile& m) { return m.genericity; }));
            EXPECT_EQ(f.label_specific, best([](const TermFieldProfile& m) { return m.specificity; }));
        }
    }
}

TEST(BuildField, FixtureProfilesMatchOracle) {
    const auto& fx = fmtest::expected()["fixture"];
    const auto store = fmtest::fixture_store();
    const ProximityParams p{fx["alpha"].get<double>(), fx["s"].get<double>(),
                            {fx["window"][0].get<int>(), fx["window"][1].get<int>()}};
    for (const auto& want : fx["fields"]) {
        Community c;
        c.id = want["id"].get<std::size_t>();
        for (const auto& l : want["members"]) c.members.push_back(store.require(l.get<std::string>()));
        std::ranges::sort(c.members);
        const auto f = build_field(store, c, p);
        EXPECT_EQ(f.id, c.id);
        EXPECT_EQ(f.member_ids(), c.members);
        EXPECT_EQ(store.label(f.label_generic), want["label_generic"].get<std::string>());
        EXPECT_EQ(store.label(f.label_specific), want["label_specific"].get<std::string>());
        for (const auto& m : f.members) {
            const auto& row = want["profile"][store.label(m.term)];
            EXPECT_TRUE(close(m.specificity, row["i_s"].get<double>())) << store.label(m.term);
            EXPECT_TRUE(close(m.genericity, row["i_g"].get<double>())) << store.label(m.term);
            EXPECT_EQ(m.intra_weight, row["intra_weight"].get<Count>());
            ASSERT_TRUE(m.growth);
            EXPECT_TRUE(close(*m.growth, row["growth"].get<double>()));
        }
    }
}

// In the hub field the hub has the extreme index on the side the formula's
// orientation predicts: with alpha > 1 every member's proximity toward the
// hub is large, so the hub collects the largest i_s.
TEST(BuildField, HubCarriesExtremeIndex) {
    const auto store = fmtest::fixture_store();
    const Community c = community_of(store, {"complex systems", "self organization", "emergence",
                                             "agent based model", "cellular automata", "network dynamics"});
    const auto high = build_field(store, c, {2.0, 0.0, {2002, 2005}});
    EXPECT_EQ(store.label(high.label_specific), "complex systems");
    const auto low = build_field(store, c, {0.5, 0.0, {2002, 2005}});
    EXPECT_EQ(store.label(low.label_generic), "complex systems");
}
