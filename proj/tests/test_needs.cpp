#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socialsim/needs.hpp"
#include "socialsim/util.hpp"

#include <algorithm>
#include <random>

using namespace socialsim;

namespace {

NeedState drive_state(double hunger, double fatigue) {
    NeedState s;
    s.values = {{"hunger", hunger}, {"fatigue", fatigue}};
    s.caps = {{"hunger", 1.0}, {"fatigue", 1.0}};
    s.growth = {{"hunger", 0.05}, {"fatigue", 0.03}};
    s.tier_of = {{"hunger", NeedTier::physiological}, {"fatigue", NeedTier::physiological}};
    return s;
}

EventAppraisal appraisal_of(std::map<std::string, double> deltas) {
    EventAppraisal a;
    a.event.description = "synthetic";
    a.deltas = std::move(deltas);
    return a;
}

} // namespace

TEST_CASE("zero-input identity") {
    NeedState s = drive_state(0.4, 0.2);
    s.values["social_need"] = 0.5;
    s.caps["social_need"] = 1.0;
    s.tier_of["social_need"] = NeedTier::social;
    s.growth.clear(); // no accumulation this tick

    NeedState stepped = step_physiological(s, {});
    CHECK(stepped.values == s.values);

    NeedState appraised = apply_event_appraisals(s, {}, {});
    CHECK(appraised.values == s.values);
}

TEST_CASE("monotone accumulation without satisfaction") {
    NeedState s = drive_state(0.1, 0.9);
    for (int i = 0; i < 50; ++i) {
        NeedState next = step_physiological(s, {});
        CHECK(next.values["hunger"] >= s.values["hunger"]);
        CHECK(next.values["fatigue"] >= s.values["fatigue"]);
        s = next;
    }
    // growth 0.05/tick from 0.1 saturates inside 50 ticks
    CHECK(s.values["hunger"] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("worked needs update example") {
    // hunger 0.4 -> 0.5, fatigue 0.4 -> 0.3, social_need 0.75 -> 0.8; all three
    // move through event appraisals here, so none carries a growth entry.
    NeedState s;
    s.values = {{"hunger", 0.4}, {"fatigue", 0.4}, {"social_need", 0.75}};
    s.caps = {{"hunger", 1.0}, {"fatigue", 1.0}, {"social_need", 1.0}};
    s.tier_of = {{"hunger", NeedTier::physiological},
                 {"fatigue", NeedTier::physiological},
                 {"social_need", NeedTier::social}};

    std::vector<EventAppraisal> active = {
        appraisal_of({{"fatigue", -0.1}, {"hunger", 0.1}})}; // physical activity
    std::vector<EventAppraisal> passive = {
        appraisal_of({{"social_need", 0.05}})}; // social rejection

    NeedState next = apply_event_appraisals(s, active, passive);
    CHECK(next.values["hunger"] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(next.values["fatigue"] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(next.values["social_need"] == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("randomized sequences stay in bounds") {
    std::mt19937_64 rng(20240117);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> delta(-0.5, 0.5);
    std::uniform_int_distribution<int> coin(0, 1);

    const std::vector<std::string> drive_ids = {"hunger", "fatigue"};
    const std::vector<std::string> event_ids = {"social_need", "safety"};

    for (int trial = 0; trial < 10000; ++trial) {
        NeedState s;
        for (const auto& id : drive_ids) {
            s.values[id] = unit(rng);
            s.caps[id] = 0.5 + 0.5 * unit(rng);
            s.values[id] = std::min(s.values[id], s.caps[id]);
            s.growth[id] = 0.1 * unit(rng);
            s.tier_of[id] = NeedTier::physiological;
        }
        for (const auto& id : event_ids) {
            s.values[id] = unit(rng);
            s.caps[id] = 0.5 + 0.5 * unit(rng);
            s.values[id] = std::min(s.values[id], s.caps[id]);
            s.tier_of[id] = id == "safety" ? NeedTier::safety : NeedTier::social;
        }

        for (int step = 0; step < 5; ++step) {
            if (coin(rng)) {
                SatisfactionDelta sat;
                for (const auto& id : drive_ids)
                    if (coin(rng)) sat.deltas[id] = unit(rng);
                s = step_physiological(s, sat);
            } else {
                std::vector<EventAppraisal> active, passive;
                for (const auto& id : event_ids) {
                    auto a = appraisal_of({{id, delta(rng)}});
                    (coin(rng) ? active : passive).push_back(a);
                }
                s = apply_event_appraisals(s, active, passive);
            }
            for (const auto& [id, v] : s.values) {
                CHECK(v >= 0.0);
                CHECK(v <= s.cap(id));
            }
        }
    }
}

TEST_CASE("step matches scalar oracle") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        double v = unit(rng), cap = 0.5 + 0.5 * unit(rng), inc = 0.2 * unit(rng),
               red = 0.4 * unit(rng);
        v = std::min(v, cap);
        NeedState s;
        s.values = {{"n", v}};
        s.caps = {{"n", cap}};
        s.growth = {{"n", inc}};
        s.tier_of = {{"n", NeedTier::physiological}};
        SatisfactionDelta sat;
        sat.deltas["n"] = red;
        NeedState out = step_physiological(s, sat);
        double expect = std::min(cap, std::max(0.0, v + inc - red));
        CHECK(out.values["n"] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("appraisal sums before clamping") {
    NeedState s;
    s.values = {{"social_need", 0.9}};
    s.caps = {{"social_need", 1.0}};
    s.tier_of = {{"social_need", NeedTier::social}};
    // +0.3 then -0.25: clamping per-event would stick at 1.0 - 0.25 = 0.75,
    // summation first gives 0.95.
    auto out = apply_event_appraisals(s, {appraisal_of({{"social_need", 0.3}})},
                                      {appraisal_of({{"social_need", -0.25}})});
    CHECK(out.values["social_need"] == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("activated need matches brute force") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> tier_pick(0, 4);
    std::uniform_int_distribution<int> n_pick(1, 6);
    std::uniform_int_distribution<int> level_pick(0, 4); // coarse grid forces ties

    for (int trial = 0; trial < 5000; ++trial) {
        NeedState s;
        std::map<std::string, double> thresholds;
        int n = n_pick(rng);
        for (int i = 0; i < n; ++i) {
            std::string id = "need" + std::to_string(i);
            s.values[id] = 0.25 * level_pick(rng);
            s.caps[id] = 1.0;
            s.tier_of[id] = static_cast<NeedTier>(tier_pick(rng));
            thresholds[id] = 0.25 * level_pick(rng);
        }

        std::optional<std::string> expect;
        for (const auto& [id, v] : s.values) {
            if (v < thresholds.at(id)) continue;
            if (!expect) {
                expect = id;
                continue;
            }
            auto key = [&](const std::string& x) {
                return std::make_tuple(static_cast<int>(s.tier_of.at(x)), -s.values.at(x), x);
            };
            if (key(id) < key(*expect)) expect = id;
        }
        CHECK(activated_need(s, thresholds) == expect);
    }
}

TEST_CASE("activated need tie rules") {
    NeedState s;
    s.values = {{"a_low", 0.7}, {"b_high", 0.9}, {"c_social", 0.95}};
    s.caps = {{"a_low", 1.0}, {"b_high", 1.0}, {"c_social", 1.0}};
    s.tier_of = {{"a_low", NeedTier::physiological},
                 {"b_high", NeedTier::physiological},
                 {"c_social", NeedTier::social}};
    std::map<std::string, double> thr = {{"a_low", 0.6}, {"b_high", 0.6}, {"c_social", 0.6}};

    // lower tier beats higher value in a higher tier
    CHECK(activated_need(s, thr) == std::optional<std::string>("b_high"));

    // equal values inside a tier break lexicographically
    s.values["a_low"] = 0.9;
    CHECK(activated_need(s, thr) == std::optional<std::string>("a_low"));

    // nothing crossed
    thr = {{"a_low", 0.95}, {"b_high", 0.95}, {"c_social", 0.99}};
    CHECK(!activated_need(s, thr).has_value());
}

TEST_CASE("error paths") {
    NeedState s = drive_state(0.5, 0.5);
    s.values["social_need"] = 0.5;
    s.caps["social_need"] = 1.0;
    s.tier_of["social_need"] = NeedTier::social;

    SatisfactionDelta unknown;
    unknown.deltas["nope"] = 0.1;
    CHECK_THROWS_AS(step_physiological(s, unknown), InputError);

    SatisfactionDelta non_drive;
    non_drive.deltas["social_need"] = 0.1;
    CHECK_THROWS_AS(step_physiological(s, non_drive), InputError);

    SatisfactionDelta negative;
    negative.deltas["hunger"] = -0.1;
    CHECK_THROWS_AS(step_physiological(s, negative), InputError);

    CHECK_THROWS_AS(
        apply_event_appraisals(s, {appraisal_of({{"hunger", 0.1}})}, {}), InputError);
    CHECK_THROWS_AS(
        apply_event_appraisals(s, {appraisal_of({{"nope", 0.1}})}, {}), InputError);

    std::map<std::string, double> partial = {{"hunger", 0.6}};
    CHECK_THROWS_AS(activated_need(s, partial), InputError);
}

TEST_CASE("tier name round trip") {
    for (int i = 0; i <= 4; ++i) {
        auto tier = static_cast<NeedTier>(i);
        CHECK(tier_from_name(tier_name(tier)) == tier);
    }
    CHECK_THROWS_AS(tier_from_name("bogus"), InputError);
}
