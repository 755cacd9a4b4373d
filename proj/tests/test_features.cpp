#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relucov/errors.hpp"
#include "relucov/features.hpp"
#include "relucov/network.hpp"
#include "testkit.hpp"

using namespace relucov;

TEST_CASE("singleton pairs of the worked example") {
    const Network net = testkit::example_net();
    const FeaturePairSet pairs = enumerate_singleton_pairs(net);
    CHECK(pairs.size() == 9); // 3 x 3 between the two hidden layers
    for (const auto& p : pairs.pairs()) {
        CHECK(p.condition.layer == 2);
        CHECK(p.decision.layer == 3);
        CHECK(p.condition.is_singleton());
        CHECK(p.decision.is_singleton());
    }

    PairEnumOptions with_output;
    with_output.include_output_decisions = true;
    CHECK(enumerate_singleton_pairs(net, with_output).size() == 9 + 3 * 2);
}

TEST_CASE("a single hidden layer yields no pairs") {
    const Network net = Network::create(
        {2, 3, 2}, {Matrix(2, 3), Matrix(3, 2)}, {Vec{0, 0, 0}, Vec{0, 0}});
    CHECK(enumerate_singleton_pairs(net).empty());
    PairEnumOptions with_output;
    with_output.include_output_decisions = true;
    CHECK(enumerate_singleton_pairs(net, with_output).size() == 3 * 2);
}

TEST_CASE("singleton pair count matches the closed form on random nets") {
    testkit::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Network net = testkit::random_net(rng);
        long expect = 0;
        for (int k = 2; k + 1 <= net.layer_count() - 1; ++k)
            expect += static_cast<long>(net.layer_size(k)) * net.layer_size(k + 1);
        CHECK(static_cast<long>(enumerate_singleton_pairs(net).size()) == expect);
    }
}

TEST_CASE("top-weight pairs pick the largest-magnitude incoming weights") {
    const Network net = testkit::example_net();

    // decision n_{3,1}: |W2| column is (2, 7, 1)
    const FeaturePairSet top1 = enumerate_top_weight_pairs(net, 1);
    REQUIRE(top1.size() == 3);
    CHECK(top1[0].decision == Feature::single(3, 1));
    CHECK(top1[0].condition == Feature::single(2, 2));

    // decision n_{3,3}: |W2| column is (1, 4, 9) -> nodes 3 then 2
    const FeaturePairSet top2 = enumerate_top_weight_pairs(net, 2);
    REQUIRE(top2.size() == 6);
    CHECK(top2[4].decision == Feature::single(3, 3));
    CHECK(top2[4].condition == Feature::single(2, 3));
    CHECK(top2[5].condition == Feature::single(2, 2));

    CHECK_THROWS_AS(enumerate_top_weight_pairs(net, 0), ConfigError);
}

TEST_CASE("top-weight ties break toward the lower node index") {
    // both incoming weights have magnitude 2
    Matrix w1(2, 2);
    w1.at(0, 0) = 2.0;
    w1.at(0, 1) = 1.0;
    w1.at(1, 0) = -2.0;
    w1.at(1, 1) = 1.0;
    Matrix w2(2, 2);
    w2.at(0, 0) = 1.0;
    w2.at(1, 1) = 1.0;
    Matrix w3(2, 2);
    w3.at(0, 0) = 1.0;
    w3.at(1, 1) = 1.0;
    const Network net =
        Network::create({2, 2, 2, 2}, {w1, w2, w3}, {Vec{0, 0}, Vec{0, 0}, Vec{0, 0}});
    // layer 2 -> 3 weights are the identity, so each decision has one weight
    // of 1 and one of 0; with kappa 1 the nonzero one wins, and for equal
    // magnitudes the lower index must win
    Matrix tied(2, 2);
    tied.at(0, 0) = 3.0;
    tied.at(1, 0) = -3.0;
    tied.at(0, 1) = -0.5;
    tied.at(1, 1) = 0.5;
    const Network tie_net =
        Network::create({2, 2, 2, 2}, {w1, tied, w3}, {Vec{0, 0}, Vec{0, 0}, Vec{0, 0}});
    const FeaturePairSet top = enumerate_top_weight_pairs(tie_net, 1);
    REQUIRE(top.size() == 2);
    CHECK(top[0].decision == Feature::single(3, 1));
    CHECK(top[0].condition == Feature::single(2, 1)); // |3| == |-3|, index wins
    CHECK(top[1].decision == Feature::single(3, 2));
    CHECK(top[1].condition == Feature::single(2, 1)); // |-0.5| == |0.5|
}

TEST_CASE("top-weight pairs saturate to the singleton set") {
    testkit::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = testkit::random_net(rng);
        const FeaturePairSet all = enumerate_singleton_pairs(net);
        const FeaturePairSet top = enumerate_top_weight_pairs(net, 999);
        CHECK(top.size() == all.size());
        for (const auto& p : top.pairs()) CHECK(all.contains(p));

        // any kappa stays inside the singleton set
        const FeaturePairSet small = enumerate_top_weight_pairs(net, 2);
        for (const auto& p : small.pairs()) CHECK(all.contains(p));
    }
}

TEST_CASE("random feature pairs: width arithmetic, determinism, ties to ties") {
    const Network net = testkit::example_net();

    const FeaturePairSet whole = enumerate_random_feature_pairs(net, 1.0, 3, 42);
    for (const auto& p : whole.pairs()) {
        CHECK(p.condition.nodes == std::vector<int>{1, 2, 3}); // the full layer
        CHECK(p.decision.is_singleton());
    }

    const FeaturePairSet a = enumerate_random_feature_pairs(net, 0.5, 4, 7);
    const FeaturePairSet b = enumerate_random_feature_pairs(net, 0.5, 4, 7);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    for (const auto& p : a.pairs()) CHECK(p.condition.nodes.size() == 1); // floor(0.5 * 3)

    const FeaturePairSet c = enumerate_random_feature_pairs(net, 0.5, 4, 8);
    bool any_difference = false;
    for (std::size_t i = 0; i < c.size(); ++i) any_difference = any_difference || !(a[i] == c[i]);
    CHECK(any_difference);

    CHECK_THROWS_AS(enumerate_random_feature_pairs(net, 0.0, 1, 1), ConfigError);
    CHECK_THROWS_AS(enumerate_random_feature_pairs(net, 0.5, 0, 1), ConfigError);
    // more distinct pairs than exist
    CHECK_THROWS_AS(enumerate_random_feature_pairs(net, 1.0, 100, 1), ConfigError);
}

TEST_CASE("every enumerated pair respects adjacency and bounds") {
    testkit::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const Network net = testkit::random_net(rng);
        const FeaturePairSet singles = enumerate_singleton_pairs(net);
        for (const auto& p : singles.pairs()) p.validate(net);
        const FeaturePairSet top = enumerate_top_weight_pairs(net, 3);
        for (const auto& p : top.pairs()) p.validate(net);
        if (net.layer_count() >= 4) {
            const auto random_pairs = enumerate_random_feature_pairs(net, 0.7, 3, trial);
            for (const auto& p : random_pairs.pairs()) p.validate(net);
        }
    }
}

TEST_CASE("pair sets round-trip through json") {
    const Network net = testkit::example_net();
    const FeaturePairSet pairs = enumerate_top_weight_pairs(net, 2);
    const std::string text = pair_set_to_json(pairs);
    const FeaturePairSet back = pair_set_from_json(text, net);
    REQUIRE(back.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(back[i] == pairs[i]);

    CHECK_THROWS_AS(pair_set_from_json("[{\"k\": 1}]", net), InputError);
    // condition in the input layer is rejected
    CHECK_THROWS_AS(
        pair_set_from_json(R"([{"k":1,"condition":[1],"decision":[1]}])", net), InputError);
}

TEST_CASE("feature and pair validation") {
    const Network net = testkit::example_net();
    CHECK_THROWS_AS((Feature{2, {}}).validate(net), InputError);
    CHECK_THROWS_AS((Feature{2, {1, 1}}).validate(net), InputError);
    CHECK_THROWS_AS((Feature{2, {2, 1}}).validate(net), InputError);
    CHECK_THROWS_AS((Feature{2, {4}}).validate(net), InputError);
    CHECK_THROWS_AS((Feature{9, {1}}).validate(net), InputError);

    const FeaturePair skips{Feature::single(2, 1), Feature::single(4, 1)};
    CHECK_THROWS_AS(skips.validate(net), InputError);
    const FeaturePair to_output{Feature::single(3, 1), Feature::single(4, 1)};
    CHECK_THROWS_AS(to_output.validate(net), InputError);
    CHECK_NOTHROW(to_output.validate(net, /*allow_output_decision=*/true));
    const FeaturePairSet set({to_output});
    CHECK_THROWS_AS(FeaturePairSet({to_output, to_output}), InputError);
}
