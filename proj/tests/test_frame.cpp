#include <doctest.h>

#include <random>

#include "cartsim/error.hpp"
#include "cartsim/frame.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cartsim;

namespace {

WorldSet set_of(const CartesianFrame& f, std::vector<std::string> labels) { return f.world_set(labels); }

const FrameOperator kAllOps[] = {FrameOperator::ensure, FrameOperator::prevent, FrameOperator::control,
                                 FrameOperator::observe, FrameOperator::inevitable};

}  // namespace

TEST_CASE("outcome reads the matrix") {
    const auto ex = fixtures::example_frame();
    CHECK(ex.worlds()[ex.outcome("a1", "e2").value] == "w2");
    CHECK(ex.worlds()[ex.outcome("a3", "e1").value] == "w7");

    const auto one = CartesianFrame::from_labels({"a"}, {"e"}, {"w"});
    CHECK(one.worlds()[one.outcome("a", "e").value] == "w");
}

TEST_CASE("outcome lookup errors name the identifier") {
    const auto ex = fixtures::example_frame();
    CHECK_THROWS_WITH_AS(ex.outcome("a9", "e1"), doctest::Contains("a9"), LookupError);
    CHECK_THROWS_WITH_AS(ex.outcome("a1", "zz"), doctest::Contains("zz"), LookupError);
    CHECK_THROWS_AS(ex.outcome(ActionId{3}, EnvId{0}), LookupError);
}

TEST_CASE("frame construction invariants") {
    CHECK_THROWS_AS(CartesianFrame::from_labels({"a"}, {}, {}), ValidationError);
    CHECK_THROWS_AS(CartesianFrame::from_labels({"a"}, {"e1", "e2"}, {"w1"}), ValidationError);
    CHECK_THROWS_AS(CartesianFrame::from_labels({"a"}, {"e"}, {"w2"}, std::vector<std::string>{"w1"}),
                    ValidationError);
    CHECK_THROWS_AS(CartesianFrame::from_labels({"a", "a"}, {"e"}, {"w", "w"}), ValidationError);
    // Empty action list is allowed.
    const auto empty = CartesianFrame::from_labels({}, {"e"}, {}, std::vector<std::string>{"w1"});
    CHECK(empty.actions().empty());
}

TEST_CASE("image") {
    const auto ex = fixtures::example_frame();
    CHECK(image(ex) == WorldSet::full(9));

    const auto empty = CartesianFrame::from_labels({}, {"e"}, {}, std::vector<std::string>{"w1", "w2"});
    CHECK(image(empty).empty());

    const auto constant = CartesianFrame::from_labels({"a1", "a2"}, {"e1", "e2"}, {"w1", "w1", "w1", "w1"},
                                                      std::vector<std::string>{"w1", "w2"});
    CHECK(constant.labels_of(image(constant)) == std::vector<std::string>{"w1"});
}

TEST_CASE("ensure, prevent, control on the 3x3 example") {
    const auto ex = fixtures::example_frame();
    CHECK(ensures(ex, set_of(ex, {"w1", "w2", "w3"})));
    CHECK_FALSE(ensures(ex, set_of(ex, {"w1", "w2"})));
    CHECK(prevents(ex, set_of(ex, {"w1", "w2", "w3"})));
    CHECK_FALSE(prevents(ex, set_of(ex, {"w1", "w4", "w7"})));
    CHECK(prevents(ex, WorldSet(9)));
    CHECK(controls(ex, set_of(ex, {"w1", "w2", "w3"})));
    CHECK_FALSE(controls(ex, WorldSet(9)));
    CHECK_FALSE(controls(ex, WorldSet::full(9)));
}

TEST_CASE("observe and inevitable") {
    const auto ex = fixtures::example_frame();
    CHECK(observes(ex, WorldSet::full(9)));
    CHECK(observes(ex, WorldSet(9)));
    // Brute force over all (a0, a1, a) triples gives false.
    CHECK_FALSE(observes(ex, set_of(ex, {"w1", "w5", "w9"})));

    CHECK(inevitable(ex, WorldSet::full(9)));
    CHECK_FALSE(inevitable(ex, set_of(ex, {"w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"})));
    const auto empty = CartesianFrame::from_labels({}, {"e"}, {}, std::vector<std::string>{"w1"});
    CHECK_FALSE(inevitable(empty, WorldSet::full(1)));
    CHECK_FALSE(inevitable(empty, WorldSet(1)));
}

TEST_CASE("foreign world sets are rejected") {
    const auto ex = fixtures::example_frame();
    CHECK_THROWS_AS(ex.world_set(std::vector<std::string>{"w1", "w10"}), ValidationError);
    for (auto op : kAllOps) CHECK_THROWS_AS(holds(ex, op, WorldSet(4)), ValidationError);
}

TEST_CASE("family sizes on the example, frozen from brute force") {
    const auto ex = fixtures::example_frame();
    CHECK(enumerate_operator(ex, FrameOperator::ensure).size() == 169);
    CHECK(enumerate_operator(ex, FrameOperator::prevent).size() == 169);
    CHECK(enumerate_operator(ex, FrameOperator::control).size() == 42);
    CHECK(enumerate_operator(ex, FrameOperator::observe).size() == 2);
    CHECK(enumerate_operator(ex, FrameOperator::inevitable).size() == 1);
}

TEST_CASE("enumeration on a 1x1 frame and ordering") {
    const auto one = CartesianFrame::from_labels({"a"}, {"e"}, {"w"});
    const auto fam = enumerate_operator(one, FrameOperator::ensure);
    REQUIRE(fam.size() == 1);
    CHECK(fam[0] == WorldSet::full(1));

    const auto ex = fixtures::example_frame();
    const auto ensure = enumerate_operator(ex, FrameOperator::ensure);
    for (std::size_t i = 1; i < ensure.size(); ++i) CHECK(ensure[i - 1].to_mask() < ensure[i].to_mask());
}

TEST_CASE("control family is the intersection of ensure and prevent") {
    const auto ex = fixtures::example_frame();
    std::vector<WorldSet> both;
    const auto prevent = enumerate_operator(ex, FrameOperator::prevent);
    for (const auto& s : enumerate_operator(ex, FrameOperator::ensure)) {
        if (std::find(prevent.begin(), prevent.end(), s) != prevent.end()) both.push_back(s);
    }
    CHECK(both == enumerate_operator(ex, FrameOperator::control));
}

TEST_CASE("enumeration cap") {
    std::vector<std::string> matrix = fixtures::labels("w", 17);
    const auto wide = CartesianFrame::from_labels({"a"}, fixtures::labels("e", 17), matrix);
    CHECK_THROWS_AS(enumerate_operator(wide, FrameOperator::ensure), SizeError);
    CHECK(enumerate_operator(wide, FrameOperator::inevitable, {.max_worlds = 17}).size() == 1);
    // Membership queries still work past the cap.
    CHECK(ensures(wide, WorldSet::full(17)));
}

TEST_CASE("operator names") {
    CHECK(parse_frame_operator("ctrl") == FrameOperator::control);
    CHECK(parse_frame_operator("observe") == FrameOperator::observe);
    CHECK_THROWS_AS(parse_frame_operator("bogus"), LookupError);
}

TEST_CASE("property: randomized frames agree with the definitional oracle") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 60; ++trial) {
        const auto frame = fixtures::random_frame(rng, 4, 4, 8);
        const auto plain = fixtures::to_plain(frame);
        const std::size_t n = frame.worlds().size();
        const WorldSet full = WorldSet::full(n);
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
            const WorldSet s = WorldSet::from_mask(n, m);
            for (auto op : kAllOps) REQUIRE(holds(frame, op, s) == oracle::holds(plain, op, m));
            // Duality.
            REQUIRE(prevents(frame, s) == ensures(frame, s.complement()));
            // Inevitable against an independently computed image.
            REQUIRE(inevitable(frame, s) == (plain.actions > 0 && (oracle::image(plain) & ~m) == 0));
        }
        if (!frame.actions().empty()) {
            CHECK(observes(frame, full));
            CHECK(observes(frame, WorldSet(n)));
        }
    }
}

TEST_CASE("property: ensure is upward closed and prevent downward closed") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const auto frame = fixtures::random_frame(rng, 4, 4, 7);
        const std::size_t n = frame.worlds().size();
        const std::uint64_t end = std::uint64_t{1} << n;
        for (std::uint64_t m = 0; m < end; ++m) {
            const WorldSet s = WorldSet::from_mask(n, m);
            const bool e = ensures(frame, s);
            const bool p = prevents(frame, s);
            for (std::size_t w = 0; w < n; ++w) {
                const WorldSet bigger = WorldSet::from_mask(n, m | (std::uint64_t{1} << w));
                const WorldSet smaller = WorldSet::from_mask(n, m & ~(std::uint64_t{1} << w));
                if (e) REQUIRE(ensures(frame, bigger));
                if (p) REQUIRE(prevents(frame, smaller));
            }
        }
    }
}
