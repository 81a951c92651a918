#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cartsim/error.hpp"
#include "cartsim/pse.hpp"
#include "cartsim/serialize.hpp"
#include "support/fixtures.hpp"

using namespace cartsim;
using namespace cartsim::pse;
using fixtures::simulacrum;
using fixtures::trivial_event;

namespace {

const Token kSep{kSeparatorToken};

std::string joined(const std::vector<Token>& tokens) {
    return std::accumulate(tokens.begin(), tokens.end(), std::string());
}

EventSpace small_space(std::size_t bound) {
    return EventSpace({trivial_event("calm", 1.0, {simulacrum("c", {"look", "wait"}, "still")}),
                       trivial_event("busy", 1.0, {simulacrum("b", {"look", "run", "jump", "wait"}, "motion")})},
                      bound);
}

SimulatorHandle handle_with(const TokenSelector& selector, std::size_t bound = 100, std::size_t budget = 6) {
    return SimulatorHandle{small_space(bound), selector, budget, {}, std::nullopt};
}

TokenSelector mixed_selector() {
    return TokenSelector(Alphabet({"a", "b", "x", "z", "k"}),
                         {{{"x"}, {0.1, 0.1, 0.4, 0.3, 0.1}}, {{kSep, "k"}, {0.0, 0.0, 1.0, 0.0, 0.0}}},
                         std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2});
}

EvaluatorSpec constant(Decision d) { return EvaluatorSpec{{Rule{"const", Rule::Kind::always, {}, 1, {}, {}, d}}}; }

EvaluatorSpec forbid(const Token& t) {
    return EvaluatorSpec{{Rule{"forbid-" + t, Rule::Kind::contains, {t}, 1, {}, {}, Decision::reject}},
                         Decision::approve};
}

}  // namespace

TEST_CASE("compose_input") {
    const Alphabet alpha({"a", "b", "k"});
    const std::vector<Token> p{"a", "b"};
    const std::vector<Token> c{"k"};
    CHECK(joined(compose_input(alpha, p, c)) == "ab" + kSep + "k");
    CHECK(compose_input(alpha, std::vector<Token>{}, c) == std::vector<Token>{kSep, "k"});
    CHECK_THROWS_AS(compose_input(alpha, std::vector<Token>{"a", kSep}, c), ValidationError);
    CHECK_THROWS_AS(compose_input(alpha, std::vector<Token>{"q"}, c), ValidationError);
}

TEST_CASE("identity perturbation is equivalent to the input handle") {
    const auto complete = handle_with(mixed_selector());
    const auto partial = perturb(complete, identity_perturbation(complete, complete.step_budget));
    CHECK(partial.alphabet() == complete.alphabet());
    CHECK(partial.step_budget == complete.step_budget);
    CHECK(partial.bound() == complete.bound());
    CHECK(partial.space.events().size() == complete.space.events().size());
    for (std::size_t i = 0; i < partial.space.events().size(); ++i) {
        CHECK(partial.space.events()[i].simulacra == complete.space.events()[i].simulacra);
    }
    REQUIRE(partial.selector.entries().size() == complete.selector.entries().size());
    CHECK(partial.selector.fallback() == complete.selector.fallback());
}

TEST_CASE("perturb validation") {
    const auto complete = handle_with(mixed_selector());
    auto cfg = identity_perturbation(complete, 3);
    cfg.time_to_live = 0;
    CHECK_THROWS_AS(perturb(complete, cfg), ValidationError);
    cfg = identity_perturbation(complete, 3);
    cfg.fidelity.erase("z");
    CHECK_THROWS_WITH_AS(perturb(complete, cfg), doctest::Contains("z"), ValidationError);
    cfg = identity_perturbation(complete, 3);
    cfg.fidelity["q"] = "q";
    CHECK_THROWS_AS(perturb(complete, cfg), ValidationError);
    cfg = identity_perturbation(complete, 3);
    cfg.fragmentation.clear();
    CHECK_THROWS_AS(perturb(complete, cfg), ValidationError);
}

TEST_CASE("fidelity coarsens the alphabet and pushes distributions forward") {
    const auto complete = handle_with(mixed_selector());
    PerturbationConfig cfg{{{"a", "v"}, {"b", "v"}, {"x", "x"}, {"z", "z"}, {"k", "k"}}, {"look"}, 4};
    const auto partial = perturb(complete, cfg);
    CHECK(partial.alphabet().tokens() == std::vector<Token>{"v", "x", "z", "k"});
    CHECK(*partial.selector.fallback() == std::vector<double>{0.4, 0.2, 0.2, 0.2});
    CHECK(map_input(partial, std::vector<Token>{"a", "b", kSep, "k"}) == std::vector<Token>{"v", "v", kSep, "k"});
}

TEST_CASE("fragmentation lowers simulacrum complexity") {
    const auto complete = handle_with(mixed_selector());
    auto cfg = identity_perturbation(complete, 3);
    cfg.fragmentation = {"look", "run"};
    const auto partial = perturb(complete, cfg);
    for (std::size_t i = 0; i < complete.space.events().size(); ++i) {
        const auto& before = complete.space.events()[i];
        const auto& after = partial.space.events()[i];
        CHECK(complexity(after) < complexity(before));
    }
    CHECK(partial.space.events()[1].simulacra[0].actions == std::vector<std::string>{"look", "run"});
}

TEST_CASE("run_partial respects the TTL and is deterministic") {
    const auto complete = handle_with(fixtures::degenerate_selector({"a", "x"}, "x"));
    const auto partial = perturb(complete, identity_perturbation(complete, 2));
    const std::vector<Token> input{"a", kSep, "a"};
    const auto result = run_partial(partial, input, 5);
    CHECK(result.final_state().prefix == input);
    CHECK(joined(result.final_state().trajectory) == "xx");
    CHECK(to_json(result).dump() == to_json(run_partial(partial, input, 5)).dump());

    const auto three = perturb(complete, identity_perturbation(complete, 3));
    CHECK(run_partial(three, input, 8).final_state().trajectory.size() == 3);
}

TEST_CASE("evaluate") {
    const std::vector<Token> xzx{"x", "z", "x"};
    const std::vector<Token> xxx{"x", "x", "x"};

    CHECK(evaluate(constant(Decision::reject), xxx).decision == Decision::reject);
    CHECK(evaluate(constant(Decision::reject), std::vector<Token>{}).decision == Decision::reject);

    const auto rejected = evaluate(forbid("z"), xzx);
    CHECK(rejected.decision == Decision::reject);
    CHECK(rejected.rule == "forbid-z");
    REQUIRE(rejected.span);
    CHECK(rejected.span->first == 2);
    CHECK(rejected.rationale.find("position 2") != std::string::npos);

    const auto approved = evaluate(forbid("z"), xxx);
    CHECK(approved.decision == Decision::approve);
    CHECK(approved.rule == kDefaultRuleName);
    CHECK_FALSE(approved.rationale.empty());
}

TEST_CASE("evaluate counts and realized worlds; first match wins") {
    EvaluatorSpec spec{{Rule{"many-x", Rule::Kind::count_at_least, {"x"}, 3, {}, {}, Decision::reject},
                        Rule{"calm", Rule::Kind::realized_world, {}, 1, "calm", "calm:w", Decision::approve},
                        Rule{"never", Rule::Kind::always, {}, 1, {}, {}, Decision::reject}}};
    const std::vector<Token> xx{"x", "y", "x"};
    const std::set<RealizedWorld> calm{{"calm", "calm:w"}};
    CHECK(evaluate(spec, xx, calm).rule == "calm");
    CHECK(evaluate(spec, xx).rule == "never");
    const auto many = evaluate(spec, std::vector<Token>{"x", "x", "y", "x"}, calm);
    CHECK(many.rule == "many-x");
    CHECK(many.span == std::pair<std::size_t, std::size_t>{1, 4});
}

TEST_CASE("gate invokes the complete simulator only on approval") {
    const auto complete = handle_with(mixed_selector());
    const auto partial = perturb(complete, identity_perturbation(complete, 3));
    const std::vector<Token> p{"a", "b"};
    const std::vector<Token> c{"k"};

    int complete_calls = 0;
    GateOptions opts;
    opts.observer = [&](std::string_view phase) { complete_calls += phase == "complete"; };

    const auto rejected = gate(partial, constant(Decision::reject), complete, p, c, {1, 2}, opts);
    CHECK(complete_calls == 0);
    CHECK_FALSE(rejected.complete_trajectory);
    CHECK(rejected.status == GateStatus::ok);

    const auto approved = gate(partial, constant(Decision::approve), complete, p, c, {1, 2}, opts);
    CHECK(complete_calls == 1);
    REQUIRE(approved.complete_trajectory);
    CHECK(approved.complete_trajectory->size() == complete.step_budget);
    CHECK(approved.input == std::vector<Token>{"a", "b", kSep, "k"});
}

TEST_CASE("forbidden-token evaluator takes both branches") {
    // After the condition the selector always emits "z"; a flipped selector never can.
    const std::vector<Token> p{"a"};
    const std::vector<Token> c{"k"};
    const TokenSelector emits_z(Alphabet({"a", "x", "z", "k"}), {}, std::vector<double>{0, 0, 1, 0});
    const TokenSelector never_z(Alphabet({"a", "x", "z", "k"}), {}, std::vector<double>{0.5, 0.5, 0, 0});

    const auto bad = handle_with(emits_z);
    const auto bad_out = gate(perturb(bad, identity_perturbation(bad, 4)), forbid("z"), bad, p, c, {3, 4});
    CHECK(bad_out.verdict.decision == Decision::reject);
    CHECK_FALSE(bad_out.complete_trajectory);

    const auto good = handle_with(never_z);
    const auto good_out = gate(perturb(good, identity_perturbation(good, 4)), forbid("z"), good, p, c, {3, 4});
    CHECK(good_out.verdict.decision == Decision::approve);
    CHECK(good_out.complete_trajectory);
}

TEST_CASE("gate configuration errors") {
    const auto complete = handle_with(mixed_selector(), 20);
    const auto wide = handle_with(mixed_selector(), 30);
    const std::vector<Token> p{"a"};
    const std::vector<Token> c{"k"};
    CHECK_THROWS_AS(gate(wide, constant(Decision::approve), complete, p, c, {}), ConfigError);

    const auto other = handle_with(fixtures::degenerate_selector({"a", "k"}, "a"), 20);
    CHECK_THROWS_AS(gate(other, constant(Decision::approve), complete, p, c, {}), ConfigError);
}

TEST_CASE("partial failures fail closed") {
    // Every event exceeds v_P, so selection fails in the partial phase.
    const auto complete = handle_with(mixed_selector());
    auto partial = complete;
    partial.space = complete.space.with_bound(5);
    const auto out = gate(partial, constant(Decision::approve), complete, std::vector<Token>{"a"},
                          std::vector<Token>{"k"}, {1, 2});
    CHECK(out.status == GateStatus::partial_failed);
    CHECK(out.verdict.decision == Decision::reject);
    CHECK_FALSE(out.complete_trajectory);
    CHECK_FALSE(out.error.empty());
}

TEST_CASE("complete failures are recorded") {
    auto complete = handle_with(mixed_selector());
    const auto partial = perturb(complete, identity_perturbation(complete, 2));
    const TokenSelector broken(Alphabet({"a", "b", "x", "z", "k"}), {{{"x"}, {1, 0, 0, 0, 0}}}, std::nullopt);
    complete.selector = broken;
    const auto out = gate(partial, constant(Decision::approve), complete, std::vector<Token>{"a"},
                          std::vector<Token>{"k"}, {1, 2});
    CHECK(out.status == GateStatus::complete_failed);
    REQUIRE(out.complete_trajectory);
    CHECK(out.complete_trajectory->empty());
}

TEST_CASE("audit export and import") {
    const auto complete = handle_with(mixed_selector());
    const auto partial = perturb(complete, identity_perturbation(complete, 3));
    const std::vector<Token> p{"a", "b"};
    const std::vector<Token> c{"k"};

    for (Decision d : {Decision::reject, Decision::approve}) {
        const auto out = gate(partial, constant(d), complete, p, c, {11, 12});
        const auto text = audit_export(out);
        CHECK(text.find('\n') == std::string::npos);
        CHECK(audit_import(text) == out);
        CHECK(text == audit_export(gate(partial, constant(d), complete, p, c, {11, 12})));
        const auto j = nlohmann::json::parse(text);
        REQUIRE(j.contains("complete_trajectory"));
        CHECK(j["complete_trajectory"].is_null() == (d == Decision::reject));
    }
    CHECK_THROWS_AS(audit_import("{"), ValidationError);
    CHECK_THROWS_AS(audit_import("{}"), ValidationError);
}

TEST_CASE("audit log appends one line per record") {
    const auto complete = handle_with(mixed_selector());
    const auto partial = perturb(complete, identity_perturbation(complete, 2));
    const auto path = std::filesystem::temp_directory_path() / "cartsim_test_audit.log";
    std::filesystem::remove(path);
    const auto out = gate(partial, constant(Decision::approve), complete, std::vector<Token>{"a"},
                          std::vector<Token>{"k"}, {1, 2});
    append_audit_log(path, out);
    append_audit_log(path, out);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        CHECK(audit_import(line) == out);
        ++lines;
    }
    CHECK(lines == 2);
    std::filesystem::remove(path);
}

TEST_CASE("property: identity perturbation matches the truncated unperturbed run") {
    const auto complete = handle_with(mixed_selector(), 100, 12);
    const std::vector<Token> input{"a", kSep, "k"};
    for (std::size_t ttl = 1; ttl <= 12; ++ttl) {
        const auto partial = perturb(complete, identity_perturbation(complete, ttl));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto got = run_partial(partial, input, seed);
            const auto full = run(complete.space, complete.selector, complete.step_budget, seed, input);
            REQUIRE(got.records.size() == ttl);
            for (std::size_t i = 0; i < ttl; ++i) REQUIRE(got.records[i] == full.records[i]);
        }
    }
}
