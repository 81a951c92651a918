#include "cartsim/report.hpp"

#include <iomanip>
#include <sstream>

namespace cartsim {

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.emplace_back(text.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

namespace {

Json world_list(const std::vector<std::string>& labels) { return Json(labels); }

template <class Pred>
Json family_json(std::size_t worlds, const std::vector<std::string>& labels, Pred pred) {
    if (worlds > 16) throw SizeError("too many worlds to enumerate (" + std::to_string(worlds) + "); pass --set");
    Json family = Json::array();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << worlds); ++mask) {
        const WorldSet s = WorldSet::from_mask(worlds, mask);
        if (!pred(s)) continue;
        std::vector<std::string> members;
        for (auto w : s.members()) members.push_back(labels[w.value]);
        family.push_back(members);
    }
    return family;
}

}  // namespace

Report frame_command(const Scenario& sc, const CommandOptions& opts) {
    const auto& frame = lookup(sc.frames, "frames", opts.name);
    Report report{"frame", {}, {}, Json::object()};
    Json& r = report.result;
    r["frame"] = opts.name;
    r["op"] = opts.op;
    if (opts.op == "outcome") {
        if (!opts.action || !opts.env) throw UsageError("--op outcome needs --action and --env");
        r["action"] = *opts.action;
        r["env"] = *opts.env;
        r["world"] = frame.worlds()[frame.outcome(*opts.action, *opts.env).value];
        return report;
    }
    if (opts.op == "image") {
        r["worlds"] = world_list(frame.labels_of(image(frame)));
        return report;
    }
    FrameOperator op;
    try {
        op = parse_frame_operator(opts.op);
    } catch (const LookupError& e) {
        throw UsageError(e.what());
    }
    r["op"] = to_string(op);
    if (opts.set) {
        const WorldSet s = frame.world_set(*opts.set);
        r["set"] = world_list(frame.labels_of(s));
        r["holds"] = holds(frame, op, s);
    } else {
        Json family = Json::array();
        for (const auto& s : enumerate_operator(frame, op)) family.push_back(frame.labels_of(s));
        r["count"] = family.size();
        r["family"] = std::move(family);
    }
    return report;
}

Report object_command(const Scenario& sc, const CommandOptions& opts) {
    const auto& obj = lookup(sc.objects, "objects", opts.name);
    const AgentIndex agent{opts.agent};
    obj.check_agent(agent);
    Report report{"object", {}, {}, Json::object()};
    Json& r = report.result;
    r["object"] = opts.name;
    r["agent"] = opts.agent;
    r["op"] = opts.op;

    auto need_profile = [&]() -> const BehaviorProfile& {
        if (!opts.profile) throw UsageError("--op " + opts.op + " needs --profile");
        const auto& p = lookup(sc.profiles, "profiles", *opts.profile);
        if (p.object != opts.name) {
            throw ValidationError("profile '" + *opts.profile + "' belongs to object '" + p.object + "'");
        }
        r["profile"] = *opts.profile;
        return p.profile;
    };
    auto need_theta = [&]() {
        if (!opts.theta) throw UsageError("--op " + opts.op + " needs --theta");
        r["theta"] = *opts.theta;
        return Theta(*opts.theta);
    };

    if (opts.op == "agents") {
        Json list = Json::array();
        for (const auto& [i, a] : agents_star(obj)) list.push_back(Json{{"agent", i.value}, {"action", a}});
        r["agents"] = std::move(list);
        return report;
    }
    if (opts.op == "outcome") {
        if (!opts.action || !opts.env) throw UsageError("--op outcome needs --action a1,a2,... and --env");
        const auto joint = split_list(*opts.action);
        r["action"] = joint;
        r["env"] = *opts.env;
        r["world"] = obj.worlds()[obj.joint_outcome(joint, *opts.env).value];
        return report;
    }
    if (opts.op == "image") {
        r["worlds"] = world_list(obj.labels_of(image_n(obj, agent)));
        return report;
    }
    if (opts.op == "vimage") {
        const auto& profile = need_profile();
        r["worlds"] = world_list(obj.labels_of(vimage_n(obj, agent, profile, need_theta())));
        return report;
    }

    std::function<bool(const WorldSet&)> pred;
    if (opts.op == "ensure") {
        pred = [&](const WorldSet& s) { return ensure_n(obj, agent, s); };
    } else if (opts.op == "prevent") {
        pred = [&](const WorldSet& s) { return prevent_n(obj, agent, s); };
    } else if (opts.op == "ctrl" || opts.op == "control") {
        pred = [&](const WorldSet& s) { return ctrl_n(obj, agent, s); };
    } else if (opts.op == "observe" || opts.op == "obs") {
        pred = [&](const WorldSet& s) { return obs_n(obj, agent, s); };
    } else if (opts.op == "inevitable") {
        pred = [&](const WorldSet& s) { return inevitable_n(obj, agent, s); };
    } else if (opts.op == "manageable" || opts.op == "viable") {
        const BehaviorProfile& profile = need_profile();
        const Theta theta = need_theta();
        if (opts.op == "manageable") {
            pred = [&obj, agent, profile, theta](const WorldSet& s) {
                return manageable_n(obj, agent, s, profile, theta);
            };
        } else {
            pred = [&obj, agent, profile, theta](const WorldSet& s) { return viable_n(obj, agent, s, profile, theta); };
        }
    } else {
        throw UsageError("unknown object operator '" + opts.op + "'");
    }
    if (opts.set) {
        const WorldSet s = obj.world_set(*opts.set);
        r["set"] = world_list(obj.labels_of(s));
        r["holds"] = pred(s);
    } else {
        Json family = family_json(obj.worlds().size(), obj.worlds().labels(), pred);
        r["count"] = family.size();
        r["family"] = std::move(family);
    }
    return report;
}

Report sim_command(const Scenario& sc, const CommandOptions& opts) {
    const auto& sim = lookup(sc.simulations, "simulations", opts.name);
    const auto& space = lookup(sc.event_spaces, "event_spaces", sim.space);
    const auto& selector = lookup(sc.selectors, "selectors", sim.selector);
    const std::uint64_t seed = opts.seed.value_or(sim.seed);
    const std::size_t steps = opts.steps.value_or(sim.steps);
    const RunResult result = run(space, selector, steps, seed);
    Report report{"sim", {}, {seed}, Json::object()};
    report.result["simulation"] = opts.name;
    report.result["bound"] = space.bound();
    report.result["run"] = to_json(result);
    return report;
}

Report duel_command(const Scenario& sc, const CommandOptions& opts) {
    duel::DuelConfig config = lookup(sc.duels, "duels", opts.name);
    if (opts.steps) config.max_steps = *opts.steps;
    Report report{"duel", {}, {}, Json::object()};
    report.result["duel"] = opts.name;
    report.result["config"] = Json{{"k", config.k},     {"p1", config.p1},   {"p2", config.p2},
                                   {"xi", config.xi},   {"eta", config.eta}, {"n0", config.n0},
                                   {"max_steps", config.max_steps}, {"tolerance", config.tolerance},
                                   {"rule", config.rule == duel::UpdateRule::attraction ? "attraction"
                                                                                        : "preference_dot"}};
    const auto result = duel::run(config);
    report.result["report"] = to_json(result);
    return report;
}

Report pse_command(const Scenario& sc, const CommandOptions& opts) {
    const auto& pipeline = lookup(sc.pipelines, "pipelines", opts.name);
    const auto& evaluator = lookup(sc.evaluators, "evaluators", pipeline.evaluator);
    pse::GateSeeds seeds = pipeline.seeds;
    if (opts.seed) seeds = pse::GateSeeds{*opts.seed, *opts.seed + 1};
    const auto outcome = pse::gate(pipeline.partial, evaluator, pipeline.complete, pipeline.prompt,
                                   pipeline.condition, seeds);
    if (opts.audit_log) pse::append_audit_log(*opts.audit_log, outcome);
    Report report{"pse", {}, {seeds.partial, seeds.complete}, Json::object()};
    report.result["pipeline"] = opts.name;
    report.result["audit"] = pse::to_json(outcome);
    return report;
}

Report run_command(const Scenario& sc, std::string_view command, const CommandOptions& opts) {
    if (command == "frame") return frame_command(sc, opts);
    if (command == "object") return object_command(sc, opts);
    if (command == "sim") return sim_command(sc, opts);
    if (command == "duel") return duel_command(sc, opts);
    if (command == "pse") return pse_command(sc, opts);
    throw UsageError("unknown command '" + std::string(command) + "'");
}

Json to_json(const Report& report) {
    Json j;
    j["command"] = report.argv;
    j["seeds"] = report.seeds;
    j["result"] = report.result;
    j["version"] = kVersionStamp;
    return j;
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string braces(const Json& list) {
    std::string out = "{";
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += list[i].get<std::string>();
    }
    return out + "}";
}

std::string join_tokens(const Json& list) {
    std::string out;
    for (const auto& t : list) out += t.get<std::string>();
    return out;
}

}  // namespace

std::string render_human(const Report& report) {
    std::ostringstream os;
    const Json& r = report.result;
    os << "# " << kVersionStamp << " " << report.command;
    for (auto s : report.seeds) os << " seed=" << s;
    os << "\n";
    if (report.command == "frame" || report.command == "object") {
        if (r.contains("world")) {
            os << "outcome = " << r["world"].get<std::string>() << "\n";
        } else if (r.contains("worlds")) {
            os << r["op"].get<std::string>() << " = " << braces(r["worlds"]) << "\n";
        } else if (r.contains("holds")) {
            os << r["op"].get<std::string>() << "(" << braces(r["set"]) << ") = "
               << (r["holds"].get<bool>() ? "true" : "false") << "\n";
        } else if (r.contains("family")) {
            os << r["op"].get<std::string>() << " family: " << r["count"].get<std::size_t>() << " sets\n";
            for (const auto& s : r["family"]) os << "  " << braces(s) << "\n";
        } else if (r.contains("agents")) {
            os << "agent  action\n";
            for (const auto& a : r["agents"]) {
                os << std::setw(5) << a["agent"].get<std::size_t>() << "  " << a["action"].get<std::string>() << "\n";
            }
        }
    } else if (report.command == "sim") {
        const Json& run = r["run"];
        os << "rng " << run["rng_algorithm"].get<std::string>() << ", bound v = " << r["bound"].get<std::size_t>()
           << "\n";
        os << std::setw(6) << "t" << "  " << std::setw(10) << "event" << "  " << std::setw(6) << "token" << "  "
           << std::setw(10) << "world" << "  digest\n";
        for (const auto& s : run["steps"]) {
            os << std::setw(6) << s["t"].get<std::size_t>() << "  " << std::setw(10) << s["event"].get<std::string>()
               << "  " << std::setw(6) << s["token"].get<std::string>() << "  " << std::setw(10)
               << s["realized"]["world"].get<std::string>() << "  " << std::hex << s["rng_digest"].get<std::uint64_t>()
               << std::dec << "\n";
        }
        os << "trajectory: " << join_tokens(run["final"]["trajectory"]) << "\n";
    } else if (report.command == "duel") {
        const Json& d = r["report"];
        os << std::setw(6) << "step" << "  " << std::setw(14) << "n" << "  " << std::setw(14) << "J1" << "  "
           << std::setw(14) << "J2" << "\n";
        for (const auto& s : d["table"]) {
            os << std::setw(6) << s["step"].get<std::size_t>() << "  " << std::setw(14)
               << fmt_double(s["n"].get<double>()) << "  " << std::setw(14) << fmt_double(s["J1"].get<double>())
               << "  " << std::setw(14) << fmt_double(s["J2"].get<double>()) << "\n";
        }
        os << "final n = " << fmt_double(d["final_n"].get<double>())
           << (d["converged"].get<bool>() ? " (converged)" : " (step limit)") << "\n";
    } else if (report.command == "pse") {
        const Json& a = r["audit"];
        os << "status: " << a["status"].get<std::string>() << "\n";
        os << "input: " << join_tokens(a["input"]) << "\n";
        os << "v_P = " << a["v_partial"].get<std::size_t>() << ", v_S = " << a["v_complete"].get<std::size_t>()
           << "\n";
        os << "partial: " << join_tokens(a["partial_trajectory"]) << "\n";
        os << "verdict: " << a["verdict"]["decision"].get<int>() << " (" << a["verdict"]["rationale"].get<std::string>()
           << ")\n";
        os << "complete: "
           << (a["complete_trajectory"].is_null() ? std::string("<not run>") : join_tokens(a["complete_trajectory"]))
           << "\n";
    }
    return os.str();
}

}  // namespace cartsim
