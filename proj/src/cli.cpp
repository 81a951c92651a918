#include "cartsim/cli.hpp"

#include <CLI11.hpp>

#include "cartsim/report.hpp"

namespace cartsim {

namespace {

struct RawFlags {
    std::string scenario;
    std::string name;
    std::string op;
    std::string set;
    std::size_t agent = 1;
    double theta = 0.0;
    std::string profile;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    std::string action;
    std::string env;
    std::string audit_log;
    bool machine = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cartesian frame, simulator dynamics and partial-simulation gating toolkit", "cartsim"};
    app.require_subcommand(1);
    RawFlags f;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", f.scenario, "Scenario file (relative paths also tried under $CARTSIM_SCENARIO_DIR)")
            ->required();
        cmd->add_option("--name", f.name, "Entry name in the scenario")->required();
        cmd->add_flag("--machine", f.machine, "Emit the structured JSON report");
    };
    CLI::App* frame = app.add_subcommand("frame", "Frame operators");
    CLI::App* object = app.add_subcommand("object", "Cartesian object operators");
    CLI::App* sim = app.add_subcommand("sim", "Run the simulator forward pass");
    CLI::App* duel = app.add_subcommand("duel", "Run the two-optimizer duel");
    CLI::App* pse = app.add_subcommand("pse", "Run a partial-simulation gate");
    for (auto* cmd : {frame, object, sim, duel, pse}) add_common(cmd);

    for (auto* cmd : {frame, object}) {
        cmd->add_option("--op", f.op, "Operator")->required();
        cmd->add_option("--set", f.set, "Comma-separated world labels; omit to enumerate the family");
        cmd->add_option("--action", f.action, "Action label(s) for --op outcome");
        cmd->add_option("--env", f.env, "Environment label for --op outcome");
    }
    object->add_option("--agent", f.agent, "One-based agent index")->check(CLI::PositiveNumber);
    object->add_option("--theta", f.theta, "Certainty threshold in [0, 1]");
    object->add_option("--profile", f.profile, "Behavior profile name");
    for (auto* cmd : {sim, pse}) cmd->add_option("--seed", f.seed, "Seed (pse: partial seed; complete uses seed+1)");
    for (auto* cmd : {sim, duel}) cmd->add_option("--steps", f.steps, "Step count (duel: max steps)");
    pse->add_option("--audit-log", f.audit_log, "Append the audit record to this log file");

    std::vector<const char*> argv{"cartsim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    auto given = [&](const std::string& flag) {
        const CLI::Option* o = chosen->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };
    CommandOptions opts;
    opts.name = f.name;
    opts.op = f.op;
    if (given("--set")) opts.set = split_list(f.set);
    opts.agent = f.agent;
    if (given("--theta")) opts.theta = f.theta;
    if (given("--profile")) opts.profile = f.profile;
    if (given("--seed")) opts.seed = f.seed;
    if (given("--steps")) opts.steps = f.steps;
    if (given("--action")) opts.action = f.action;
    if (given("--env")) opts.env = f.env;
    if (given("--audit-log")) opts.audit_log = f.audit_log;

    try {
        const Scenario scenario = parse_scenario(f.scenario);
        Report report = run_command(scenario, chosen->get_name(), opts);
        report.argv = args;
        if (f.machine) {
            out << to_json(report).dump(2) << "\n";
        } else {
            out << render_human(report);
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ScenarioError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cartsim
