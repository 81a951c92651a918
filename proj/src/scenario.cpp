#include "cartsim/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cartsim {

using nlohmann::json;

ScenarioError::ScenarioError(Kind kind, std::string path, const std::string& detail)
    : Error("error[" + std::string(to_string(kind)) + "] " + (path.empty() ? std::string("<file>") : path) + ": " +
            detail),
      kind_(kind),
      path_(std::move(path)) {}

std::string_view to_string(ScenarioError::Kind kind) {
    switch (kind) {
        case ScenarioError::Kind::missing_file: return "missing-file";
        case ScenarioError::Kind::parse: return "parse";
        case ScenarioError::Kind::unknown_version: return "unknown-version";
        case ScenarioError::Kind::dangling_reference: return "dangling-reference";
        case ScenarioError::Kind::invariant: return "invariant";
    }
    return "?";
}

namespace {

using Kind = ScenarioError::Kind;

[[noreturn]] void fail(Kind kind, const std::string& path, const std::string& detail) {
    throw ScenarioError(kind, path, detail);
}

const json& field(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(Kind::invariant, path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(Kind::invariant, path + "/" + key, "required field is missing");
    return *it;
}

template <class T>
T as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        fail(Kind::invariant, path, std::string("wrong type: ") + e.what());
    }
}

template <class T>
T get(const json& j, const std::string& path, const std::string& key) {
    return as<T>(field(j, path, key), path + "/" + key);
}

template <class T>
T get_or(const json& j, const std::string& path, const std::string& key, T fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : as<T>(*it, path + "/" + key);
}

// Runs a module constructor, reporting its validation failure at `path`.
template <class F>
auto build(const std::string& path, const std::string& what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        fail(Kind::invariant, path, what + ": " + e.what());
    }
}

std::vector<double> distribution(const json& j, const std::string& path, const std::vector<std::string>& labels) {
    if (j.is_array()) return as<std::vector<double>>(j, path);
    if (!j.is_object()) fail(Kind::invariant, path, "distribution must be an array or a label->probability object");
    std::vector<double> out(labels.size(), 0.0);
    for (const auto& [label, p] : j.items()) {
        auto pos = std::find(labels.begin(), labels.end(), label);
        if (pos == labels.end()) fail(Kind::invariant, path + "/" + label, "unknown label '" + label + "'");
        out[static_cast<std::size_t>(pos - labels.begin())] = as<double>(p, path + "/" + label);
    }
    return out;
}

// Iterates a named section (array of objects each carrying "name").
template <class F>
void each_named(const json& root, const std::string& section, F&& f) {
    auto it = root.find(section);
    if (it == root.end()) return;
    const std::string base = "/" + section;
    if (!it->is_array()) fail(Kind::invariant, base, "section must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string path = base + "/" + std::to_string(i);
        const json& entry = (*it)[i];
        const auto name = get<std::string>(entry, path, "name");
        if (name.empty()) fail(Kind::invariant, path + "/name", "name must not be empty");
        if (!names.insert(name).second) fail(Kind::invariant, path + "/name", "duplicate name '" + name + "'");
        f(entry, path, name);
    }
}

template <class Map>
const typename Map::mapped_type& resolve(const Map& map, const std::string& path, const std::string& kind,
                                         const std::string& name) {
    auto it = map.find(name);
    if (it == map.end()) fail(Kind::dangling_reference, path, "no " + kind + " named '" + name + "'");
    return it->second;
}

void parse_frames(const json& root, Scenario& sc) {
    each_named(root, "frames", [&](const json& j, const std::string& path, const std::string& name) {
        auto actions = get<std::vector<std::string>>(j, path, "actions");
        auto envs = get<std::vector<std::string>>(j, path, "envs");
        auto matrix = get<std::vector<std::string>>(j, path, "matrix");
        std::optional<std::vector<std::string>> worlds;
        if (j.contains("worlds")) worlds = get<std::vector<std::string>>(j, path, "worlds");
        sc.frames.emplace(name, build(path, "frame '" + name + "'", [&] {
                              return CartesianFrame::from_labels(std::move(actions), std::move(envs), matrix,
                                                                 std::move(worlds));
                          }));
    });
}

void parse_objects(const json& root, Scenario& sc) {
    each_named(root, "objects", [&](const json& j, const std::string& path, const std::string& name) {
        auto agents = get<std::vector<std::vector<std::string>>>(j, path, "agents");
        auto envs = get<std::vector<std::string>>(j, path, "envs");
        auto table = get<std::vector<std::string>>(j, path, "table");
        std::optional<std::vector<std::string>> worlds;
        if (j.contains("worlds")) worlds = get<std::vector<std::string>>(j, path, "worlds");
        sc.objects.emplace(name, build(path, "object '" + name + "'", [&] {
                               return CartesianObject::from_labels(std::move(agents), std::move(envs), table,
                                                                   std::move(worlds));
                           }));
    });
}

void parse_profiles(const json& root, Scenario& sc) {
    each_named(root, "profiles", [&](const json& j, const std::string& path, const std::string& name) {
        const auto object_name = get<std::string>(j, path, "object");
        const auto& obj = resolve(sc.objects, path + "/object", "object", object_name);
        std::vector<std::optional<std::vector<double>>> agents(obj.agent_count());
        if (j.contains("agents")) {
            const json& spec = field(j, path, "agents");
            if (!spec.is_object()) fail(Kind::invariant, path + "/agents", "expected an object keyed by agent index");
            for (const auto& [key, dist] : spec.items()) {
                const std::string apath = path + "/agents/" + key;
                std::size_t index = 0;
                try {
                    index = std::stoul(key);
                } catch (const std::exception&) {
                    fail(Kind::invariant, apath, "agent key must be a 1-based index");
                }
                if (index < 1 || index > obj.agent_count()) {
                    fail(Kind::invariant, apath, "object '" + object_name + "' has no agent " + key);
                }
                agents[index - 1] = distribution(dist, apath, obj.actions(AgentIndex{index}).labels());
                if (agents[index - 1]->size() != obj.actions(AgentIndex{index}).size()) {
                    fail(Kind::invariant, apath, "profile '" + name + "': distribution size does not match agent");
                }
            }
        }
        std::vector<double> env(obj.envs().size(), 1.0 / static_cast<double>(obj.envs().size()));
        if (j.contains("env")) {
            env = distribution(j["env"], path + "/env", obj.envs().labels());
            if (env.size() != obj.envs().size()) {
                fail(Kind::invariant, path + "/env", "profile '" + name + "': distribution size does not match E");
            }
        }
        sc.profiles.emplace(name, NamedProfile{object_name, build(path, "profile '" + name + "'", [&] {
                                                   return BehaviorProfile(std::move(agents), std::move(env));
                                               })});
    });
}

void parse_event_spaces(const json& root, Scenario& sc) {
    each_named(root, "event_spaces", [&](const json& j, const std::string& path, const std::string& name) {
        const auto bound = get<std::size_t>(j, path, "bound");
        const json& events = field(j, path, "events");
        if (!events.is_array()) fail(Kind::invariant, path + "/events", "expected an array");
        std::vector<SimEvent> out;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const std::string epath = path + "/events/" + std::to_string(i);
            const json& e = events[i];
            const auto object_name = get<std::string>(e, epath, "object");
            SimEvent ev{get<std::string>(e, epath, "id"), resolve(sc.objects, epath + "/object", "object", object_name),
                        {}, get_or<double>(e, epath, "weight", 1.0), std::nullopt};
            if (e.contains("profile")) {
                const auto pname = get<std::string>(e, epath, "profile");
                const auto& p = resolve(sc.profiles, epath + "/profile", "profile", pname);
                if (p.object != object_name) {
                    fail(Kind::invariant, epath + "/profile",
                         "profile '" + pname + "' belongs to object '" + p.object + "'");
                }
                ev.profile = p.profile;
            }
            const json& sims = field(e, epath, "simulacra");
            if (!sims.is_array()) fail(Kind::invariant, epath + "/simulacra", "expected an array");
            for (std::size_t k = 0; k < sims.size(); ++k) {
                const std::string spath = epath + "/simulacra/" + std::to_string(k);
                ev.simulacra.push_back(Simulacrum{get<std::string>(sims[k], spath, "id"),
                                                  get_or<std::vector<std::string>>(sims[k], spath, "actions", {}),
                                                  get_or<std::string>(sims[k], spath, "description", "")});
            }
            out.push_back(std::move(ev));
        }
        sc.event_spaces.emplace(name, build(path, "event space '" + name + "'",
                                            [&] { return EventSpace(std::move(out), bound); }));
    });
}

void parse_selectors(const json& root, Scenario& sc) {
    each_named(root, "selectors", [&](const json& j, const std::string& path, const std::string& name) {
        const auto tokens = get<std::vector<std::string>>(j, path, "alphabet");
        std::optional<std::vector<double>> fallback;
        if (j.contains("default")) fallback = distribution(j["default"], path + "/default", tokens);
        std::vector<TokenSelector::Entry> entries;
        if (j.contains("entries")) {
            const json& es = j["entries"];
            if (!es.is_array()) fail(Kind::invariant, path + "/entries", "expected an array");
            for (std::size_t i = 0; i < es.size(); ++i) {
                const std::string epath = path + "/entries/" + std::to_string(i);
                entries.push_back({get<std::vector<std::string>>(es[i], epath, "context"),
                                   distribution(field(es[i], epath, "distribution"), epath + "/distribution", tokens)});
            }
        }
        sc.selectors.emplace(name, build(path, "selector '" + name + "'", [&] {
                                 return TokenSelector(Alphabet(tokens), std::move(entries), std::move(fallback));
                             }));
    });
}

void parse_simulations(const json& root, Scenario& sc) {
    each_named(root, "simulations", [&](const json& j, const std::string& path, const std::string& name) {
        Simulation s{get<std::string>(j, path, "space"), get<std::string>(j, path, "selector"),
                     get<std::size_t>(j, path, "steps"), get_or<std::uint64_t>(j, path, "seed", 0)};
        resolve(sc.event_spaces, path + "/space", "event space", s.space);
        resolve(sc.selectors, path + "/selector", "selector", s.selector);
        sc.simulations.emplace(name, std::move(s));
    });
}

void parse_duels(const json& root, Scenario& sc) {
    each_named(root, "duels", [&](const json& j, const std::string& path, const std::string& name) {
        duel::DuelConfig c;
        c.k = get_or<std::size_t>(j, path, "k", c.k);
        c.p1 = get_or<std::vector<double>>(j, path, "p1", c.p1);
        c.p2 = get_or<std::vector<double>>(j, path, "p2", c.p2);
        c.xi = get_or<double>(j, path, "xi", c.xi);
        c.eta = get_or<double>(j, path, "eta", c.eta);
        c.n0 = get_or<double>(j, path, "n0", c.n0);
        c.max_steps = get_or<std::size_t>(j, path, "max_steps", c.max_steps);
        c.tolerance = get_or<double>(j, path, "tolerance", c.tolerance);
        const auto rule = get_or<std::string>(j, path, "rule", "attraction");
        if (rule == "attraction") {
            c.rule = duel::UpdateRule::attraction;
        } else if (rule == "preference_dot") {
            c.rule = duel::UpdateRule::preference_dot;
        } else {
            fail(Kind::invariant, path + "/rule", "unknown update rule '" + rule + "'");
        }
        build(path, "duel '" + name + "'", [&] {
            c.validate();
            return 0;
        });
        sc.duels.emplace(name, c);
    });
}

pse::Decision decision(const json& j, const std::string& path) {
    const int d = as<int>(j, path);
    if (d != 0 && d != 1) fail(Kind::invariant, path, "decision must be 0 or 1");
    return static_cast<pse::Decision>(d);
}

void parse_evaluators(const json& root, Scenario& sc) {
    each_named(root, "evaluators", [&](const json& j, const std::string& path, const std::string& name) {
        pse::EvaluatorSpec spec;
        spec.fallback = decision(field(j, path, "default"), path + "/default");
        spec.rationale_template = get_or<std::string>(j, path, "rationale", spec.rationale_template);
        if (j.contains("rules")) {
            const json& rules = j["rules"];
            if (!rules.is_array()) fail(Kind::invariant, path + "/rules", "expected an array");
            for (std::size_t i = 0; i < rules.size(); ++i) {
                const std::string rpath = path + "/rules/" + std::to_string(i);
                const json& r = rules[i];
                pse::Rule rule;
                rule.name = get_or<std::string>(r, rpath, "name", "");
                rule.kind = build(rpath + "/kind", "evaluator '" + name + "'",
                                  [&] { return pse::parse_rule_kind(get<std::string>(r, rpath, "kind")); });
                rule.pattern = get_or<std::vector<std::string>>(r, rpath, "pattern", {});
                rule.threshold = get_or<std::size_t>(r, rpath, "threshold", 1);
                rule.event_id = get_or<std::string>(r, rpath, "event", "");
                rule.world = get_or<std::string>(r, rpath, "world", "");
                rule.decision = decision(field(r, rpath, "decision"), rpath + "/decision");
                if ((rule.kind == pse::Rule::Kind::contains || rule.kind == pse::Rule::Kind::count_at_least) &&
                    rule.pattern.empty()) {
                    fail(Kind::invariant, rpath + "/pattern", "rule needs a non-empty pattern");
                }
                spec.rules.push_back(std::move(rule));
            }
        }
        sc.evaluators.emplace(name, std::move(spec));
    });
}

pse::SimulatorHandle handle_from(const json& j, const std::string& path, const Scenario& sc) {
    const auto space_name = get<std::string>(j, path, "space");
    const auto selector_name = get<std::string>(j, path, "selector");
    const auto& space = resolve(sc.event_spaces, path + "/space", "event space", space_name);
    const auto& selector = resolve(sc.selectors, path + "/selector", "selector", selector_name);
    const auto steps = get<std::size_t>(j, path, "steps");
    const auto bound = get_or<std::size_t>(j, path, "bound", space.bound());
    return pse::SimulatorHandle{space.with_bound(bound), selector, steps, {}, std::nullopt};
}

void parse_pipelines(const json& root, Scenario& sc) {
    each_named(root, "pipelines", [&](const json& j, const std::string& path, const std::string& name) {
        pse::SimulatorHandle complete = handle_from(field(j, path, "complete"), path + "/complete", sc);
        pse::SimulatorHandle base =
            j.contains("partial") ? handle_from(j["partial"], path + "/partial", sc) : complete;
        const auto evaluator = get<std::string>(j, path, "evaluator");
        resolve(sc.evaluators, path + "/evaluator", "evaluator", evaluator);

        pse::PerturbationConfig perturbation = pse::identity_perturbation(base, base.step_budget);
        if (j.contains("perturbation")) {
            const std::string ppath = path + "/perturbation";
            const json& p = j["perturbation"];
            if (p.contains("fidelity")) {
                perturbation.fidelity = get<std::map<std::string, std::string>>(p, ppath, "fidelity");
            }
            if (p.contains("fragmentation")) {
                perturbation.fragmentation = get<std::vector<std::string>>(p, ppath, "fragmentation");
            }
            perturbation.time_to_live = get_or<std::size_t>(p, ppath, "time_to_live", base.step_budget);
        }
        pse::SimulatorHandle partial = build(path + "/perturbation", "pipeline '" + name + "'",
                                             [&] { return pse::perturb(base, perturbation); });
        if (partial.bound() > complete.bound()) {
            fail(Kind::invariant, path + "/partial/bound",
                 "pipeline '" + name + "': partial bound " + std::to_string(partial.bound()) +
                     " exceeds complete bound " + std::to_string(complete.bound()));
        }
        Pipeline pl{std::move(partial),
                    std::move(complete),
                    evaluator,
                    get_or<std::vector<std::string>>(j, path, "prompt", {}),
                    get_or<std::vector<std::string>>(j, path, "condition", {}),
                    {}};
        if (j.contains("seeds")) {
            pl.seeds.partial = get_or<std::uint64_t>(j["seeds"], path + "/seeds", "partial", 0);
            pl.seeds.complete = get_or<std::uint64_t>(j["seeds"], path + "/seeds", "complete", 0);
        }
        build(path + "/prompt", "pipeline '" + name + "'",
              [&] { return pse::compose_input(pl.complete.alphabet(), pl.prompt, pl.condition); });
        sc.pipelines.emplace(name, std::move(pl));
    });
}

}  // namespace

Scenario parse_scenario_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Kind::parse, "", e.what());
    }
    if (!root.is_object()) fail(Kind::parse, "", "top level must be an object");
    if (!root.contains("version")) fail(Kind::unknown_version, "/version", "version field is missing");
    const json& version = root["version"];
    if (!version.is_number_integer() || version.get<int>() != kScenarioVersion) {
        fail(Kind::unknown_version, "/version",
             "unsupported version " + version.dump() + " (expected " + std::to_string(kScenarioVersion) + ")");
    }
    static const std::set<std::string> sections = {"version",    "frames",    "objects",     "profiles",
                                                   "event_spaces", "selectors", "simulations", "duels",
                                                   "evaluators", "pipelines"};
    for (const auto& [key, value] : root.items()) {
        if (!sections.contains(key)) fail(Kind::invariant, "/" + key, "unknown section");
    }
    Scenario sc;
    parse_frames(root, sc);
    parse_objects(root, sc);
    parse_profiles(root, sc);
    parse_event_spaces(root, sc);
    parse_selectors(root, sc);
    parse_simulations(root, sc);
    parse_duels(root, sc);
    parse_evaluators(root, sc);
    parse_pipelines(root, sc);
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::filesystem::path resolved = path;
    if (!std::filesystem::exists(resolved) && path.is_relative()) {
        if (const char* dir = std::getenv("CARTSIM_SCENARIO_DIR"); dir && *dir) {
            resolved = std::filesystem::path(dir) / path;
        }
    }
    std::ifstream in(resolved, std::ios::binary);
    if (!in) fail(Kind::missing_file, "", "cannot read scenario file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

}  // namespace cartsim
