#include "wta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wta {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        throw ScenarioError("field '" + field + "' must be a 3-element array");
    }
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

AgentState state_from(const json& j, const std::string& owner) {
    return {vec3_from(j.at("position"), owner + ".position"),
            vec3_from(j.at("velocity"), owner + ".velocity")};
}

template <typename Spec>
void check_ids(const std::vector<Spec>& items, const std::string& kind,
               std::vector<std::string>& out) {
    std::set<int> seen;
    bool duplicate = false;
    for (const auto& item : items) {
        if (!seen.insert(item.id).second) duplicate = true;
    }
    if (duplicate) out.push_back(kind + " ids unique: duplicate id found");
    bool ordered = !duplicate;
    for (std::size_t i = 0; ordered && i < items.size(); ++i) {
        ordered = items[i].id == static_cast<int>(i + 1);
    }
    if (!duplicate && !ordered) out.push_back(kind + " ids listed as 1..n in order");
}

bool finite_state(const AgentState& s) { return is_finite(s.position) && is_finite(s.velocity); }

std::string id_tag(const std::string& kind, int id) { return kind + " " + std::to_string(id) + ": "; }

}  // namespace

const char* to_string(ThreatSense sense) {
    return sense == ThreatSense::literal ? "literal" : "inverted";
}

ThreatSense threat_sense_from_string(const std::string& text) {
    if (text == "literal") return ThreatSense::literal;
    if (text == "inverted") return ThreatSense::inverted;
    throw ScenarioError("threat_sense must be 'literal' or 'inverted', got '" + text + "'");
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v;
    if (s.interceptors.empty()) v.emplace_back("N >= 1 interceptors required");
    if (s.targets.empty()) v.emplace_back("N_T >= 1 targets required");
    if (s.assets.empty()) v.emplace_back("N_a >= 1 assets required");
    check_ids(s.interceptors, "interceptor", v);
    check_ids(s.targets, "target", v);
    check_ids(s.assets, "asset", v);

    if (!(s.a_max > 0.0)) v.emplace_back("a_max > 0");
    if (!(s.x_max > 0.0)) v.emplace_back("x_max > 0");
    if (!(s.sim_dt > 0.0)) v.emplace_back("sim_dt > 0");
    if (!(s.epoch_dt > 0.0)) v.emplace_back("epoch_dt > 0");
    if (!(s.t_final > 0.0)) v.emplace_back("t_final > 0");
    if (!(s.kill_radius > 0.0)) v.emplace_back("kill_radius > 0");
    if (s.epoch_dt > 0.0 && s.sim_dt > 0.0 && s.epoch_dt < s.sim_dt) {
        v.emplace_back("epoch_dt >= sim_dt");
    }

    const auto& w = s.cost_weights;
    if (!(w.w_d > 0.0 && w.w_v > 0.0 && w.w_theta > 0.0 && w.w_psi > 0.0)) {
        v.emplace_back("cost weights strictly positive");
    }
    if (!(s.options.tau_ref > 0.0)) v.emplace_back("tau_ref > 0");
    if (!(s.options.switch_penalty >= 0.0)) v.emplace_back("switch_penalty >= 0");

    double min_radius = std::numeric_limits<double>::infinity();
    std::set<int> asset_ids;
    for (const auto& a : s.assets) {
        asset_ids.insert(a.id);
        if (!(a.priority > 0.0 && a.priority <= 1.0)) {
            v.push_back(id_tag("asset", a.id) + "priority ∈ (0,1]");
        }
        if (!(a.protection_radius > 0.0)) {
            v.push_back(id_tag("asset", a.id) + "protection_radius > 0");
        }
        if (!is_finite(a.position)) v.push_back(id_tag("asset", a.id) + "position finite");
        min_radius = std::min(min_radius, a.protection_radius);
    }
    if (!s.assets.empty() && s.kill_radius > 0.0 && !(s.kill_radius < min_radius)) {
        v.emplace_back("kill_radius < min protection_radius");
    }

    for (const auto& t : s.targets) {
        if (!(t.threat_level > 0.0 && t.threat_level <= 1.0)) {
            v.push_back(id_tag("target", t.id) + "threat_level ∈ (0,1]");
        }
        if (!finite_state(t.initial_state)) v.push_back(id_tag("target", t.id) + "state finite");
        if (!is_finite(t.maneuver_accel) || norm(t.maneuver_accel) > s.a_max) {
            v.push_back(id_tag("target", t.id) + "‖maneuver_accel‖ <= a_max");
        }
        if (t.intended_asset && asset_ids.count(*t.intended_asset) == 0) {
            v.push_back(id_tag("target", t.id) + "intended_asset refers to a known asset");
        }
    }
    for (const auto& i : s.interceptors) {
        if (!(i.nav_constant > 0.0)) v.push_back(id_tag("interceptor", i.id) + "nav_constant > 0");
        if (!finite_state(i.initial_state)) {
            v.push_back(id_tag("interceptor", i.id) + "state finite");
        }
    }

    if (s.options.coverage && s.interceptors.size() < s.targets.size()) {
        v.emplace_back("N ≥ N_T required for coverage");
    }
    return v;
}

Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }

    Scenario s;
    try {
        s.name = root.value("name", std::string{});
        for (const auto& j : root.at("interceptors")) {
            InterceptorSpec spec;
            spec.id = j.at("id").get<int>();
            spec.initial_state = state_from(j, "interceptor");
            spec.nav_constant = j.value("nav_constant", 4.0);
            s.interceptors.push_back(spec);
        }
        for (const auto& j : root.at("targets")) {
            TargetSpec spec;
            spec.id = j.at("id").get<int>();
            spec.initial_state = state_from(j, "target");
            spec.threat_level = j.at("threat_level").get<double>();
            if (j.contains("maneuver_accel")) {
                spec.maneuver_accel = vec3_from(j.at("maneuver_accel"), "target.maneuver_accel");
            }
            if (j.contains("intended_asset") && !j.at("intended_asset").is_null()) {
                spec.intended_asset = j.at("intended_asset").get<int>();
            }
            s.targets.push_back(spec);
        }
        for (const auto& j : root.at("assets")) {
            AssetSpec spec;
            spec.id = j.at("id").get<int>();
            spec.position = vec3_from(j.at("position"), "asset.position");
            spec.priority = j.at("priority").get<double>();
            spec.protection_radius = j.at("protection_radius").get<double>();
            s.assets.push_back(spec);
        }
        const json& phys = root.at("physics");
        s.a_max = phys.at("a_max").get<double>();
        s.x_max = phys.at("x_max").get<double>();
        s.sim_dt = phys.at("sim_dt").get<double>();
        s.epoch_dt = phys.at("epoch_dt").get<double>();
        s.t_final = phys.at("t_final").get<double>();
        s.kill_radius = phys.at("kill_radius").get<double>();

        const json& cw = root.at("cost_weights");
        s.cost_weights = {cw.at("w_d").get<double>(), cw.at("w_v").get<double>(),
                          cw.at("w_theta").get<double>(), cw.at("w_psi").get<double>()};

        if (root.contains("options")) {
            const json& o = root.at("options");
            s.options.coverage = o.value("coverage", s.options.coverage);
            s.options.tau_ref = o.value("tau_ref", s.options.tau_ref);
            s.options.switch_penalty = o.value("switch_penalty", s.options.switch_penalty);
            s.options.normalize = o.value("normalize", s.options.normalize);
            if (o.contains("threat_sense")) {
                s.options.threat_sense = threat_sense_from_string(o.at("threat_sense").get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }

    // Files may list agents in any order; the engine indexes them by id.
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::stable_sort(s.interceptors.begin(), s.interceptors.end(), by_id);
    std::stable_sort(s.targets.begin(), s.targets.end(), by_id);
    std::stable_sort(s.assets.begin(), s.assets.end(), by_id);
    auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "scenario validation failed:";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ScenarioError(msg.str(), std::move(violations));
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    json root;
    root["name"] = s.name;
    root["interceptors"] = json::array();
    for (const auto& i : s.interceptors) {
        root["interceptors"].push_back({{"id", i.id},
                                        {"position", vec3_to(i.initial_state.position)},
                                        {"velocity", vec3_to(i.initial_state.velocity)},
                                        {"nav_constant", i.nav_constant}});
    }
    root["targets"] = json::array();
    for (const auto& t : s.targets) {
        json j = {{"id", t.id},
                  {"position", vec3_to(t.initial_state.position)},
                  {"velocity", vec3_to(t.initial_state.velocity)},
                  {"threat_level", t.threat_level},
                  {"maneuver_accel", vec3_to(t.maneuver_accel)}};
        if (t.intended_asset) j["intended_asset"] = *t.intended_asset;
        root["targets"].push_back(j);
    }
    root["assets"] = json::array();
    for (const auto& a : s.assets) {
        root["assets"].push_back({{"id", a.id},
                                  {"position", vec3_to(a.position)},
                                  {"priority", a.priority},
                                  {"protection_radius", a.protection_radius}});
    }
    root["physics"] = {{"a_max", s.a_max},   {"x_max", s.x_max},     {"sim_dt", s.sim_dt},
                       {"epoch_dt", s.epoch_dt}, {"t_final", s.t_final}, {"kill_radius", s.kill_radius}};
    root["cost_weights"] = {{"w_d", s.cost_weights.w_d},
                            {"w_v", s.cost_weights.w_v},
                            {"w_theta", s.cost_weights.w_theta},
                            {"w_psi", s.cost_weights.w_psi}};
    root["options"] = {{"coverage", s.options.coverage},
                       {"tau_ref", s.options.tau_ref},
                       {"switch_penalty", s.options.switch_penalty},
                       {"threat_sense", to_string(s.options.threat_sense)},
                       {"normalize", s.options.normalize}};
    return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file: " + path.string());
    out << serialize_scenario(s);
}

}  // namespace wta
