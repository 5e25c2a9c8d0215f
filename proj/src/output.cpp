#include "wta/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace wta {

namespace {

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string f2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

Side side_from_string(const std::string& s) {
    if (s == "interceptor") return Side::interceptor;
    if (s == "target") return Side::target;
    if (s == "asset") return Side::asset;
    throw OutputError("unknown side '" + s + "' in trajectory file");
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw OutputError("cannot write " + tmp.string());
        out << content;
        if (!out) throw OutputError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw OutputError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string trajectory_csv(const MissionLog& log) {
    std::vector<TrajectorySample> rows = log.trajectories;
    for (const auto& a : log.assets) rows.push_back({0.0, Side::asset, a.id, {a.position, {}}, 0});
    std::stable_sort(rows.begin(), rows.end(), [](const TrajectorySample& a, const TrajectorySample& b) {
        return std::make_tuple(a.time, std::string(to_string(a.side)), a.id) <
               std::make_tuple(b.time, std::string(to_string(b.side)), b.id);
    });

    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (const auto& r : rows) {
        out += g6(r.time) + ',' + to_string(r.side) + ',' + std::to_string(r.id);
        for (double v : {r.state.position.x, r.state.position.y, r.state.position.z, r.state.velocity.x,
                         r.state.velocity.y, r.state.velocity.z}) {
            out += ',' + g6(v);
        }
        out += ',';
        if (r.side == Side::interceptor && r.assigned_target != 0) out += std::to_string(r.assigned_target);
        out += '\n';
    }
    return out;
}

void write_trajectory_csv(const MissionLog& log, const std::filesystem::path& path) {
    write_file_atomic(path, trajectory_csv(log));
}

std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw OutputError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != kTrajectoryHeader) throw OutputError("unexpected trajectory header in " + path.string());

    std::vector<TrajectorySample> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() == 9) fields.emplace_back();
        if (fields.size() != 10) throw OutputError("malformed trajectory row: " + line);
        TrajectorySample s;
        s.time = std::stod(fields[0]);
        s.side = side_from_string(fields[1]);
        s.id = std::stoi(fields[2]);
        s.state.position = {std::stod(fields[3]), std::stod(fields[4]), std::stod(fields[5])};
        s.state.velocity = {std::stod(fields[6]), std::stod(fields[7]), std::stod(fields[8])};
        s.assigned_target = fields[9].empty() ? 0 : std::stoi(fields[9]);
        rows.push_back(s);
    }
    return rows;
}

std::string metrics_json(const MissionLog& log) {
    const MissionMetrics& m = log.metrics;
    nlohmann::ordered_json j;
    j["metrics"] = {{"targets_intercepted", m.targets_intercepted},
                    {"assets_breached", m.assets_breached},
                    {"targets_surviving", m.targets_surviving},
                    {"mean_intercept_time", m.mean_intercept_time},
                    {"total_switches", m.total_switches},
                    {"fallback_count", m.fallback_count},
                    {"mean_assigner_latency", m.mean_assigner_latency},
                    {"epochs", m.epochs},
                    {"end_time", m.end_time}};
    j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : log.events) {
        j["events"].push_back({{"kind", to_string(e.kind)},
                               {"time", e.time},
                               {"interceptor", e.interceptor_id},
                               {"target", e.target_id},
                               {"asset", e.asset_id},
                               {"detail", e.detail}});
    }
    return j.dump(2) + "\n";
}

void write_metrics(const MissionLog& log, const std::filesystem::path& path) {
    write_file_atomic(path, metrics_json(log));
}

std::string render_plot(const MissionLog& log, double time) {
    double last = 0.0;
    for (const auto& s : log.trajectories) last = std::max(last, s.time);
    const double t = std::clamp(time, 0.0, last);

    // World bounds over tracks and zones.
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool init = false;
    auto grow = [&](double x, double y, double pad) {
        if (!init) {
            xmin = x - pad, xmax = x + pad, ymin = y - pad, ymax = y + pad;
            init = true;
            return;
        }
        xmin = std::min(xmin, x - pad), xmax = std::max(xmax, x + pad);
        ymin = std::min(ymin, y - pad), ymax = std::max(ymax, y + pad);
    };
    for (const auto& a : log.assets) grow(a.position.x, a.position.y, a.protection_radius);
    for (const auto& s : log.trajectories) grow(s.state.position.x, s.state.position.y, 0.0);
    if (!init) grow(0.0, 0.0, 1.0);
    const double margin = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-9;
    xmin -= margin, xmax += margin, ymin -= margin, ymax += margin;

    constexpr double kSize = 800.0;
    const double scale = kSize / std::max(xmax - xmin, ymax - ymin);
    auto px = [&](double x) { return f2((x - xmin) * scale); };
    auto py = [&](double y) { return f2(kSize - (y - ymin) * scale); };

    // Per-agent tracks up to time t, keyed by (side, id).
    std::map<std::pair<int, int>, std::vector<const TrajectorySample*>> tracks;
    for (const auto& s : log.trajectories) {
        if (s.time <= t + 1e-9) tracks[{static_cast<int>(s.side), s.id}].push_back(&s);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n"
        << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n"
        << "<text class=\"title\" x=\"10\" y=\"20\" font-size=\"14\">t = " << f2(t) << " s</text>\n";

    for (const auto& a : log.assets) {
        svg << "<circle class=\"zone\" cx=\"" << px(a.position.x) << "\" cy=\"" << py(a.position.y) << "\" r=\""
            << f2(a.protection_radius * scale) << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        svg << "<rect class=\"asset\" x=\"" << f2((a.position.x - xmin) * scale - 4) << "\" y=\""
            << f2(kSize - (a.position.y - ymin) * scale - 4) << "\" width=\"8\" height=\"8\" fill=\"black\"/>\n";
    }

    // Intended target trajectories toward their associated asset.
    for (std::size_t k = 0; k < log.target_assets.size(); ++k) {
        auto it = tracks.find({static_cast<int>(Side::target), static_cast<int>(k) + 1});
        if (it == tracks.end()) continue;
        const auto& start = it->second.front()->state.position;
        const auto asset = std::find_if(log.assets.begin(), log.assets.end(),
                                        [&](const AssetSpec& a) { return a.id == log.target_assets[k]; });
        if (asset == log.assets.end()) continue;
        svg << "<line class=\"intended\" x1=\"" << px(start.x) << "\" y1=\"" << py(start.y) << "\" x2=\""
            << px(asset->position.x) << "\" y2=\"" << py(asset->position.y)
            << "\" stroke=\"gray\" stroke-dasharray=\"4,4\"/>\n";
    }

    for (const auto& [key, samples] : tracks) {
        const bool interceptor = key.first == static_cast<int>(Side::interceptor);
        svg << "<polyline class=\"" << (interceptor ? "interceptor-track" : "target-track") << "\" fill=\"none\" stroke=\""
            << (interceptor ? "blue" : "red") << "\" points=\"";
        for (std::size_t n = 0; n < samples.size(); ++n) {
            svg << (n ? " " : "") << px(samples[n]->state.position.x) << ',' << py(samples[n]->state.position.y);
        }
        svg << "\"/>\n";
    }

    std::set<int> spent;
    for (const auto& e : log.events) {
        if (e.kind == EventKind::intercept && e.time <= t + 1e-9) spent.insert(e.interceptor_id);
    }

    // Assignment lines between the latest interceptor sample and its target.
    for (const auto& [key, samples] : tracks) {
        if (key.first != static_cast<int>(Side::interceptor) || spent.count(key.second)) continue;
        const TrajectorySample* s = samples.back();
        if (s->assigned_target == 0 || s->time + 1e-9 < t) continue;
        auto target = tracks.find({static_cast<int>(Side::target), s->assigned_target});
        if (target == tracks.end() || target->second.back()->time + 1e-9 < t) continue;
        const auto& tp = target->second.back()->state.position;
        svg << "<line class=\"assignment\" x1=\"" << px(s->state.position.x) << "\" y1=\"" << py(s->state.position.y)
            << "\" x2=\"" << px(tp.x) << "\" y2=\"" << py(tp.y) << "\" stroke=\"red\" stroke-dasharray=\"1,3\"/>\n";
    }

    for (const auto& e : log.events) {
        if (e.kind != EventKind::intercept || e.time > t + 1e-9) continue;
        auto target = tracks.find({static_cast<int>(Side::target), e.target_id});
        if (target == tracks.end()) continue;
        const auto& p = target->second.back()->state.position;
        char label[96];
        std::snprintf(label, sizeof label, "Successful intercept at T = %.0f s", e.time);
        svg << "<circle class=\"intercept\" cx=\"" << px(p.x) << "\" cy=\"" << py(p.y)
            << "\" r=\"5\" fill=\"none\" stroke=\"green\"/>\n"
            << "<text class=\"intercept-label\" x=\"" << px(p.x) << "\" y=\"" << py(p.y)
            << "\" dx=\"6\" dy=\"-6\" font-size=\"10\" fill=\"green\">" << label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const MissionLog& log, double time, const std::filesystem::path& path) {
    write_file_atomic(path, render_plot(log, time));
}

}  // namespace wta
