// Serial reference kernels vs. the OpenMP versions on random engagements.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "wta/cost.hpp"
#include "wta/geometry.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    const auto start = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count() / reps;
}

std::vector<wta::AgentState> random_states(std::size_t n, std::mt19937_64& rng, double spread) {
    std::uniform_real_distribution<double> pos(-spread, spread);
    std::uniform_real_distribution<double> vel(-0.5, 0.5);
    std::vector<wta::AgentState> out(n);
    for (auto& s : out) {
        s.position = {pos(rng), pos(rng), pos(rng)};
        s.velocity = {vel(rng), vel(rng), vel(rng)};
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    std::mt19937_64 rng(7);
    std::printf("%-8s %-22s %12s %12s %8s %s\n", "n", "kernel", "serial_ms", "openmp_ms", "speedup", "match");
    for (std::size_t n : {64u, 256u, 1024u, 2048u}) {
        const auto interceptors = random_states(n, rng, 50.0);
        const auto targets = random_states(n, rng, 150.0);

        auto row = [&](const char* name, auto serial, auto parallel) {
            wta::Matrix a, b;
            const double ts = time_ms([&] { a = serial(); }, reps);
            const double tp = time_ms([&] { b = parallel(); }, reps);
            std::printf("%-8zu %-22s %12.3f %12.3f %8.2f %s\n", n, name, ts, tp, ts / tp,
                        a == b ? "yes" : "NO");
        };
        row("distance",
            [&] { return wta::reference::distance_matrix(interceptors, targets); },
            [&] { return wta::distance_matrix(interceptors, targets); });
        row("closing",
            [&] { return wta::reference::closing_matrix(interceptors, targets); },
            [&] { return wta::closing_matrix(interceptors, targets); });
        row("relative_speed",
            [&] { return wta::reference::relative_speed_matrix(interceptors, targets); },
            [&] { return wta::relative_speed_matrix(interceptors, targets); });

        wta::Scenario sc;
        sc.assets.push_back({1, {0, 0, 0}, 0.9, 5.0});
        std::vector<wta::LiveAgent> li, lt;
        for (std::size_t i = 0; i < n; ++i) {
            li.push_back({static_cast<int>(i + 1), interceptors[i]});
            lt.push_back({static_cast<int>(i + 1), targets[i]});
            sc.targets.push_back({static_cast<int>(i + 1), targets[i],
                                  0.1 + 0.9 * static_cast<double>(i % 10) / 9.0, {}, std::nullopt});
        }
        const auto snap = wta::build_snapshot(sc, li, lt, 0, 0.0, {});
        row("surrogate_cost",
            [&] { return wta::reference::surrogate_cost_matrix(snap, sc.cost_weights).values; },
            [&] { return wta::surrogate_cost_matrix(snap, sc.cost_weights).values; });
    }
    return 0;
}
