// Serial reference vs OpenMP kernels: wall time and bit-identity.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "curvlab/bargmann_fock.hpp"
#include "curvlab/curve_sampler.hpp"

using namespace curvlab;

namespace {

template<class F>
std::pair<double, Estimate> timed(F&& f)
{
    auto t0 = std::chrono::steady_clock::now();
    Estimate e = f();
    auto t1 = std::chrono::steady_clock::now();
    return {std::chrono::duration<double, std::milli>(t1 - t0).count(), e};
}

void row(char const* name, std::function<Estimate(Exec)> const& kernel, int reps)
{
    double ts = 1e300, tp = 1e300;
    Estimate es, ep;
    for (int r = 0; r < reps; ++r)
    {
        auto [a, ea] = timed([&] { return kernel(Exec::serial); });
        auto [b, eb] = timed([&] { return kernel(Exec::parallel); });
        ts = std::min(ts, a);
        tp = std::min(tp, b);
        es = ea;
        ep = eb;
    }
    bool same = es.mean == ep.mean && es.std_err == ep.std_err;
    std::printf("%-22s %10.1f %10.1f %8.2fx  %s\n", name, ts, tp, ts / tp,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"curvlab kernel benchmark"};
    int threads = 0;
    int reps = 3;
    double scale = 1.0;
    app.add_option("--threads", threads, "OpenMP threads (0 = all)");
    app.add_option("--reps", reps, "repetitions, best time kept");
    app.add_option("--scale", scale, "problem size multiplier");
    CLI11_PARSE(app, argc, argv);

    if (threads > 0)
        set_num_threads(threads);
    auto n = [&](double base) { return static_cast<std::uint64_t>(base * scale); };
    RngStream root(2024);

    std::printf("threads: %d\n", max_threads());
    std::printf("%-22s %10s %10s %9s  %s\n", "kernel", "serial ms", "omp ms",
                "speedup", "result");
    row("phi_mc", [&](Exec e) { return phi_mc({1, 4}, n(2e6), root, e); }, reps);
    row("expected_kappa_jet",
        [&](Exec e) {
            return expected_kappa_jet(16, fs_band(1, 4, 16), n(1e6), root, e).est;
        },
        reps);
    auto p = sample_kostlan(8, root);
    row("kappa_estimate",
        [&](Exec e) { return kappa_estimate(p, fs_band(1, 4, 8), n(4e4), root, e).est; },
        reps);
    row("expected_kappa_curves",
        [&](Exec e) {
            return expected_kappa_curves(6, fs_band(1, 4, 6), n(40), 200, root, e).est;
        },
        reps);
    row("prop1_event",
        [&](Exec e) { return prop1_event_probability(n(16), EventConfig{}, root, e); },
        reps);
    return 0;
}
