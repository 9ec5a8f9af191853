// Timing harness for the assembly kernels: serial reference vs the
// slab-partitioned parallel path, with a bitwise agreement check.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "leslab/fem.hpp"
#include "leslab/mesh.hpp"

using namespace leslab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

bool same_triplets(const std::vector<Eigen::Triplet<double>>& a,
                   const std::vector<Eigen::Triplet<double>>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].row() != b[i].row() || a[i].col() != b[i].col() ||
            a[i].value() != b[i].value())
            return false;
    return true;
}

template <typename F>
void bench(const char* name, F make, int reps) {
    auto t0 = Clock::now();
    Triplets ser;
    for (int r = 0; r < reps; ++r) {
        ser.clear();
        make(ser, ExecMode::Serial);
    }
    auto t1 = Clock::now();
    Triplets par;
    for (int r = 0; r < reps; ++r) {
        par.clear();
        make(par, ExecMode::Parallel);
    }
    auto t2 = Clock::now();
    const double ts = seconds(t0, t1) / reps, tp = seconds(t1, t2) / reps;
    std::printf("%-12s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name,
                1e3 * ts, 1e3 * tp, ts / tp, same_triplets(ser, par) ? "bitwise ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 96;
    int reps = argc > 2 ? std::atoi(argv[2]) : 5;

    ChannelSpec spec;
    spec.nx = n;
    spec.ny = n;
    Mesh mesh = build_channel_mesh(spec);
    MixedSpace s = MixedSpace::build(mesh);
    std::printf("channel %dx%d: %d triangles, %d velocity dofs\n", n, n, mesh.n_triangles(),
                s.n_vel);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd u(s.n_vel);
    for (int i = 0; i < s.n_vel; ++i) u[i] = dist(rng);

    bench("mass", [&](Triplets& t, ExecMode m) { mass_triplets(s, 1.0, t, m); }, reps);
    bench("stiffness", [&](Triplets& t, ExecMode m) { stiffness_triplets(s, 1.0, t, m); }, reps);
    bench("divergence", [&](Triplets& t, ExecMode m) { divergence_triplets(s, t, m); }, reps);
    bench("advection", [&](Triplets& t, ExecMode m) { advection_triplets(s, u, t, m); }, reps);
    bench("eddy",
          [&](Triplets& t, ExecMode m) { eddy_viscosity_triplets(s, u, 0.0289, t, m); }, reps);
    return 0;
}
