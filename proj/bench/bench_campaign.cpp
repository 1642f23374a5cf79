// Compares the serial reference campaign path against the OpenMP path on a
// reduced Bell-state workload and confirms the outputs are byte-identical.

#include <chrono>
#include <cstdio>
#include <string>

#include "qpt/harness.hpp"

#ifdef QPT_HAVE_OPENMP
#include <omp.h>
#endif

using namespace qpt;
using clock_type = std::chrono::steady_clock;

namespace {

CampaignConfig bench_config() {
    CampaignConfig cfg;
    cfg.kind = CampaignKind::bell;
    cfg.master_seed = 20120915;
    cfg.runs_per_point = 25;
    cfg.n_grid.clear();
    for (long long n = 250; n <= 3000; n += 250) cfg.n_grid.push_back(n);
    return cfg;
}

double run_timed(const CampaignConfig& cfg, std::string* points_csv) {
    const auto t0 = clock_type::now();
    const CampaignResult result = run_campaign(cfg);
    const auto t1 = clock_type::now();
    *points_csv = fig1_points_csv(result);
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
#ifdef QPT_HAVE_OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both paths run serially\n");
#endif

    CampaignConfig cfg = bench_config();

    cfg.parallel = false;
    std::string serial_csv;
    const double t_serial = run_timed(cfg, &serial_csv);
    std::printf("serial   : %8.2f s\n", t_serial);

    cfg.parallel = true;
    std::string parallel_csv;
    const double t_parallel = run_timed(cfg, &parallel_csv);
    std::printf("parallel : %8.2f s  (speedup %.2fx)\n", t_parallel, t_serial / t_parallel);

    if (serial_csv != parallel_csv) {
        std::printf("MISMATCH: serial and parallel campaigns disagree\n");
        return 1;
    }
    std::printf("outputs identical across both paths\n");
    return 0;
}
