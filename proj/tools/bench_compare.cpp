// Times the parallel executor against the serial reference on the same
// scenario and checks that both produce identical BER records.

#include <chrono>
#include <cstdio>
#include <string>

#include "linksim/bench.hpp"

using namespace linksim;
using clock_t_ = std::chrono::steady_clock;

static double seconds_since(clock_t_::time_point t0)
{
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <scenario.json>\n", argv[0]);
        return 2;
    }
    try {
        auto s = bench::Scenario::load(argv[1]);

        auto t0 = clock_t_::now();
        auto serial = bench::run_scenario(s, /*parallel=*/false);
        const double t_serial = seconds_since(t0);

        t0 = clock_t_::now();
        auto parallel = bench::run_scenario(s, /*parallel=*/true);
        const double t_parallel = seconds_since(t0);

        bool identical = serial.records.size() == parallel.records.size();
        for (size_t i = 0; identical && i < serial.records.size(); ++i) {
            const auto& a = serial.records[i];
            const auto& b = parallel.records[i];
            identical = a.core_idx == b.core_idx && a.rop_dbm == b.rop_dbm &&
                        a.bit_errors == b.bit_errors && a.bits_compared == b.bits_compared;
        }

        std::printf("serial:   %.2f s\n", t_serial);
        std::printf("parallel: %.2f s  (%.2fx)\n", t_parallel,
                    t_parallel > 0 ? t_serial / t_parallel : 0.0);
        std::printf("records identical: %s\n", identical ? "yes" : "NO");
        return identical ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
