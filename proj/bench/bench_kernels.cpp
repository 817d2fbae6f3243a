// Timing of the profile kernels (serial reference, OpenMP, streaming) and of
// the exhaustive extension search. Usage: cdlab_bench [N]
#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "cdlab/dimension/profile.hpp"
#include "cdlab/extractor/extractor.hpp"
#include "cdlab/generators/generators.hpp"

using namespace cdl;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::uint64_t N = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20'000;
    std::cout << "threads " << omp_get_max_threads() << "\n";

    gen::GeneratorSpec spec;
    spec.kind = gen::Kind::dilute;
    spec.alpha = Rational(1, 2);
    const auto S = PrefixOracle::of(gen::generate(spec, N));
    const ComplexityOracle oracle;
    const auto grid = dim::geometric_grid(1024, 1.3, N);
    const auto tail = dim::default_tail_start(N);

    dim::Profile serial, parallel, streaming;
    const double ts = seconds([&] { serial = dim::profile(S, grid, oracle, tail, dim::Kernel::serial); });
    const double tp = seconds([&] { parallel = dim::profile(S, grid, oracle, tail, dim::Kernel::parallel); });
    const double tr = seconds([&] { streaming = dim::profile(S, grid, oracle, tail, dim::Kernel::streaming); });
    std::cout << "profile N=" << N << " points=" << grid.size() << "\n"
              << "  serial    " << ts << " s\n"
              << "  parallel  " << tp << " s" << (parallel == serial ? "" : "  MISMATCH") << "\n"
              << "  streaming " << tr << " s" << (streaming == serial ? "" : "  MISMATCH") << "\n";

    // Three-block instance with no acceptable extension: every cap enumerates
    // its whole candidate space.
    const auto Z = PrefixOracle::of(BitSequence::from_string("010110"));
    ext::ExtractorParams p;
    p.d = Rational(1, 2);
    p.D = Rational(1);
    p.n0 = 1;
    ext::ExtractorState state;
    for (std::uint64_t cap : {8, 12, 16}) {
        ext::ExhaustiveResult r;
        const double t = seconds([&] { r = ext::exhaustive_extension(state, Z, p, oracle, cap); });
        std::cout << "exhaustive cap=" << cap << " tried=" << r.tried << " found=" << (r.found ? "yes" : "no") << " "
                  << t << " s\n";
    }
    return 0;
}
