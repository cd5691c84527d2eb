#include <cstdio>
#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "levsim/sample_data.hpp"

// Writes the deterministic demo dataset (stocks.csv, bonds.csv, libor.csv)
// used by the README quick start and the test suite.
int main(int argc, char** argv) {
    CLI::App app{"generate the levsim demo dataset"};
    std::string dir = "data";
    std::uint64_t seed = levsim::kSampleSeed;
    app.add_option("-o,--out", dir, "output directory");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        levsim::write_sample_dataset(dir, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::printf("wrote stocks.csv, bonds.csv, libor.csv to %s\n", dir.c_str());
    return 0;
}
