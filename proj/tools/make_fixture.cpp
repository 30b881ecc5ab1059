// Writes the bundled synthetic fixture bars.

#include <fstream>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "fbns/market_data.hpp"
#include "fbns/synthetic.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixture OUTPUT_DIR\n";
        return 1;
    }
    const std::string dir = argv[1];
    const auto cfg = fbns::bundled_fixture_config();
    const auto bars = fbns::generate_bars(cfg);
    std::ofstream out(dir + "/bars.csv");
    fbns::write_bars(out, bars);
    if (!out) {
        std::cerr << "cannot write " << dir << "/bars.csv\n";
        return 1;
    }
    std::cout << fmt::format("wrote {} bars with {} planted drops\n", bars.size(), cfg.drops.size());
    return 0;
}
