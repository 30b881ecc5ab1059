#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fbns/market_data.hpp"

namespace fbns {

/// A bar whose fuzzy price falls by drop_pct percent from the previous bar.
struct PlantedDrop {
    std::size_t index = 1;
    double drop_pct = 0.2;
};

/// Bounded random-walk bars. Outside planted drops every bar-to-bar move of the
/// fuzzy-price expectation stays below 2 * (max_step_pct + max_spread_pct) percent,
/// so thresholds above that bound detect exactly the planted drops.
struct SyntheticBarConfig {
    Timestamp start{};              ///< first bar
    std::size_t n_bars = 1000;
    int bar_minutes = 5;
    double start_price = 27000.0;
    double max_step_pct = 0.005;    ///< per-bar close move bound
    double max_spread_pct = 0.002;  ///< high/low distance from the open/close range
    /// Skip local times in (17:00, 18:00], a daily maintenance break.
    bool session_break = false;
    std::vector<PlantedDrop> drops;
    std::uint64_t seed = 1;
};

/// Planted bars and their predecessors are flat (open = high = low = close), so
/// the expectation equals the price there for every risk attitude.
[[nodiscard]] std::vector<Bar> generate_bars(const SyntheticBarConfig& config);

/// Recipe of the bundled fixture: 3000 bars from 2020-10-01T18:05-04:00 with a
/// daily break and 0.2% drops, paired three bars apart on every other site.
[[nodiscard]] SyntheticBarConfig bundled_fixture_config();

}  // namespace fbns
