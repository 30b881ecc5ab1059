#include "fbns/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

#include "fbns/rng.hpp"

namespace fbns {

std::vector<Bar> generate_bars(const SyntheticBarConfig& config) {
    if (config.n_bars < 2 || config.bar_minutes <= 0 || !(config.start_price > 0.0)) {
        throw std::domain_error("synthetic bars need n_bars >= 2, a positive bar length and price");
    }
    std::vector<double> drop_at(config.n_bars, 0.0);
    for (const auto& d : config.drops) {
        if (d.index == 0 || d.index >= config.n_bars || !(d.drop_pct > 0.0 && d.drop_pct < 100.0)) {
            throw std::domain_error("planted drop index or size out of range");
        }
        drop_at[d.index] = d.drop_pct;
    }

    RngStream rng(config.seed, 0);
    std::vector<Bar> bars;
    bars.reserve(config.n_bars);
    std::int64_t t = config.start.utc_minutes;
    double close = config.start_price;
    while (bars.size() < config.n_bars) {
        Bar bar;
        bar.timestamp = {t, config.start.offset_minutes};
        t += config.bar_minutes;
        if (config.session_break) {
            const std::int64_t local = bar.timestamp.local_minutes();
            const std::int64_t tod = ((local % 1440) + 1440) % 1440;
            if (tod > 17 * 60 && tod <= 18 * 60) {
                continue;
            }
        }
        const std::size_t k = bars.size();
        const bool flat = drop_at[k] > 0.0 || (k + 1 < config.n_bars && drop_at[k + 1] > 0.0);
        const double open = close;
        if (drop_at[k] > 0.0) {
            close = open * (1.0 - drop_at[k] / 100.0);
        } else if (k > 0) {
            close = open * (1.0 + config.max_step_pct / 100.0 * (2.0 * rng.uniform() - 1.0));
        }
        if (flat) {
            bar.open = bar.high = bar.low = bar.close = close;
        } else {
            bar.open = open;
            bar.close = close;
            const double scale = config.max_spread_pct / 100.0;
            bar.high = std::max(open, close) * (1.0 + scale * rng.uniform());
            bar.low = std::min(open, close) * (1.0 - scale * rng.uniform());
        }
        bar.volume = static_cast<double>(100 + rng.below(900));
        bars.push_back(bar);
    }
    return bars;
}

SyntheticBarConfig bundled_fixture_config() {
    SyntheticBarConfig cfg;
    cfg.start = *parse_timestamp("2020-10-01T18:05-04:00");
    cfg.n_bars = 3000;
    cfg.session_break = true;
    cfg.seed = 20201001;
    // Pairs land in one lookahead span; singles do not.
    for (std::size_t k = 25; k + 10 < cfg.n_bars; k += 70) {
        cfg.drops.push_back({k, 0.2});
        if ((k / 70) % 2 == 0) {
            cfg.drops.push_back({k + 3, 0.2});
        }
    }
    return cfg;
}

}  // namespace fbns
