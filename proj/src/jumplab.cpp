#include "fbns/jumplab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace fbns {

namespace {

double pct_change(double prev, double cur) { return 100.0 * (cur - prev) / prev; }

}  // namespace

std::vector<JumpEvent> detect_big_jumps(std::span<const double> expectations, double K, JumpDirection direction) {
    if (!(K > 0.0) || !std::isfinite(K)) {
        throw std::domain_error("jump threshold K must be positive");
    }
    std::vector<JumpEvent> events;
    for (std::size_t k = 1; k < expectations.size(); ++k) {
        const double drop = 100.0 * (expectations[k - 1] - expectations[k]) / expectations[k - 1];
        const double size = direction == JumpDirection::down ? drop : std::abs(drop);
        if (size >= K) {
            events.push_back({k, {}, size});
        }
    }
    return events;
}

std::vector<JumpEvent> detect_big_jumps(const FuzzyBarSeries& series, double K, JumpDirection direction) {
    auto events = detect_big_jumps(series.expectations, K, direction);
    for (auto& e : events) {
        e.timestamp = series.bars[e.index].timestamp;
    }
    return events;
}

void SplitSpec::validate(std::size_t n_bars) const {
    if (train.first > train.last || test.first > test.last) {
        throw std::domain_error(fmt::format("split '{}': empty or reversed index range", name));
    }
    if (train.last >= test.first && test.last >= train.first) {
        throw std::domain_error(fmt::format("split '{}': train and test ranges overlap", name));
    }
    if (train.last >= test.first) {
        throw std::domain_error(fmt::format("split '{}': test range must follow the train range", name));
    }
    if (test.last >= n_bars) {
        throw std::domain_error(
            fmt::format("split '{}': index {} outside the series of {} bars", name, test.last, n_bars));
    }
}

JumpCountTable jump_count_table(std::span<const double> expectations, std::span<const double> K_list,
                                std::span<const SplitSpec> splits, JumpDirection direction) {
    JumpCountTable table;
    for (const auto& s : splits) {
        s.validate(expectations.size());
        table.split_names.push_back(s.name);
    }
    for (double K : K_list) {
        const auto events = detect_big_jumps(expectations, K, direction);
        JumpCountRow row{K, events.size(), {}};
        for (const auto& s : splits) {
            const IndexRange span{s.train.first, s.test.last};
            row.per_split.push_back(static_cast<std::size_t>(
                std::count_if(events.begin(), events.end(), [&](const JumpEvent& e) { return span.contains(e.index); })));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_jump_count_table(std::ostream& out, const JumpCountTable& table) {
    out << "K,jump_number";
    for (const auto& name : table.split_names) {
        out << ",jump_number_" << name;
    }
    out << '\n';
    for (const auto& row : table.rows) {
        out << format_double(row.K) << ',' << row.total;
        for (auto c : row.per_split) {
            out << ',' << c;
        }
        out << '\n';
    }
}

void LabelingConfig::validate() const {
    if (!(K > 0.0) || !std::isfinite(K)) {
        throw std::domain_error("labeling threshold K must be positive");
    }
    if (window == 0 || lookahead == 0 || min_jumps == 0) {
        throw std::domain_error("window, lookahead and min_jumps must be positive");
    }
}

WindowedDataset build_dataset(std::span<const double> expectations, const LabelingConfig& config) {
    config.validate();
    const std::size_t n = expectations.size();
    const std::size_t W = config.window;
    const std::size_t L = config.lookahead;
    if (n < W + L + 1) {
        throw std::domain_error(fmt::format("series of {} bars is too short for W={} and L={}", n, W, L));
    }
    // prefix[k] = number of events at indices < k
    std::vector<std::size_t> prefix(n + 1, 0);
    for (const auto& e : detect_big_jumps(expectations, config.K, config.direction)) {
        prefix[e.index + 1] = 1;
    }
    for (std::size_t k = 1; k <= n; ++k) {
        prefix[k] += prefix[k - 1];
    }

    WindowedDataset ds;
    ds.config = config;
    const std::size_t stride = config.mode == WindowMode::stacked ? W : 1;
    for (std::size_t start = 1; start + W - 1 + L <= n - 1; start += stride) {
        const std::size_t end = start + W - 1;
        std::vector<double> row(W);
        for (std::size_t j = 0; j < W; ++j) {
            row[j] = pct_change(expectations[start + j - 1], expectations[start + j]);
            if (!std::isfinite(row[j])) {
                throw std::domain_error(fmt::format("non-finite percent change at bar {}", start + j));
            }
        }
        const std::size_t jumps = prefix[end + L + 1] - prefix[end + 1];
        ds.rows.push_back(std::move(row));
        ds.row_start.push_back(start);
        ds.labels.push_back(jumps >= config.min_jumps ? 1 : 0);
    }
    return ds;
}

WindowedDataset build_dataset(const FuzzyBarSeries& series, const LabelingConfig& config) {
    return build_dataset(series.expectations, config);
}

std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& dataset, const SplitSpec& spec) {
    if (spec.train.first > spec.train.last || spec.test.first > spec.test.last) {
        throw std::domain_error(fmt::format("split '{}': empty or reversed index range", spec.name));
    }
    if (spec.train.last >= spec.test.first) {
        throw std::domain_error(fmt::format("split '{}': train and test ranges overlap or are reversed", spec.name));
    }
    std::pair<WindowedDataset, WindowedDataset> out;
    out.first.config = dataset.config;
    out.second.config = dataset.config;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const std::size_t a = dataset.row_start[r];
        const std::size_t b = dataset.row_end(r);
        WindowedDataset* side = nullptr;
        if (spec.train.contains(a) && spec.train.contains(b)) {
            side = &out.first;
        } else if (spec.test.contains(a) && spec.test.contains(b)) {
            side = &out.second;
        }
        if (side) {
            side->rows.push_back(dataset.rows[r]);
            side->row_start.push_back(a);
            side->labels.push_back(dataset.labels[r]);
        }
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const WindowedDataset& dataset) {
    out << "row_start";
    for (std::size_t j = 1; j <= dataset.width(); ++j) {
        out << ",f" << j;
    }
    out << ",label\n";
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        out << dataset.row_start[r];
        for (double v : dataset.rows[r]) {
            out << ',' << format_double(v);
        }
        out << ',' << dataset.labels[r] << '\n';
    }
}

WindowedDataset read_dataset_csv(std::istream& in, const LabelingConfig& config) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing dataset header");
    }
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 3) {
        throw ParseError(1, "dataset header needs row_start, features and label");
    }
    WindowedDataset ds;
    ds.config = config;
    ds.config.window = columns - 2;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> values;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            double v;
            const auto r = std::from_chars(p, end, v);
            if (r.ec != std::errc{}) {
                throw ParseError(line_no, "malformed number");
            }
            values.push_back(v);
            p = r.ptr;
            if (p == end) {
                break;
            }
            if (*p != ',') {
                throw ParseError(line_no, "unexpected character");
            }
            ++p;
        }
        if (values.size() != columns) {
            throw ParseError(line_no, fmt::format("expected {} fields, found {}", columns, values.size()));
        }
        const double label = values.back();
        if (label != 0.0 && label != 1.0) {
            throw ValidationError(line_no, "label must be 0 or 1");
        }
        ds.row_start.push_back(static_cast<std::size_t>(values.front()));
        ds.labels.push_back(static_cast<int>(label));
        ds.rows.emplace_back(values.begin() + 1, values.end() - 1);
    }
    return ds;
}

}  // namespace fbns
