#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbns/market_data.hpp"

namespace fbns {

enum class JumpDirection {
    down,      ///< only falls count
    absolute,  ///< falls and rises
};

struct JumpEvent {
    std::size_t index = 0;  ///< bar index, >= 1
    Timestamp timestamp;
    double drop_pct = 0.0;  ///< size of the move in percent of the previous expectation

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// Events at k >= 1 where 100 (E_{k-1} - E_k) / E_{k-1} >= K (|.| >= K in absolute mode).
/// K is in percent and must be positive.
[[nodiscard]] std::vector<JumpEvent> detect_big_jumps(std::span<const double> expectations, double K,
                                                      JumpDirection direction = JumpDirection::down);
/// As above, with timestamps filled from the series.
[[nodiscard]] std::vector<JumpEvent> detect_big_jumps(const FuzzyBarSeries& series, double K,
                                                      JumpDirection direction = JumpDirection::down);

/// Closed bar-index interval [first, last].
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] bool contains(std::size_t i) const noexcept { return first <= i && i <= last; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SplitSpec {
    std::string name;
    IndexRange train;
    IndexRange test;

    /// Throws std::domain_error unless train.first <= train.last < test.first <= test.last < n_bars.
    void validate(std::size_t n_bars) const;
    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct JumpCountRow {
    double K = 0.0;
    std::size_t total = 0;
    /// One count per split, over the bars [train.first, test.last].
    std::vector<std::size_t> per_split;
};

struct JumpCountTable {
    std::vector<std::string> split_names;
    std::vector<JumpCountRow> rows;
};

[[nodiscard]] JumpCountTable jump_count_table(std::span<const double> expectations, std::span<const double> K_list,
                                              std::span<const SplitSpec> splits = {},
                                              JumpDirection direction = JumpDirection::down);
void write_jump_count_table(std::ostream& out, const JumpCountTable& table);

enum class WindowMode {
    stacked,  ///< non-overlapping windows
    sliding,  ///< stride 1
};

struct LabelingConfig {
    double K = 0.1;
    std::size_t window = 10;     ///< W
    std::size_t lookahead = 10;  ///< L
    std::size_t min_jumps = 2;
    WindowMode mode = WindowMode::stacked;
    JumpDirection direction = JumpDirection::down;

    void validate() const;
    friend bool operator==(const LabelingConfig&, const LabelingConfig&) = default;
};

/// Feature rows of W consecutive percent changes with binary labels.
struct WindowedDataset {
    LabelingConfig config;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_start;  ///< bar index of the first feature
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] std::size_t width() const noexcept { return config.window; }
    /// Bar index of the last feature of row r.
    [[nodiscard]] std::size_t row_end(std::size_t r) const noexcept { return row_start[r] + config.window - 1; }
    friend bool operator==(const WindowedDataset&, const WindowedDataset&) = default;
};

/// Row windows cover bar indices [start, start + W - 1] with start >= 1 (stacked: start = 1 + rW).
/// Label 1 iff the number of events in (row_end, row_end + L] is at least min_jumps.
/// Rows without a full lookahead are dropped. Requires n >= W + L + 1.
[[nodiscard]] WindowedDataset build_dataset(std::span<const double> expectations, const LabelingConfig& config);
[[nodiscard]] WindowedDataset build_dataset(const FuzzyBarSeries& series, const LabelingConfig& config);

/// Rows whose full window lies inside a range go to that side; straddling rows are dropped.
[[nodiscard]] std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& dataset,
                                                                const SplitSpec& spec);

/// Delimited text: row_start, f1..fW, label.
void write_dataset_csv(std::ostream& out, const WindowedDataset& dataset);
/// Inverse of write_dataset_csv; the config fields other than the window are taken from `config`.
[[nodiscard]] WindowedDataset read_dataset_csv(std::istream& in, const LabelingConfig& config);

}  // namespace fbns
