#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fbns/bns.hpp"
#include "fbns/classifier.hpp"
#include "fbns/jumplab.hpp"
#include "fbns/market_data.hpp"

namespace fbns {

using Json = nlohmann::json;

// Readers throw std::domain_error naming the offending key.

[[nodiscard]] Json to_json(const TriangularFuzzyNumber& a);
[[nodiscard]] TriangularFuzzyNumber tfn_from_json(const Json& j);

[[nodiscard]] Json to_json(const JumpPath& path);
[[nodiscard]] JumpPath jump_path_from_json(const Json& j);

[[nodiscard]] Json to_json(const ThetaSchedule& theta);
/// A number, {"steps": [[start, value], ...], "end": T} or {"alternating": {"period", "first", "end"}}.
[[nodiscard]] ThetaSchedule theta_from_json(const Json& j);

[[nodiscard]] Json to_json(const SubordinatorSpec& spec);
[[nodiscard]] SubordinatorSpec subordinator_from_json(const Json& j);

/// Missing keys keep the ModelParams defaults.
[[nodiscard]] Json to_json(const ModelParams& params);
[[nodiscard]] ModelParams model_params_from_json(const Json& j);

[[nodiscard]] std::string_view to_string(ModelVariant v);
[[nodiscard]] ModelVariant model_variant_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(JumpFunctional f);
[[nodiscard]] JumpFunctional jump_functional_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(CorrelationMethod m);

/// Columns t,x_l,x_m,x_u,sig2_l,sig2_m,sig2_u.
void write_path_csv(std::ostream& out, const FuzzySimulatedPath& path);
/// Grid, fuzzy log-price and variance triples, and both jump drivers.
[[nodiscard]] Json to_json(const FuzzySimulatedPath& path);
[[nodiscard]] FuzzySimulatedPath fuzzy_path_from_json(const Json& j);

[[nodiscard]] Json to_json(const LabelingConfig& c);
[[nodiscard]] LabelingConfig labeling_from_json(const Json& j);
[[nodiscard]] Json to_json(const SplitSpec& s);
[[nodiscard]] SplitSpec split_from_json(const Json& j);
[[nodiscard]] Json dataset_metadata(const WindowedDataset& ds, std::span<const SplitSpec> splits);

[[nodiscard]] Json to_json(const NetConfig& c);
[[nodiscard]] NetConfig net_config_from_json(const Json& j);
[[nodiscard]] Json to_json(const TrainedModel& m);
/// Rejects an unknown format version.
[[nodiscard]] TrainedModel trained_model_from_json(const Json& j);

[[nodiscard]] Json to_json(const ClassificationReport& r);
[[nodiscard]] Json to_json(const ThetaEstimate& e);
[[nodiscard]] std::string_view to_string(ThetaRule r);
[[nodiscard]] ThetaRule theta_rule_from_string(std::string_view s);

[[nodiscard]] Json to_json(const DescriptiveStats& s);

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fbns
