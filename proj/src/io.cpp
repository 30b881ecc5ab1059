#include "fbns/io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace fbns {

namespace {

template <typename E, std::size_t N>
using Names = std::array<std::pair<E, std::string_view>, N>;

template <typename E, std::size_t N>
std::string_view name_of(const Names<E, N>& names, E e) {
    for (const auto& [v, n] : names) {
        if (v == e) {
            return n;
        }
    }
    return "?";
}

template <typename E, std::size_t N>
E value_of(const Names<E, N>& names, std::string_view s, std::string_view what) {
    for (const auto& [v, n] : names) {
        if (n == s) {
            return v;
        }
    }
    std::string allowed;
    for (const auto& [v, n] : names) {
        allowed += (allowed.empty() ? "" : ", ") + std::string(n);
    }
    throw std::domain_error(fmt::format("unknown {} '{}' (expected one of: {})", what, s, allowed));
}

constexpr Names<ModelVariant, 3> variant_names{{{ModelVariant::classic, "classic"},
                                                {ModelVariant::fuzzy, "fuzzy"},
                                                {ModelVariant::generalized, "generalized"}}};
constexpr Names<VarianceDriver, 2> driver_names{
    {{VarianceDriver::convex_combination, "convex_combination"}, {VarianceDriver::superposition, "superposition"}}};
constexpr Names<JumpSharing, 2> sharing_names{{{JumpSharing::shared, "shared"},
                                               {JumpSharing::independent, "independent"}}};
constexpr Names<JumpFunctional, 2> functional_names{
    {{JumpFunctional::squared_sizes, "squared_sizes"}, {JumpFunctional::count, "count"}}};
constexpr Names<CorrelationMethod, 4> method_names{{{CorrelationMethod::formula_classic, "formula_classic"},
                                                    {CorrelationMethod::formula_fuzzy, "formula_fuzzy"},
                                                    {CorrelationMethod::formula_generalized, "formula_generalized"},
                                                    {CorrelationMethod::monte_carlo, "monte_carlo"}}};
constexpr Names<WindowMode, 2> window_names{{{WindowMode::stacked, "stacked"}, {WindowMode::sliding, "sliding"}}};
constexpr Names<JumpDirection, 2> direction_names{
    {{JumpDirection::down, "down"}, {JumpDirection::absolute, "absolute"}}};
constexpr Names<Activation, 2> activation_names{
    {{Activation::logistic, "logistic"}, {Activation::rectifier, "rectifier"}}};
constexpr Names<ClassWeighting, 2> weighting_names{
    {{ClassWeighting::none, "none"}, {ClassWeighting::balanced, "balanced"}}};
constexpr Names<ThetaRule, 2> rule_names{
    {{ThetaRule::f1_comparison, "f1_comparison"}, {ThetaRule::majority_class, "majority_class"}}};

// Reads j[key] into out when present, reporting type errors with the key name.
template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
    if (!j.is_object()) {
        throw std::domain_error(fmt::format("expected an object around '{}'", key));
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        return;
    }
    try {
        out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::domain_error(fmt::format("'{}' has the wrong type", key));
    }
}

template <typename T>
T read_req(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw std::domain_error(fmt::format("missing key '{}'", key));
    }
    T out{};
    read_opt(j, key, out);
    return out;
}

template <typename E, std::size_t N>
void read_enum(const Json& j, const char* key, const Names<E, N>& names, E& out) {
    std::string s;
    read_opt(j, key, s);
    if (!s.empty()) {
        out = value_of(names, s, key);
    }
}

IndexRange range_from_json(const Json& j, const char* key) {
    const auto v = read_req<std::vector<std::size_t>>(j, key);
    if (v.size() != 2) {
        throw std::domain_error(fmt::format("'{}' must be a [first, last] pair", key));
    }
    return {v[0], v[1]};
}

}  // namespace

Json to_json(const TriangularFuzzyNumber& a) { return Json::array({a.lower(), a.core(), a.upper()}); }

TriangularFuzzyNumber tfn_from_json(const Json& j) {
    if (j.is_number()) {
        return TriangularFuzzyNumber::crisp(j.get<double>());
    }
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
        throw std::domain_error("fuzzy number must be a number or an [l, m, u] triple");
    }
    return TriangularFuzzyNumber(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json to_json(const JumpPath& path) {
    Json marks = Json::array();
    for (const auto& m : path.marks) {
        marks.push_back(to_json(m));
    }
    return Json{{"times", path.times}, {"marks", marks}, {"lambda", path.lambda}, {"horizon", path.horizon}};
}

JumpPath jump_path_from_json(const Json& j) {
    JumpPath p;
    p.times = read_req<std::vector<double>>(j, "times");
    const Json& marks = j.at("marks");
    for (const auto& m : marks) {
        p.marks.push_back(tfn_from_json(m));
    }
    if (p.marks.size() != p.times.size()) {
        throw std::domain_error("jump path: times and marks differ in length");
    }
    p.lambda = read_req<double>(j, "lambda");
    p.horizon = read_req<double>(j, "horizon");
    return p;
}

Json to_json(const ThetaSchedule& theta) {
    if (theta.is_constant() && std::isinf(theta.end())) {
        return theta.step_list().front().value;
    }
    Json steps = Json::array();
    for (const auto& s : theta.step_list()) {
        steps.push_back({s.start, s.value});
    }
    Json j{{"steps", steps}};
    if (std::isfinite(theta.end())) {
        j["end"] = theta.end();
    }
    return j;
}

ThetaSchedule theta_from_json(const Json& j) {
    if (j.is_number()) {
        return ThetaSchedule::constant(j.get<double>());
    }
    if (j.is_object() && j.contains("alternating")) {
        const Json& a = j["alternating"];
        return ThetaSchedule::alternating(read_req<double>(a, "period"), read_req<double>(a, "first"),
                                          read_req<double>(a, "end"));
    }
    if (j.is_object() && j.contains("steps")) {
        std::vector<ThetaSchedule::Step> steps;
        for (const auto& s : j["steps"]) {
            if (!s.is_array() || s.size() != 2) {
                throw std::domain_error("theta steps must be [start, value] pairs");
            }
            steps.push_back({s[0].get<double>(), s[1].get<double>()});
        }
        double end = std::numeric_limits<double>::infinity();
        read_opt(j, "end", end);
        return ThetaSchedule::steps(std::move(steps), end);
    }
    throw std::domain_error("theta must be a number, {\"steps\": ...} or {\"alternating\": ...}");
}

Json to_json(const SubordinatorSpec& spec) {
    Json j{{"a", spec.jump_rate}, {"b", spec.jump_mean_inv}, {"c", spec.intensity_factor}};
    if (spec.no_jumps) {
        j["no_jumps"] = true;
    }
    return j;
}

SubordinatorSpec subordinator_from_json(const Json& j) {
    SubordinatorSpec s;
    read_opt(j, "a", s.jump_rate);
    read_opt(j, "b", s.jump_mean_inv);
    read_opt(j, "c", s.intensity_factor);
    read_opt(j, "no_jumps", s.no_jumps);
    return s;
}

Json to_json(const ModelParams& p) {
    return Json{{"mu", p.mu},
                {"beta", p.beta},
                {"rho", p.rho},
                {"lambda", p.lambda},
                {"sigma0_sq", to_json(p.sigma0_sq)},
                {"rho_prime", p.rho_prime},
                {"theta", to_json(p.theta)},
                {"spec", to_json(p.spec)},
                {"spec_b", to_json(p.spec_b)},
                {"fuzz_spread", p.fuzz_spread},
                {"driver", name_of(driver_names, p.driver)},
                {"sharing", name_of(sharing_names, p.sharing)}};
}

ModelParams model_params_from_json(const Json& j) {
    ModelParams p;
    read_opt(j, "mu", p.mu);
    read_opt(j, "beta", p.beta);
    read_opt(j, "rho", p.rho);
    read_opt(j, "lambda", p.lambda);
    if (j.contains("sigma0_sq")) {
        p.sigma0_sq = tfn_from_json(j["sigma0_sq"]);
    }
    read_opt(j, "rho_prime", p.rho_prime);
    if (j.contains("theta")) {
        p.theta = theta_from_json(j["theta"]);
    }
    if (j.contains("spec")) {
        p.spec = subordinator_from_json(j["spec"]);
    }
    if (j.contains("spec_b")) {
        p.spec_b = subordinator_from_json(j["spec_b"]);
    }
    read_opt(j, "fuzz_spread", p.fuzz_spread);
    read_enum(j, "driver", driver_names, p.driver);
    read_enum(j, "sharing", sharing_names, p.sharing);
    return p;
}

std::string_view to_string(ModelVariant v) { return name_of(variant_names, v); }
ModelVariant model_variant_from_string(std::string_view s) { return value_of(variant_names, s, "model variant"); }
std::string_view to_string(JumpFunctional f) { return name_of(functional_names, f); }
JumpFunctional jump_functional_from_string(std::string_view s) {
    return value_of(functional_names, s, "jump functional");
}
std::string_view to_string(CorrelationMethod m) { return name_of(method_names, m); }

void write_path_csv(std::ostream& out, const FuzzySimulatedPath& path) {
    out << "t,x_l,x_m,x_u,sig2_l,sig2_m,sig2_u\n";
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        const auto& x = path.x[k];
        const auto& v = path.sigma_sq[k];
        out << format_double(path.t[k]) << ',' << format_double(x.lower()) << ',' << format_double(x.core()) << ','
            << format_double(x.upper()) << ',' << format_double(v.lower()) << ',' << format_double(v.core()) << ','
            << format_double(v.upper()) << '\n';
    }
}

Json to_json(const FuzzySimulatedPath& path) {
    Json x = Json::array();
    Json v = Json::array();
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        x.push_back(to_json(path.x[k]));
        v.push_back(to_json(path.sigma_sq[k]));
    }
    return {{"t", path.t},
            {"x", std::move(x)},
            {"sigma_sq", std::move(v)},
            {"return_jumps", to_json(path.return_jumps)},
            {"variance_jumps", to_json(path.variance_jumps)}};
}

FuzzySimulatedPath fuzzy_path_from_json(const Json& j) {
    FuzzySimulatedPath p;
    p.t = read_req<std::vector<double>>(j, "t");
    const auto x = read_req<std::vector<Json>>(j, "x");
    const auto v = read_req<std::vector<Json>>(j, "sigma_sq");
    if (x.size() != p.t.size() || v.size() != p.t.size()) {
        throw std::domain_error("path: t, x and sigma_sq differ in length");
    }
    for (std::size_t k = 0; k < p.t.size(); ++k) {
        p.x.push_back(tfn_from_json(x[k]));
        p.sigma_sq.push_back(tfn_from_json(v[k]));
    }
    p.return_jumps = jump_path_from_json(read_req<Json>(j, "return_jumps"));
    p.variance_jumps = jump_path_from_json(read_req<Json>(j, "variance_jumps"));
    return p;
}

Json to_json(const LabelingConfig& c) {
    return Json{{"K", c.K},
                {"window", c.window},
                {"lookahead", c.lookahead},
                {"min_jumps", c.min_jumps},
                {"mode", name_of(window_names, c.mode)},
                {"direction", name_of(direction_names, c.direction)}};
}

LabelingConfig labeling_from_json(const Json& j) {
    LabelingConfig c;
    read_opt(j, "K", c.K);
    read_opt(j, "window", c.window);
    read_opt(j, "lookahead", c.lookahead);
    read_opt(j, "min_jumps", c.min_jumps);
    read_enum(j, "mode", window_names, c.mode);
    read_enum(j, "direction", direction_names, c.direction);
    return c;
}

Json to_json(const SplitSpec& s) {
    return Json{{"name", s.name}, {"train", {s.train.first, s.train.last}}, {"test", {s.test.first, s.test.last}}};
}

SplitSpec split_from_json(const Json& j) {
    SplitSpec s;
    s.name = read_req<std::string>(j, "name");
    s.train = range_from_json(j, "train");
    s.test = range_from_json(j, "test");
    return s;
}

Json dataset_metadata(const WindowedDataset& ds, std::span<const SplitSpec> splits) {
    Json sp = Json::array();
    for (const auto& s : splits) {
        sp.push_back(to_json(s));
    }
    const auto ones = std::count(ds.labels.begin(), ds.labels.end(), 1);
    return Json{{"labeling", to_json(ds.config)},
                {"rows", ds.size()},
                {"label_counts", {ds.size() - static_cast<std::size_t>(ones), ones}},
                {"splits", sp}};
}

Json to_json(const NetConfig& c) {
    return Json{{"hidden_layers", c.hidden_layers},
                {"activation", name_of(activation_names, c.activation)},
                {"learning_rate", c.learning_rate},
                {"momentum", c.momentum},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"seed", c.seed},
                {"l2", c.l2},
                {"class_weighting", name_of(weighting_names, c.class_weighting)},
                {"threshold", c.threshold}};
}

NetConfig net_config_from_json(const Json& j) {
    NetConfig c;
    read_opt(j, "hidden_layers", c.hidden_layers);
    read_enum(j, "activation", activation_names, c.activation);
    read_opt(j, "learning_rate", c.learning_rate);
    read_opt(j, "momentum", c.momentum);
    read_opt(j, "epochs", c.epochs);
    read_opt(j, "batch_size", c.batch_size);
    read_opt(j, "seed", c.seed);
    read_opt(j, "l2", c.l2);
    read_enum(j, "class_weighting", weighting_names, c.class_weighting);
    read_opt(j, "threshold", c.threshold);
    return c;
}

Json to_json(const TrainedModel& m) {
    Json layers = Json::array();
    for (const auto& l : m.network.layers()) {
        layers.push_back(
            {{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"biases", l.biases}});
    }
    return Json{{"format_version", TrainedModel::format_version},
                {"config", to_json(m.config)},
                {"input_width", m.input_width},
                {"degenerate", m.degenerate},
                {"constant_class", m.constant_class},
                {"feature_norm",
                 {{"kept", m.norm.kept}, {"dropped", m.norm.dropped}, {"mean", m.norm.mean}, {"stdev", m.norm.stdev}}},
                {"layers", layers},
                {"loss_history", m.loss_history}};
}

TrainedModel trained_model_from_json(const Json& j) {
    const int version = read_req<int>(j, "format_version");
    if (version != TrainedModel::format_version) {
        throw std::domain_error(fmt::format("unsupported model format version {}", version));
    }
    TrainedModel m;
    m.config = net_config_from_json(j.at("config"));
    m.input_width = read_req<std::size_t>(j, "input_width");
    m.degenerate = read_req<bool>(j, "degenerate");
    m.constant_class = read_req<int>(j, "constant_class");
    const Json& fn = j.at("feature_norm");
    m.norm.kept = read_req<std::vector<std::size_t>>(fn, "kept");
    m.norm.dropped = read_req<std::vector<std::size_t>>(fn, "dropped");
    m.norm.mean = read_req<std::vector<double>>(fn, "mean");
    m.norm.stdev = read_req<std::vector<double>>(fn, "stdev");
    if (!m.degenerate) {
        m.network = Network(m.norm.kept.size(), m.config.hidden_layers, m.config.activation);
        const Json& layers = j.at("layers");
        if (layers.size() != m.network.layers().size()) {
            throw std::domain_error("model layer count does not match its config");
        }
        for (std::size_t i = 0; i < layers.size(); ++i) {
            auto& l = m.network.layers()[i];
            l.weights = read_req<std::vector<double>>(layers[i], "weights");
            l.biases = read_req<std::vector<double>>(layers[i], "biases");
            if (l.weights.size() != l.inputs * l.outputs || l.biases.size() != l.outputs) {
                throw std::domain_error("model layer shape mismatch");
            }
        }
    }
    m.loss_history = read_req<std::vector<double>>(j, "loss_history");
    return m;
}

Json to_json(const ClassificationReport& r) {
    Json classes = Json::array();
    for (const auto& c : r.classes) {
        classes.push_back({{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
    }
    return Json{{"classes", classes},
                {"accuracy", r.accuracy},
                {"confusion", {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}}}};
}

Json to_json(const ThetaEstimate& e) {
    return Json{{"theta", e.theta},
                {"rule", to_string(e.rule)},
                {"f1_class0", e.f1_class0},
                {"f1_class1", e.f1_class1},
                {"predicted_class0", e.predicted_class0},
                {"predicted_class1", e.predicted_class1}};
}

std::string_view to_string(ThetaRule r) { return name_of(rule_names, r); }
ThetaRule theta_rule_from_string(std::string_view s) { return value_of(rule_names, s, "theta rule"); }

Json to_json(const DescriptiveStats& s) {
    return Json{{"mean", s.mean},         {"median", s.median},     {"min", s.minimum},
                {"max", s.maximum},       {"skewness", s.skewness}, {"kurtosis", s.kurtosis}};
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    const auto tmp = std::filesystem::path(path).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace fbns
