#pragma once

// Command-line front end: describe, fit, score, sweep, synth.
//
// Settings are flat dotted keys. Precedence: built-in defaults, then the
// JSON object in --config, then `--<key> <value>` flags.
//
// Exit codes: 0 success, 2 input/schema/config, 3 no factor retained,
// 4 singular correlation, 5 composite definition or range error, 1 other.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "uselfa/composite.hpp"
#include "uselfa/datamodel.hpp"
#include "uselfa/engine.hpp"
#include "uselfa/errors.hpp"
#include "uselfa/report.hpp"
#include "uselfa/synth.hpp"

namespace uselfa::app {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "uselfa";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchema = 2,
  kRetention = 3,
  kSingular = 4,
  kCompositeOrRange = 5,
};

inline json default_settings() {
  json d;
  d["input"] = "";
  d["out"] = "out";
  d["ingest.missing_policy"] = "reject";
  d["engine.epsilon"] = 1e-5;
  d["engine.max_iterations"] = 200;
  d["engine.kaiser_threshold"] = 1.0;
  d["engine.ridge_fallback"] = false;
  d["engine.varimax_tolerance"] = 1e-8;
  d["engine.varimax_max_sweeps"] = 100;
  d["composite.definition"] = "";
  d["composite.binary"] = false;
  d["composite.balance_band"] = 0.1;
  d["composite.bias_band"] = 0.5;
  d["report.factor_labels"] = json::array();
  d["report.top_k"] = 10;
  d["score.alpha"] = 0.5;
  d["sweep.alpha_start"] = 0.0;
  d["sweep.alpha_stop"] = 1.0;
  d["sweep.alpha_step"] = 0.2;
  d["sweep.thetas"] = json::array({1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  d["sweep.top_n"] = 30;
  d["synth.seed"] = 42;
  d["synth.regions"] = 426;
  d["synth.loading"] = 0.8;
  d["synth.noise_std"] = 0.3;
  return d;
}

// Keys that only locate files and do not change any output byte.
inline bool is_location_key(const std::string& key) { return key == "out"; }

namespace detail {

inline bool same_kind(const json& def, const json& v) {
  if (def.is_number()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  return false;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.emplace_back(uselfa::detail::trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!uselfa::detail::trim(cur).empty() || !parts.empty()) parts.emplace_back(uselfa::detail::trim(cur));
  return parts;
}

// Interprets a command-line string using the type of the default value.
inline json parse_flag_value(const std::string& key, const json& def, const std::string& text) {
  if (def.is_boolean()) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("--" + key + ": expected a boolean, got '" + text + "'");
  }
  if (def.is_number()) {
    const auto v = uselfa::detail::parse_number(text);
    if (!v) throw ConfigError("--" + key + ": expected a number, got '" + text + "'");
    if (def.is_number_integer()) {
      if (*v != std::floor(*v)) throw ConfigError("--" + key + ": expected an integer, got '" + text + "'");
      return static_cast<std::int64_t>(*v);
    }
    return *v;
  }
  if (def.is_array()) {
    json arr = json::array();
    const bool numeric = key == "sweep.thetas";
    for (const auto& part : split_list(text)) {
      if (numeric) {
        const auto v = uselfa::detail::parse_number(part);
        if (!v) throw ConfigError("--" + key + ": '" + part + "' is not a number");
        arr.push_back(*v);
      } else {
        arr.push_back(part);
      }
    }
    return arr;
  }
  return text;
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 initialization failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  body(os);
  if (!os) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace detail

// Merges a JSON config object onto the defaults; unknown keys and mistyped
// values are errors.
inline void merge_settings(json& settings, const json& overrides, const std::string& origin) {
  if (!overrides.is_object()) throw ConfigError(origin + ": config must be a JSON object of flat dotted keys");
  for (const auto& [key, value] : overrides.items()) {
    if (!settings.contains(key)) throw ConfigError(origin + ": unknown setting '" + key + "'");
    if (!detail::same_kind(settings[key], value))
      throw ConfigError(origin + ": setting '" + key + "' has the wrong type");
    settings[key] = value;
  }
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

struct RunConfig {
  std::string input;
  std::string out = "out";
  IngestConfig ingest;
  EngineConfig engine;
  std::string composite_path;
  bool composite_binary = false;
  TypologyConfig typology;
  std::vector<std::string> factor_labels;
  std::size_t top_k = 10;
  double alpha = 0.5;
  std::vector<double> alphas;
  std::vector<double> thetas;
  std::size_t top_n = 30;
  SynthConfig synth;
  json snapshot;  // the merged flat settings
};

// Expands start/stop/step into an inclusive grid, rounding away
// accumulated binary error at 1e-12.
inline std::vector<double> alpha_grid(double start, double stop, double step) {
  if (!(step > 0)) throw GridError("alpha step must be positive");
  if (!(stop >= start)) throw GridError("alpha stop must not be below start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) {
    double a = start + static_cast<double>(k) * step;
    a = std::round(a * 1e12) / 1e12;
    grid.push_back(a);
  }
  for (double a : grid) check_alpha(a);
  return grid;
}

inline RunConfig make_run_config(const json& s) {
  RunConfig c;
  c.snapshot = s;
  c.input = s["input"].get<std::string>();
  c.out = s["out"].get<std::string>();
  c.ingest.missing = parse_missing_policy(s["ingest.missing_policy"].get<std::string>());
  c.engine.epsilon = s["engine.epsilon"].get<double>();
  c.engine.max_iterations = s["engine.max_iterations"].get<int>();
  c.engine.kaiser_threshold = s["engine.kaiser_threshold"].get<double>();
  c.engine.ridge_fallback = s["engine.ridge_fallback"].get<bool>();
  c.engine.varimax_tolerance = s["engine.varimax_tolerance"].get<double>();
  c.engine.varimax_max_sweeps = s["engine.varimax_max_sweeps"].get<int>();
  if (!(c.engine.epsilon > 0)) throw ConfigError("engine.epsilon must be positive");
  if (c.engine.max_iterations < 1) throw ConfigError("engine.max_iterations must be at least 1");
  if (c.engine.varimax_max_sweeps < 1) throw ConfigError("engine.varimax_max_sweeps must be at least 1");
  c.composite_path = s["composite.definition"].get<std::string>();
  c.composite_binary = s["composite.binary"].get<bool>();
  c.typology.balance_band = s["composite.balance_band"].get<double>();
  c.typology.bias_band = s["composite.bias_band"].get<double>();
  for (const auto& l : s["report.factor_labels"]) {
    if (!l.is_string()) throw ConfigError("report.factor_labels must be a list of strings");
    c.factor_labels.push_back(l.get<std::string>());
  }
  const auto top_k = s["report.top_k"].get<std::int64_t>();
  if (top_k < 1) throw KRangeError("report.top_k must be at least 1");
  c.top_k = static_cast<std::size_t>(top_k);
  c.alpha = s["score.alpha"].get<double>();
  c.alphas = alpha_grid(s["sweep.alpha_start"].get<double>(), s["sweep.alpha_stop"].get<double>(),
                        s["sweep.alpha_step"].get<double>());
  for (const auto& t : s["sweep.thetas"]) {
    if (!t.is_number()) throw ConfigError("sweep.thetas must be a list of numbers");
    c.thetas.push_back(t.get<double>());
  }
  if (c.thetas.empty()) throw GridError("sweep.thetas must not be empty");
  for (std::size_t i = 1; i < c.thetas.size(); ++i)
    if (!(c.thetas[i] > c.thetas[i - 1])) throw GridError("sweep.thetas must be strictly ascending");
  const auto top_n = s["sweep.top_n"].get<std::int64_t>();
  if (top_n < 1) throw KRangeError("sweep.top_n must be at least 1");
  c.top_n = static_cast<std::size_t>(top_n);
  const auto seed = s["synth.seed"].get<std::int64_t>();
  if (seed < 0) throw ConfigError("synth.seed must be non-negative");
  c.synth.seed = static_cast<std::uint64_t>(seed);
  const auto regions = s["synth.regions"].get<std::int64_t>();
  if (regions < 1) throw ConfigError("synth.regions must be positive");
  c.synth.regions = static_cast<std::size_t>(regions);
  c.synth.loading = s["synth.loading"].get<double>();
  c.synth.noise_std = s["synth.noise_std"].get<double>();
  return c;
}

// JSON form: {"factors": {"<label>": {"dimension": "suitability"|"attractiveness",
// "sign": 1|-1, "note": "..."}}}
inline CompositeDefinition parse_composite_definition(const json& j) {
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_object())
    throw IncompleteDefinitionError("composite definition needs a 'factors' object");
  CompositeDefinition def;
  for (const auto& [label, entry] : j["factors"].items()) {
    if (!entry.is_object() || !entry.contains("dimension") || !entry["dimension"].is_string())
      throw IncompleteDefinitionError("factor '" + label + "' needs a 'dimension'");
    CompositeEntry e;
    e.label = label;
    e.dimension = parse_dimension(entry["dimension"].get<std::string>());
    e.sign = 1;
    if (entry.contains("sign")) {
      if (!entry["sign"].is_number_integer()) throw IncompleteDefinitionError("factor '" + label + "': sign must be 1 or -1");
      e.sign = entry["sign"].get<int>();
    }
    if (entry.contains("note") && entry["note"].is_string()) e.note = entry["note"].get<std::string>();
    def.entries.push_back(std::move(e));
  }
  return def;
}

inline json composite_definition_json(const CompositeDefinition& def) {
  json factors = json::object();
  for (const auto& e : def.entries)
    factors[e.label] = json{{"dimension", to_string(e.dimension)}, {"sign", e.sign}, {"note", e.note}};
  return json{{"factors", factors}};
}

inline CompositeDefinition load_composite_definition(const RunConfig& c) {
  CompositeDefinition def;
  if (c.composite_path.empty()) {
    def = default_composite_definition();
  } else {
    std::ifstream in(c.composite_path);
    if (!in) throw ConfigError("cannot open composite definition '" + c.composite_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw IncompleteDefinitionError("composite definition '" + c.composite_path + "': " + e.what());
    }
    def = parse_composite_definition(j);
  }
  return c.composite_binary ? binary(std::move(def)) : def;
}

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const DegenerateDataError*>(&e) || dynamic_cast<const ZeroVarianceError*>(&e) ||
      dynamic_cast<const ConfigError*>(&e))
    return kSchema;
  if (dynamic_cast<const NoFactorRetainedError*>(&e)) return kRetention;
  if (dynamic_cast<const SingularCorrelationError*>(&e)) return kSingular;
  if (dynamic_cast<const IncompleteDefinitionError*>(&e) || dynamic_cast<const AlphaRangeError*>(&e) ||
      dynamic_cast<const KRangeError*>(&e) || dynamic_cast<const GridError*>(&e) ||
      dynamic_cast<const ZeroDenominatorError*>(&e) || dynamic_cast<const LookupError*>(&e))
    return kCompositeOrRange;
  return kFailure;
}

inline std::string error_name(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const DegenerateDataError*>(&e)) return "DegenerateDataError";
  if (dynamic_cast<const ZeroVarianceError*>(&e)) return "ZeroVarianceError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const NoFactorRetainedError*>(&e)) return "NoFactorRetainedError";
  if (dynamic_cast<const SingularCorrelationError*>(&e)) return "SingularCorrelationError";
  if (dynamic_cast<const IncompleteDefinitionError*>(&e)) return "IncompleteDefinitionError";
  if (dynamic_cast<const AlphaRangeError*>(&e)) return "AlphaRangeError";
  if (dynamic_cast<const KRangeError*>(&e)) return "KRangeError";
  if (dynamic_cast<const GridError*>(&e)) return "GridError";
  if (dynamic_cast<const ZeroDenominatorError*>(&e)) return "ZeroDenominatorError";
  if (dynamic_cast<const LookupError*>(&e)) return "LookupError";
  if (dynamic_cast<const DimensionMismatchError*>(&e)) return "DimensionMismatchError";
  return "Error";
}

// One subcommand invocation. Holds the diagnostics sink and the warning
// list that ends up in the manifest.
class Session {
 public:
  Session(RunConfig config, std::string command, std::ostream& out, std::ostream& err, bool quiet)
      : config_(std::move(config)), command_(std::move(command)), out_(out), err_(err), quiet_(quiet) {}

  int describe() {
    const auto table = load();
    const auto stats = uselfa::describe(table);
    for (const auto& w : stats.warnings) warn(w);
    prepare_out();
    detail::write_file(path("stats.csv"), [&](std::ostream& os) { write_stats_csv(os, stats); });
    info("N=" + std::to_string(table.num_attributes()) + " R=" + std::to_string(table.num_regions()));
    return kOk;
  }

  int fit() {
    const auto result = run_fit();
    write_fit_artifacts(result);
    write_manifest(&result, {});
    info("M=" + std::to_string(result.model.num_factors()) + " iterations=" +
         std::to_string(result.model.iterations_used) + (result.model.converged ? " converged" : " not-converged"));
    return kOk;
  }

  int score() {
    check_alpha(config_.alpha);
    const auto result = run_fit();
    const auto def = load_composite_definition(config_);
    const auto cs = composite_scores(result.scores, def);
    const Vector v = v_scores(cs, config_.alpha);
    const auto q = quadrant_classify(cs, config_.typology);
    const std::size_t k = std::min(config_.top_k, cs.size());
    const auto top_s = top_k(cs, k, RankKey::Suitability);
    const auto top_a = top_k(cs, k, RankKey::Attractiveness);
    const auto top_v = top_k(cs, k, RankKey::VScore, config_.alpha);
    std::vector<std::string> focus;
    std::set<std::string> seen;
    for (const auto* list : {&top_s, &top_a})
      for (const auto& r : *list)
        if (seen.insert(r.region_id).second) focus.push_back(r.region_id);
    std::vector<Contribution> contributions;
    for (const auto& id : focus) {
      try {
        auto one = factor_contributions(result.scores, def, {id});
        contributions.push_back(std::move(one.front()));
      } catch (const ZeroDenominatorError& e) {
        warn(e.what());
      }
    }

    prepare_out();
    detail::write_file(path("scores.csv"), [&](std::ostream& os) { write_scores_csv(os, result.scores, cs, v, q); });
    detail::write_file(path("ranking.csv"), [&](std::ostream& os) {
      write_ranking_csv(os, {{"suitability", top_s}, {"attractiveness", top_a}, {"v_score@" + grid_label(config_.alpha), top_v}});
    });
    detail::write_file(path("contributions.csv"),
                       [&](std::ostream& os) { write_contributions_csv(os, result.scores.labels, contributions); });
    json extra;
    extra["alpha"] = config_.alpha;
    extra["median_suitability"] = q.median_suitability;
    extra["median_attractiveness"] = q.median_attractiveness;
    extra["composite_definition"] = composite_definition_json(def);
    write_manifest(&result, extra);
    info("R=" + std::to_string(cs.size()) + " alpha=" + grid_label(config_.alpha));
    return kOk;
  }

  int sweep() {
    const auto result = run_fit();
    const auto def = load_composite_definition(config_);
    const auto cs = composite_scores(result.scores, def);
    const auto grid = uselfa::sweep(cs, config_.alphas, config_.thetas);
    const std::size_t n = std::min(config_.top_n, cs.size());
    std::vector<RankingBlock> blocks;
    for (double a : config_.alphas) blocks.push_back({"v_score@" + grid_label(a), top_k(cs, n, RankKey::VScore, a)});

    prepare_out();
    detail::write_file(path("sweep_wide.csv"), [&](std::ostream& os) { write_sweep_wide_csv(os, grid); });
    detail::write_file(path("sweep_long.csv"), [&](std::ostream& os) { write_sweep_long_csv(os, grid); });
    detail::write_file(path("top_regions.csv"), [&](std::ostream& os) { write_ranking_csv(os, blocks); });
    json extra;
    extra["composite_definition"] = composite_definition_json(def);
    write_manifest(&result, extra);
    info("grid=" + std::to_string(grid.thetas.size()) + "x" + std::to_string(grid.alphas.size()) +
         " R=" + std::to_string(grid.regions));
    return kOk;
  }

  int synth() {
    const auto data = generate_seoul_like(config_.synth);
    prepare_out();
    detail::write_file(path("synthetic.csv"), [&](std::ostream& os) {
      write_table_csv(os, data.table, config_.synth.decimals, data.header_comments);
    });
    detail::write_file(path("planted_loadings.csv"), [&](std::ostream& os) {
      os << "attribute";
      for (Eigen::Index m = 0; m < data.expected_loadings.cols(); ++m) os << ",planted_" << m + 1;
      os << '\n';
      for (Eigen::Index i = 0; i < data.expected_loadings.rows(); ++i) {
        os << data.table.attribute_names[static_cast<std::size_t>(i)];
        for (Eigen::Index m = 0; m < data.expected_loadings.cols(); ++m) os << ',' << fixed(data.expected_loadings(i, m));
        os << '\n';
      }
    });
    info("wrote " + path("synthetic.csv").string() + " N=" + std::to_string(data.table.num_attributes()) +
         " R=" + std::to_string(data.table.num_regions()));
    return kOk;
  }

 private:
  AttributeTable load() {
    if (config_.input.empty()) throw ConfigError("no input file given (use --input)");
    auto table = load_table(config_.input, config_.ingest);
    if (!table.provenance.empty())
      warn(std::to_string(table.provenance.size()) + " missing-value interventions (" + to_string(config_.ingest.missing) + ")");
    prepare_out();
    detail::write_file(path("provenance.log"), [&](std::ostream& os) { write_provenance(os, table); });
    digest_ = detail::sha256_file(config_.input);
    return table;
  }

  FitResult run_fit() {
    const auto table = load();
    auto result = uselfa::fit(table, config_.engine);
    if (!config_.factor_labels.empty()) {
      if (static_cast<Eigen::Index>(config_.factor_labels.size()) != result.model.num_factors())
        throw IncompleteDefinitionError("report.factor_labels has " + std::to_string(config_.factor_labels.size()) +
                                        " labels but " + std::to_string(result.model.num_factors()) +
                                        " factors were retained");
      std::set<std::string> unique(config_.factor_labels.begin(), config_.factor_labels.end());
      if (unique.size() != config_.factor_labels.size())
        throw IncompleteDefinitionError("report.factor_labels contains duplicates");
      result.model.labels = config_.factor_labels;
      result.scores.labels = config_.factor_labels;
    }
    for (const auto& w : result.model.warnings) warn(w);
    return result;
  }

  void write_fit_artifacts(const FitResult& r) {
    prepare_out();
    detail::write_file(path("loadings.csv"), [&](std::ostream& os) { write_loadings_csv(os, r.model, r.dominant); });
    detail::write_file(path("eigenvalues.csv"), [&](std::ostream& os) { write_eigenvalues_csv(os, r.model); });
    detail::write_file(path("weights.csv"), [&](std::ostream& os) { write_weights_csv(os, r.model); });
  }

  void write_manifest(const FitResult* r, const json& extra) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kVersion;
    m["command"] = command_;
    json cfg = json::object();
    for (const auto& [k, v] : config_.snapshot.items())
      if (!is_location_key(k)) cfg[k] = v;
    m["config"] = cfg;
    m["input_sha256"] = digest_;
    if (r) {
      m["factors"] = r->model.num_factors();
      m["factor_labels"] = r->model.labels;
      m["converged"] = r->model.converged;
      m["iterations_used"] = r->model.iterations_used;
      m["varimax_sweeps"] = r->model.varimax_sweeps;
      m["factor_count_rule"] = "kaiser on first-iteration adjusted correlation eigenvalues";
      m["eigenvalues"] = std::vector<double>(r->model.eigenvalues.begin(), r->model.eigenvalues.end());
      m["final_eigenvalues"] =
          std::vector<double>(r->model.final_eigenvalues.begin(), r->model.final_eigenvalues.end());
      m["communalities"] =
          std::vector<double>(r->model.communalities.values.begin(), r->model.communalities.values.end());
    }
    for (const auto& [k, v] : extra.items()) m[k] = v;
    m["warnings"] = warnings_;
    detail::write_file(path("manifest.json"), [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  }

  void prepare_out() {
    std::error_code ec;
    std::filesystem::create_directories(config_.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + config_.out + "': " + ec.message());
  }

  std::filesystem::path path(const std::string& name) const { return std::filesystem::path(config_.out) / name; }

  void warn(const std::string& w) {
    warnings_.push_back(w);
    err_ << "warning: " << w << '\n';
  }

  void info(const std::string& line) {
    if (!quiet_) out_ << line << '\n';
  }

  RunConfig config_;
  std::string command_;
  std::ostream& out_;
  std::ostream& err_;
  bool quiet_;
  std::string digest_;
  std::vector<std::string> warnings_;
};

// Entry point shared by the executable and the tests. args excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent-factor urban site evaluation toolkit", kToolName};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  const json defaults = default_settings();
  std::string config_path;
  bool quiet = false;
  std::map<std::string, std::string> flag_values;
  app.add_option("--config", config_path, "JSON file of flat dotted settings");
  app.add_flag("--quiet", quiet, "suppress summary lines on stdout");
  for (const auto& [key, value] : defaults.items()) {
    const std::string desc = key == "input" ? "input CSV (region_id + one column per attribute)"
                             : key == "out" ? "output directory"
                                            : "setting (default " + value.dump() + ")";
    app.add_option("--" + key, flag_values[key], desc)->group(key == "input" || key == "out" ? "Options" : "Settings");
  }

  auto* describe_cmd = app.add_subcommand("describe", "descriptive statistics of the raw attributes");
  auto* fit_cmd = app.add_subcommand("fit", "extract, rotate and score latent factors");
  auto* score_cmd = app.add_subcommand("score", "composite scores, v-scores and quadrant typology");
  std::string alpha_text;
  score_cmd->add_option("--alpha", alpha_text, "suitability weight in [0, 1]");
  auto* sweep_cmd = app.add_subcommand("sweep", "region counts over the (alpha, theta) grid");
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic planted-factor dataset");
  std::string seed_text;
  synth_cmd->add_option("--seed", seed_text, "random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kSchema;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    json settings = defaults;
    if (!config_path.empty()) merge_settings(settings, load_config_file(config_path), config_path);
    for (const auto& [key, text] : flag_values) {
      if (app.get_option("--" + key)->count() == 0) continue;
      settings[key] = detail::parse_flag_value(key, defaults[key], text);
    }
    if (score_cmd->get_option("--alpha")->count() > 0)
      settings["score.alpha"] = detail::parse_flag_value("alpha", defaults["score.alpha"], alpha_text);
    if (synth_cmd->get_option("--seed")->count() > 0)
      settings["synth.seed"] = detail::parse_flag_value("seed", defaults["synth.seed"], seed_text);

    Session session(make_run_config(settings), command, out, err, quiet);
    if (chosen == describe_cmd) return session.describe();
    if (chosen == fit_cmd) return session.fit();
    if (chosen == score_cmd) return session.score();
    if (chosen == sweep_cmd) return session.sweep();
    return session.synth();
  } catch (const std::exception& e) {
    err << "error: " << error_name(e) << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace uselfa::app
