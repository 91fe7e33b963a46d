#include "eacl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eacl/errors.hpp"
#include "eacl/rng.hpp"

namespace eacl {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::none: return "none";
    case Ablation::no_angle: return "no_angle";
    case Ablation::no_ce: return "no_ce";
    case Ablation::no_inherit: return "no_inherit";
    case Ablation::no_adapt: return "no_adapt";
    case Ablation::center_anchors: return "center_anchors";
  }
  return "none";
}

Ablation ablation_from_string(const std::string& s) {
  if (s == "none") return Ablation::none;
  if (s == "no_angle") return Ablation::no_angle;
  if (s == "no_ce") return Ablation::no_ce;
  if (s == "no_inherit") return Ablation::no_inherit;
  if (s == "no_adapt") return Ablation::no_adapt;
  if (s == "center_anchors") return Ablation::center_anchors;
  throw ValidationError("unknown ablation: " + s);
}

std::string to_string(SupconVariant v) {
  return v == SupconVariant::literal ? "literal" : "conventional";
}

SupconVariant supcon_variant_from_string(const std::string& s) {
  if (s == "literal") return SupconVariant::literal;
  if (s == "conventional") return SupconVariant::conventional;
  throw ValidationError("unknown supcon_variant: " + s);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": cannot parse \"" + value + "\" as a real number");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": cannot parse \"" + value + "\" as a non-negative integer");
  }
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

TrainConfig parse_config_text(const std::string& text, const std::string& origin) {
  TrainConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": expected \"key = value\", got \"" + line + "\"");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "lambda1") config.lambda1 = parse_double(key, value);
    else if (key == "lambda2") config.lambda2 = parse_double(key, value);
    else if (key == "tau") config.tau = parse_double(key, value);
    else if (key == "k") config.k = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "f") config.f = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "d") config.d = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "batch_size") config.batch_size = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "stage1_epochs") config.stage1_epochs = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "stage2_epochs") config.stage2_epochs = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "learning_rate") config.learning_rate = parse_double(key, value);
    else if (key == "seed") config.seed = parse_uint(key, value);
    else if (key == "supcon_variant") config.supcon_variant = supcon_variant_from_string(value);
    else if (key == "ablation") config.ablation = ablation_from_string(value);
    else if (key == "dev_frac") config.dev_frac = parse_double(key, value);
    else if (key == "test_frac") config.test_frac = parse_double(key, value);
    else throw ValidationError(origin + ":" + std::to_string(line_no) + ": unknown config key \"" + key + "\"");
  }
  validate_config(config);
  return config;
}

TrainConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate_config(const TrainConfig& config) {
  if (config.lambda1 < 0.0 || config.lambda1 > 1.0) {
    throw ValidationError("config: lambda1 must be in [0,1], got " + format_double(config.lambda1));
  }
  if (config.lambda2 < 0.0) throw ValidationError("config: lambda2 must be non-negative");
  if (config.tau <= 0.0) throw ValidationError("config: tau must be positive");
  if (config.f < 8) throw ValidationError("config: f must be at least 8");
  if (config.d < 2) throw ValidationError("config: d must be at least 2");
  if (config.batch_size < 1) throw ValidationError("config: batch_size must be at least 1");
  if (config.learning_rate <= 0.0) throw ValidationError("config: learning_rate must be positive");
  if (config.dev_frac < 0.0 || config.dev_frac >= 1.0) {
    throw ValidationError("config: dev_frac must be in [0,1)");
  }
  if (config.test_frac < 0.0 || config.test_frac >= 1.0) {
    throw ValidationError("config: test_frac must be in [0,1)");
  }
  if (config.dev_frac + config.test_frac >= 1.0) {
    throw ValidationError("config: dev_frac + test_frac must be below 1");
  }
}

std::string config_to_text(const TrainConfig& config) {
  std::ostringstream out;
  out << "ablation = " << to_string(config.ablation) << "\n";
  out << "batch_size = " << config.batch_size << "\n";
  out << "d = " << config.d << "\n";
  out << "dev_frac = " << format_double(config.dev_frac) << "\n";
  out << "f = " << config.f << "\n";
  out << "k = " << config.k << "\n";
  out << "lambda1 = " << format_double(config.lambda1) << "\n";
  out << "lambda2 = " << format_double(config.lambda2) << "\n";
  out << "learning_rate = " << format_double(config.learning_rate) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "stage1_epochs = " << config.stage1_epochs << "\n";
  out << "stage2_epochs = " << config.stage2_epochs << "\n";
  out << "supcon_variant = " << to_string(config.supcon_variant) << "\n";
  out << "tau = " << format_double(config.tau) << "\n";
  out << "test_frac = " << format_double(config.test_frac) << "\n";
  return out.str();
}

std::string config_hash(const TrainConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_text(config))));
  return buf;
}

}  // namespace eacl
