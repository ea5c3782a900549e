#include "cloudrls/config.hpp"

#include <cstdlib>
#include <sstream>

namespace cloudrls {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw ConfigError(where + ": '" + text + "' is not a number");
  return v;
}

long parse_long(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0')
    throw ConfigError(where + ": '" + text + "' is not an integer");
  return v;
}

}  // namespace

ConfigDoc ConfigDoc::parse(const std::string& text, const std::string& source) {
  ConfigDoc doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(source + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": key outside any [section]");
    auto [it, inserted] = doc.sections_[section].emplace(key, Entry{value, lineno, false});
    if (!inserted)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' in [" + section + "]");
  }
  return doc;
}

const ConfigDoc::Entry* ConfigDoc::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.consumed = true;
  return &k->second;
}

const ConfigDoc::Entry& ConfigDoc::require(const std::string& section,
                                           const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e)
    throw ConfigError(source_ + ": missing required key '" + key + "' in [" + section + "]");
  return *e;
}

void ConfigDoc::fail(const Entry& e, const std::string& msg) const {
  throw ConfigError(source_ + ":" + std::to_string(e.line) + ": " + msg);
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key) const {
  return require(section, key).value;
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigDoc::get_double(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  return parse_double(e.value, source_ + ":" + std::to_string(e.line) + ": " + key);
}

double ConfigDoc::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  return parse_double(e->value, source_ + ":" + std::to_string(e->line) + ": " + key);
}

int ConfigDoc::get_int(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  return static_cast<int>(parse_long(e.value, source_ + ":" + std::to_string(e.line) + ": " + key));
}

int ConfigDoc::get_int(const std::string& section, const std::string& key, int fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  return static_cast<int>(
      parse_long(e->value, source_ + ":" + std::to_string(e->line) + ": " + key));
}

std::uint64_t ConfigDoc::get_u64(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
  if (end == e->value.c_str() || *end != '\0')
    fail(*e, key + ": '" + e->value + "' is not an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

Vector ConfigDoc::get_vector(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  const auto parts = split(e.value, ',');
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        parse_double(parts[i], source_ + ":" + std::to_string(e.line) + ": " + key);
  return v;
}

std::vector<int> ConfigDoc::get_int_list(const std::string& section,
                                         const std::string& key) const {
  const Entry& e = require(section, key);
  std::vector<int> out;
  for (const auto& p : split(e.value, ','))
    out.push_back(static_cast<int>(
        parse_long(p, source_ + ":" + std::to_string(e.line) + ": " + key)));
  return out;
}

Matrix ConfigDoc::get_matrix(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  const auto rows = split(e.value, ';');
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) {
    std::vector<double> r;
    std::istringstream in(row);
    std::string tok;
    while (in >> tok)
      r.push_back(parse_double(tok, source_ + ":" + std::to_string(e.line) + ": " + key));
    if (r.empty()) fail(e, key + ": empty matrix row");
    values.push_back(std::move(r));
  }
  if (values.empty()) fail(e, key + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(values.size()),
           static_cast<Eigen::Index>(values.front().size()));
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != values.front().size())
      fail(e, key + ": ragged matrix rows");
    for (size_t j = 0; j < values[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  return m;
}

void ConfigDoc::require_all_consumed() const {
  for (const auto& [section, keys] : sections_) {
    for (const auto& [key, entry] : keys) {
      if (!entry.consumed)
        throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "' in [" + section + "]");
    }
  }
}

ScenarioConfig scenario_from_config(const ConfigDoc& doc) {
  ScenarioConfig cfg;
  cfg.name = doc.get_string("scenario", "name", "custom");
  cfg.num_agents = doc.get_int("scenario", "agents");
  cfg.horizon = doc.get_int("scenario", "horizon");
  cfg.seed = doc.get_u64("scenario", "seed", 1);

  cfg.model.n_a = doc.get_int("model", "na");
  cfg.model.n_b = doc.get_int("model", "nb");
  cfg.model.n_k = doc.get_int("model", "nk", 0);

  const std::string law = doc.get_string("truth", "law");
  if (law == "constant") {
    cfg.truth.law = TruthLaw::Constant;
    cfg.truth.theta = doc.get_vector("truth", "theta");
  } else if (law == "sincos") {
    cfg.truth.law = TruthLaw::SinCos;
    cfg.truth.amplitudes = doc.get_vector("truth", "amplitudes");
  } else if (law == "global_local") {
    cfg.truth.law = TruthLaw::GlobalLocal;
    cfg.truth.global_values = doc.get_vector("truth", "global");
    cfg.truth.local_position = doc.get_int("truth", "local_position", 2);
    cfg.truth.local_mean = doc.get_double("truth", "local_mean");
    cfg.truth.local_stddev = doc.get_double("truth", "local_std");
  } else {
    throw ConfigError("[truth] law must be constant, sincos or global_local; got '" + law + "'");
  }

  cfg.input.low = doc.get_double("input", "low", cfg.input.low);
  cfg.input.high = doc.get_double("input", "high", cfg.input.high);

  const std::string noise_law = doc.get_string("noise", "law", "uniform_int_variance");
  if (noise_law == "uniform_int_variance") {
    cfg.noise.kind = NoiseSpec::Kind::UniformIntVariance;
    cfg.noise.low = doc.get_double("noise", "low", cfg.noise.low);
    cfg.noise.high = doc.get_double("noise", "high", cfg.noise.high);
  } else if (noise_law == "fixed_variance") {
    cfg.noise.kind = NoiseSpec::Kind::FixedVariance;
    cfg.noise.value = doc.get_double("noise", "variance");
  } else {
    throw ConfigError("[noise] law must be uniform_int_variance or fixed_variance");
  }

  cfg.anomalies.non_informative_count = doc.get_int("anomalies", "non_informative", 0);
  if (doc.has("anomalies", "non_informative_agents"))
    cfg.anomalies.non_informative_agents = doc.get_int_list("anomalies", "non_informative_agents");
  cfg.anomalies.failure_count = doc.get_int("anomalies", "failures", 0);
  if (doc.has("anomalies", "failure_agents"))
    cfg.anomalies.failure_agents = doc.get_int_list("anomalies", "failure_agents");
  if (doc.has("anomalies", "failure_window")) {
    const Vector w = doc.get_vector("anomalies", "failure_window");
    if (w.size() != 2) throw ConfigError("[anomalies] failure_window needs two fractions");
    cfg.anomalies.failure_window_low = w[0];
    cfg.anomalies.failure_window_high = w[1];
  }
  if (doc.has("anomalies", "failure_low"))
    cfg.anomalies.failure_low = doc.get_vector("anomalies", "failure_low");
  if (doc.has("anomalies", "failure_high"))
    cfg.anomalies.failure_high = doc.get_vector("anomalies", "failure_high");

  cfg.lambda = doc.get_double("estimation", "lambda", 1.0);
  cfg.phi0 = doc.get_double("estimation", "phi0", 0.1);
  cfg.init_local_stddev = doc.get_double("estimation", "init_local_std", cfg.init_local_stddev);
  cfg.init_global_stddev = doc.get_double("estimation", "init_global_std", cfg.init_global_stddev);

  const std::string mode = doc.get_string("consensus", "mode", "full");
  if (mode == "full") {
    cfg.variant = ConsensusVariant::Full;
  } else if (mode == "partial") {
    cfg.variant = ConsensusVariant::Partial;
    cfg.P = doc.get_matrix("consensus", "p_rows");
  } else if (mode == "constrained") {
    cfg.variant = ConsensusVariant::ConstrainedPartial;
    cfg.P = doc.get_matrix("consensus", "p_rows");
    const std::string boxes = doc.get_string("consensus", "box_set");
    if (boxes == "S1")
      cfg.box_set = BoxSet::S1;
    else if (boxes == "S2")
      cfg.box_set = BoxSet::S2;
    else if (boxes == "S3")
      cfg.box_set = BoxSet::S3;
    else if (boxes == "explicit") {
      cfg.box_set = BoxSet::Explicit;
      cfg.box_low = doc.get_vector("consensus", "box_low");
      cfg.box_high = doc.get_vector("consensus", "box_high");
    } else {
      throw ConfigError("[consensus] box_set must be S1, S2, S3 or explicit");
    }
  } else {
    throw ConfigError("[consensus] mode must be full, partial or constrained; got '" + mode + "'");
  }

  cfg.penalties.rho = doc.get_double("solver", "rho", cfg.penalties.rho);
  cfg.penalties.rho1 = doc.get_double("solver", "rho1", cfg.penalties.rho1);
  cfg.penalties.rho2 = doc.get_double("solver", "rho2", cfg.penalties.rho2);
  cfg.admm.max_iters = doc.get_int("solver", "max_iters", cfg.admm.max_iters);
  cfg.admm.primal_tol = doc.get_double("solver", "primal_tol", cfg.admm.primal_tol);

  doc.require_all_consumed();
  cfg.validate();
  return cfg;
}

ScenarioConfig scenario_from_text(const std::string& text, const std::string& source) {
  return scenario_from_config(ConfigDoc::parse(text, source));
}

namespace {

std::string join(const Vector& v) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  return out.str();
}

std::string join(const std::vector<int>& v) {
  std::ostringstream out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  return out.str();
}

std::string join_matrix(const Matrix& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out << " ; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
  }
  return out.str();
}

}  // namespace

std::string scenario_to_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "[scenario]\n";
  out << "name = " << cfg.name << "\n";
  out << "agents = " << cfg.num_agents << "\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "seed = " << cfg.seed << "\n\n";

  out << "[model]\n";
  out << "na = " << cfg.model.n_a << "\n";
  out << "nb = " << cfg.model.n_b << "\n";
  out << "nk = " << cfg.model.n_k << "\n\n";

  out << "[truth]\n";
  switch (cfg.truth.law) {
    case TruthLaw::Constant:
      out << "law = constant\n";
      out << "theta = " << join(cfg.truth.theta) << "\n";
      break;
    case TruthLaw::SinCos:
      out << "law = sincos\n";
      out << "amplitudes = " << join(cfg.truth.amplitudes) << "\n";
      break;
    case TruthLaw::GlobalLocal:
      out << "law = global_local\n";
      out << "global = " << join(cfg.truth.global_values) << "\n";
      out << "local_position = " << cfg.truth.local_position << "\n";
      out << "local_mean = " << cfg.truth.local_mean << "\n";
      out << "local_std = " << cfg.truth.local_stddev << "\n";
      break;
  }
  out << "\n[input]\n";
  out << "low = " << cfg.input.low << "\n";
  out << "high = " << cfg.input.high << "\n";

  out << "\n[noise]\n";
  if (cfg.noise.kind == NoiseSpec::Kind::UniformIntVariance) {
    out << "law = uniform_int_variance\n";
    out << "low = " << cfg.noise.low << "\n";
    out << "high = " << cfg.noise.high << "\n";
  } else {
    out << "law = fixed_variance\n";
    out << "variance = " << cfg.noise.value << "\n";
  }

  if (cfg.anomalies.any_non_informative() || cfg.anomalies.any_failure()) {
    out << "\n[anomalies]\n";
    if (!cfg.anomalies.non_informative_agents.empty())
      out << "non_informative_agents = " << join(cfg.anomalies.non_informative_agents) << "\n";
    else if (cfg.anomalies.non_informative_count > 0)
      out << "non_informative = " << cfg.anomalies.non_informative_count << "\n";
    if (cfg.anomalies.any_failure()) {
      if (!cfg.anomalies.failure_agents.empty())
        out << "failure_agents = " << join(cfg.anomalies.failure_agents) << "\n";
      else
        out << "failures = " << cfg.anomalies.failure_count << "\n";
      out << "failure_window = " << cfg.anomalies.failure_window_low << ", "
          << cfg.anomalies.failure_window_high << "\n";
      out << "failure_low = " << join(cfg.anomalies.failure_low) << "\n";
      out << "failure_high = " << join(cfg.anomalies.failure_high) << "\n";
    }
  }

  out << "\n[estimation]\n";
  out << "lambda = " << cfg.lambda << "\n";
  out << "phi0 = " << cfg.phi0 << "\n";
  out << "init_local_std = " << cfg.init_local_stddev << "\n";
  out << "init_global_std = " << cfg.init_global_stddev << "\n";

  out << "\n[consensus]\n";
  switch (cfg.variant) {
    case ConsensusVariant::Full:
      out << "mode = full\n";
      break;
    case ConsensusVariant::Partial:
      out << "mode = partial\n";
      out << "p_rows = " << join_matrix(cfg.P) << "\n";
      break;
    case ConsensusVariant::ConstrainedPartial:
      out << "mode = constrained\n";
      out << "p_rows = " << join_matrix(cfg.P) << "\n";
      if (cfg.box_set == BoxSet::Explicit) {
        out << "box_set = explicit\n";
        out << "box_low = " << join(cfg.box_low) << "\n";
        out << "box_high = " << join(cfg.box_high) << "\n";
      } else {
        out << "box_set = " << (cfg.box_set == BoxSet::S1   ? "S1"
                                : cfg.box_set == BoxSet::S2 ? "S2"
                                                            : "S3")
            << "\n";
      }
      break;
  }

  out << "\n[solver]\n";
  if (cfg.variant == ConsensusVariant::ConstrainedPartial) {
    out << "rho1 = " << cfg.penalties.rho1 << "\n";
    out << "rho2 = " << cfg.penalties.rho2 << "\n";
  } else {
    out << "rho = " << cfg.penalties.rho << "\n";
  }
  out << "max_iters = " << cfg.admm.max_iters << "\n";
  out << "primal_tol = " << cfg.admm.primal_tol << "\n";
  return out.str();
}

}  // namespace cloudrls
