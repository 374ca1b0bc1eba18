/**
 * Copyright 2026 swpsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "swp/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swp {

using nlohmann::json;

ConfigError::ConfigError(const std::string& path, int line,
                         const std::string& message)
    : std::runtime_error(line > 0 ? path + " (line " + std::to_string(line) +
                                        "): " + message
                                  : path + ": " + message),
      path_(path),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

/// Shortest round-trip decimal form of a double.
std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& path, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(path, line, "expected a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& path, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return i;
  } catch (const std::exception&) {
    throw ConfigError(path, line, "expected an integer, got '" + v + "'");
  }
}

std::vector<double> parse_double_list(const std::string& path, int line,
                                      const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(path, line, item));
  }
  if (out.empty()) throw ConfigError(path, line, "expected a list of numbers");
  return out;
}

Protocol parse_protocol(const std::string& path, int line, const std::string& v) {
  const std::string s = lower(v);
  if (s == "pair") return Protocol::Pair;
  if (s == "ghz3") return Protocol::Ghz3;
  if (s == "swap") return Protocol::Swap;
  throw ConfigError(path, line, "protocol must be pair, ghz3 or swap");
}

Engine parse_engine(const std::string& path, int line, const std::string& v) {
  const std::string s = lower(v);
  if (s == "exact") return Engine::Exact;
  if (s == "mc") return Engine::Mc;
  throw ConfigError(path, line, "engine must be exact or mc");
}

BasisKind parse_kind(const std::string& path, int line, const std::string& v) {
  const std::string s = lower(v);
  if (s == "linear") return BasisKind::Linear;
  if (s == "circular") return BasisKind::Circular;
  if (s == "pauli-x") return BasisKind::PauliX;
  if (s == "pauli-y") return BasisKind::PauliY;
  if (s == "pauli-z") return BasisKind::PauliZ;
  throw ConfigError(path, line,
                    "basis kind must be linear, circular or pauli-x/y/z");
}

constexpr double kPi = 3.14159265358979323846;

/// Applies one (section.key, value) entry to the config. Shared by the
/// text and JSON front ends so both encodings accept the same keys.
struct ConfigBuilder {
  ExperimentConfig cfg;

  void apply(const std::string& section, const std::string& key,
             const std::string& value, int line) {
    const std::string path = section.empty() ? key : section + "." + key;
    const std::string low = lower(value);

    auto range_check = [&](double v, double lo, double hi) {
      if (v < lo || v > hi)
        throw ConfigError(path, line,
                          "value " + value + " outside [" + fmt_double(lo) +
                              ", " + fmt_double(hi) + "]");
      return v;
    };

    if (section.empty()) {
      if (key == "protocol") cfg.protocol = parse_protocol(path, line, value);
      else if (key == "engine") cfg.engine = parse_engine(path, line, value);
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(path, line, value));
      else if (key == "mc_trials") cfg.mc_trials = parse_int(path, line, value);
      else if (key == "workers")
        cfg.workers = static_cast<int>(parse_int(path, line, value));
      else if (key == "double_excitations") {
        if (low == "auto") cfg.double_excitations = -1;
        else if (low == "on" || low == "true") cfg.double_excitations = 1;
        else if (low == "off" || low == "false") cfg.double_excitations = 0;
        else throw ConfigError(path, line, "expected auto, on or off");
      } else {
        throw ConfigError(path, line, "unknown key");
      }
      return;
    }

    if (section == "source") {
      auto& s = cfg.source;
      if (key == "chi") {
        s.chi = parse_double(path, line, value);
        if (s.chi <= 0.0 || s.chi > 0.2)
          throw ConfigError(path, line, "source.chi must lie in (0, 0.2]");
      } else if (key == "eta_deg") {
        if (low == "auto") s.eta_rad = 0.0;
        else s.eta_rad = parse_double(path, line, value) * kPi / 180.0;
      } else if (key == "b_mg") {
        s.b_gauss = parse_double(path, line, value) * 1e-3;
      } else if (key == "beta") {
        if (low == "auto") s.beta_rad_per_s = -1.0;
        else s.beta_rad_per_s = parse_double(path, line, value);
      } else if (key == "tau_ns") {
        cfg.taus_ns = parse_double_list(path, line, value);
        for (double t : cfg.taus_ns)
          if (t < 0) throw ConfigError(path, line, "storage times must be >= 0");
        cfg.source.tau_s = cfg.taus_ns.front() * 1e-9;
      } else if (key == "retrieval_eff_a1") {
        s.retrieval_eff["A1"] = range_check(parse_double(path, line, value), 0, 1);
      } else if (key == "retrieval_eff_a2") {
        s.retrieval_eff["A2"] = range_check(parse_double(path, line, value), 0, 1);
      } else if (key == "visibility_a1") {
        s.visibility["A1"] = range_check(parse_double(path, line, value), 0, 1);
      } else if (key == "visibility_a2") {
        s.visibility["A2"] = range_check(parse_double(path, line, value), 0, 1);
      } else if (key == "weighting") {
        if (low == "uniform") s.weighting = RetrievalWeighting::Uniform;
        else if (low == "cg") s.weighting = RetrievalWeighting::ClebschGordan;
        else throw ConfigError(path, line, "expected uniform or cg");
      } else if (key == "larmor_model") {
        if (low == "component") s.larmor_model = LarmorModel::Component;
        else if (low == "effective") s.larmor_model = LarmorModel::Effective;
        else throw ConfigError(path, line, "expected component or effective");
      } else if (key == "f_b") {
        s.scheme.f_b = static_cast<int>(parse_int(path, line, value));
      } else if (key == "f_e2") {
        s.scheme.f_e2 = static_cast<int>(parse_int(path, line, value));
      } else {
        throw ConfigError(path, line, "unknown key");
      }
      return;
    }

    if (section == "detectors") {
      if (key == "default_eff") {
        cfg.default_detector_eff = range_check(parse_double(path, line, value), 0, 1);
      } else if (key.rfind("eff_", 0) == 0) {
        cfg.detector_eff[key.substr(4)] =
            range_check(parse_double(path, line, value), 0, 1);
      } else if (key.rfind("dark_", 0) == 0) {
        cfg.detector_dark[key.substr(5)] =
            range_check(parse_double(path, line, value), 0, 1);
      } else {
        throw ConfigError(path, line, "unknown key");
      }
      return;
    }

    if (section == "timing") {
      auto& t = cfg.timing;
      if (key == "prep_ms") t.prep_ms = parse_double(path, line, value);
      else if (key == "run_ms") t.run_ms = parse_double(path, line, value);
      else if (key == "write_ns") t.write_ns = parse_double(path, line, value);
      else if (key == "read_ns") t.read_ns = parse_double(path, line, value);
      else if (key == "clean_ns") t.clean_ns = parse_double(path, line, value);
      else if (key == "cycle_hz")
        t.cycle_hz = static_cast<int>(parse_int(path, line, value));
      else if (key == "trials_per_run") {
        if (low == "auto") cfg.trials_per_run_override = 0;
        else cfg.trials_per_run_override = parse_int(path, line, value);
      } else {
        throw ConfigError(path, line, "unknown key");
      }
      return;
    }

    if (section == "settings") {
      if (key != "setting") throw ConfigError(path, line, "unknown key");
      std::stringstream ss(value);
      std::string mode, kind_s, theta_s;
      if (!(ss >> mode >> kind_s >> theta_s))
        throw ConfigError(path, line, "expected: setting = MODE KIND THETA");
      AnalyzerSetting a;
      a.mode = mode;
      a.kind = parse_kind(path, line, kind_s);
      a.theta_deg = parse_double(path, line, theta_s);
      if (a.theta_deg < 0 || a.theta_deg >= 180)
        throw ConfigError(path, line, "theta must lie in [0, 180)");
      cfg.settings.push_back(a);
      return;
    }

    throw ConfigError(section, line, "unknown section");
  }
};

ExperimentConfig parse_ini(const std::string& text, const std::string& name) {
  ConfigBuilder b;
  std::stringstream ss(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError(name, line_no, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name, line_no, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    b.apply(section, key, value, line_no);
  }
  b.cfg.validate();
  return b.cfg;
}

ExperimentConfig parse_json_config(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name, 0, std::string("invalid JSON: ") + e.what());
  }
  ConfigBuilder b;
  auto as_string = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "on" : "off";
    if (v.is_number_integer())
      return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return fmt_double(v.get<double>());
    throw std::runtime_error("unsupported value type");
  };
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      if (key == "detectors") {
        for (const auto& [k2, v2] : value.items()) {
          if (k2 == "eff" || k2 == "dark") {
            for (const auto& [id, v3] : v2.items())
              b.apply("detectors", k2 + "_" + id, as_string(v3), 0);
          } else {
            b.apply("detectors", k2, as_string(v2), 0);
          }
        }
      } else {
        for (const auto& [k2, v2] : value.items()) {
          if (k2 == "tau_ns" && v2.is_array()) {
            std::string list;
            for (const auto& t : v2) {
              if (!list.empty()) list += ",";
              list += as_string(t);
            }
            b.apply(key, k2, list, 0);
          } else {
            b.apply(key, k2, as_string(v2), 0);
          }
        }
      }
    } else if (key == "settings" && value.is_array()) {
      for (const auto& s : value) {
        const std::string mode = s.at("mode").get<std::string>();
        const std::string kind = s.at("kind").get<std::string>();
        const std::string theta = as_string(s.at("theta_deg"));
        b.apply("settings", "setting", mode + " " + kind + " " + theta, 0);
      }
    } else if (key == "taus_ns" && value.is_array()) {
      std::string list;
      for (const auto& t : value) {
        if (!list.empty()) list += ",";
        list += as_string(t);
      }
      b.apply("source", "tau_ns", list, 0);
    } else {
      b.apply("", key, as_string(value), 0);
    }
  }
  b.cfg.validate();
  return b.cfg;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_json_config(text, source_name);
  return parse_ini(text, source_name);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "protocol = " << to_string(cfg.protocol) << "\n";
  out << "engine = " << to_string(cfg.engine) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "mc_trials = " << cfg.mc_trials << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "double_excitations = "
      << (cfg.double_excitations < 0 ? "auto"
          : cfg.double_excitations    ? "on"
                                      : "off")
      << "\n\n";

  const auto& s = cfg.source;
  out << "[source]\n";
  out << "chi = " << fmt_double(s.chi) << "\n";
  if (s.eta_rad > 0.0)
    out << "eta_deg = " << fmt_double(s.eta_rad * 180.0 / kPi) << "\n";
  else
    out << "eta_deg = auto\n";
  out << "b_mg = " << fmt_double(s.b_gauss * 1e3) << "\n";
  if (s.beta_rad_per_s >= 0.0)
    out << "beta = " << fmt_double(s.beta_rad_per_s) << "\n";
  else
    out << "beta = auto\n";
  out << "tau_ns = ";
  for (std::size_t i = 0; i < cfg.taus_ns.size(); ++i)
    out << (i ? "," : "") << fmt_double(cfg.taus_ns[i]);
  out << "\n";
  out << "retrieval_eff_a1 = " << fmt_double(s.retrieval_eff_for("A1")) << "\n";
  out << "retrieval_eff_a2 = " << fmt_double(s.retrieval_eff_for("A2")) << "\n";
  out << "visibility_a1 = " << fmt_double(s.visibility_for("A1")) << "\n";
  out << "visibility_a2 = " << fmt_double(s.visibility_for("A2")) << "\n";
  out << "weighting = "
      << (s.weighting == RetrievalWeighting::Uniform ? "uniform" : "cg") << "\n";
  out << "larmor_model = "
      << (s.larmor_model == LarmorModel::Component ? "component" : "effective")
      << "\n";
  out << "f_b = " << s.scheme.f_b << "\n";
  out << "f_e2 = " << s.scheme.f_e2 << "\n\n";

  out << "[detectors]\n";
  out << "default_eff = " << fmt_double(cfg.default_detector_eff) << "\n";
  for (const auto& [id, e] : cfg.detector_eff)
    out << "eff_" << id << " = " << fmt_double(e) << "\n";
  for (const auto& [id, d] : cfg.detector_dark)
    out << "dark_" << id << " = " << fmt_double(d) << "\n";
  out << "\n";

  const auto& t = cfg.timing;
  out << "[timing]\n";
  out << "prep_ms = " << fmt_double(t.prep_ms) << "\n";
  out << "run_ms = " << fmt_double(t.run_ms) << "\n";
  out << "write_ns = " << fmt_double(t.write_ns) << "\n";
  out << "read_ns = " << fmt_double(t.read_ns) << "\n";
  out << "clean_ns = " << fmt_double(t.clean_ns) << "\n";
  out << "cycle_hz = " << t.cycle_hz << "\n";
  if (cfg.trials_per_run_override > 0)
    out << "trials_per_run = " << cfg.trials_per_run_override << "\n";
  else
    out << "trials_per_run = auto\n";

  if (!cfg.settings.empty()) {
    out << "\n[settings]\n";
    for (const auto& a : cfg.settings)
      out << "setting = " << a.mode << " " << to_string(a.kind) << " "
          << fmt_double(a.theta_deg) << "\n";
  }
  return out.str();
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  const auto& s = cfg.source;
  json j;
  j["protocol"] = to_string(cfg.protocol);
  j["engine"] = to_string(cfg.engine);
  j["seed"] = cfg.seed;
  j["mc_trials"] = cfg.mc_trials;
  j["workers"] = cfg.workers;
  j["double_excitations"] = cfg.double_excitations < 0 ? "auto"
                            : cfg.double_excitations   ? "on"
                                                       : "off";
  j["source"] = {
      {"chi", s.chi},
      {"eta_deg", s.eta_rad > 0 ? json(s.eta_rad * 180.0 / kPi) : json("auto")},
      {"b_mg", s.b_gauss * 1e3},
      {"beta", s.beta_rad_per_s >= 0 ? json(s.beta_rad_per_s) : json("auto")},
      {"beta_resolved", s.beta()},
      {"tau_ns", cfg.taus_ns},
      {"retrieval_eff_a1", s.retrieval_eff_for("A1")},
      {"retrieval_eff_a2", s.retrieval_eff_for("A2")},
      {"visibility_a1", s.visibility_for("A1")},
      {"visibility_a2", s.visibility_for("A2")},
      {"weighting",
       s.weighting == RetrievalWeighting::Uniform ? "uniform" : "cg"},
      {"larmor_model",
       s.larmor_model == LarmorModel::Component ? "component" : "effective"},
      {"f_b", s.scheme.f_b},
      {"f_e2", s.scheme.f_e2},
  };
  j["detectors"] = {{"default_eff", cfg.default_detector_eff},
                    {"eff", cfg.detector_eff},
                    {"dark", cfg.detector_dark}};
  j["timing"] = {{"prep_ms", cfg.timing.prep_ms},
                 {"run_ms", cfg.timing.run_ms},
                 {"write_ns", cfg.timing.write_ns},
                 {"read_ns", cfg.timing.read_ns},
                 {"clean_ns", cfg.timing.clean_ns},
                 {"cycle_hz", cfg.timing.cycle_hz},
                 {"trials_per_run", cfg.trials_per_run_override > 0
                                        ? json(cfg.trials_per_run_override)
                                        : json("auto")}};
  json settings = json::array();
  for (const auto& a : cfg.settings)
    settings.push_back({{"mode", a.mode},
                        {"kind", to_string(a.kind)},
                        {"theta_deg", a.theta_deg}});
  j["settings"] = settings;
  return j;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["config_path"] = m.config_path;
  j["tool_version"] = m.tool_version;
  j["emit_curves"] = m.emit_curves;
  j["config"] = config_to_json(m.config);
  return j;
}

json estimate_to_json(const CorrelationEstimate& e) {
  return {{"theta_a", e.setting_a.theta_deg},
          {"theta_b", e.setting_b.theta_deg},
          {"e", e.value},
          {"stderr", e.stderr_},
          {"counts",
           {{"pp", e.counts.pp},
            {"mm", e.counts.mm},
            {"pm", e.counts.pm},
            {"mp", e.counts.mp}}}};
}

json bell_to_json(const BellResult& b) {
  json j;
  j["s_chsh"] = b.s;
  j["stderr"] = b.stderr_;
  if (std::isfinite(b.sigma_violation)) j["sigma_violation"] = b.sigma_violation;
  return j;
}

class CsvTrialLogger : public TrialLogger {
 public:
  CsvTrialLogger(std::filesystem::path dir, std::string manifest_line)
      : dir_(std::move(dir)), manifest_line_(std::move(manifest_line)) {}

  void log(const std::string& tag,
           const std::vector<TrialOutcome>& trials) override {
    std::string name = "trials_" + tag + ".csv";
    for (auto& c : name)
      if (c == '/') c = '_';
    std::ofstream out(dir_ / name, std::ios::binary);
    out << "# manifest " << manifest_line_ << "\n";
    out << "trial_index,timestamp_ns,click_list\n";
    for (const auto& t : trials) {
      out << t.trial_index << "," << t.timestamp_ns << ",";
      for (std::size_t i = 0; i < t.clicks.size(); ++i)
        out << (i ? ";" : "") << t.clicks[i];
      out << "\n";
    }
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string manifest_line_;
  std::vector<std::string> files_;
};

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_e_table_csv(const std::filesystem::path& path,
                       const std::string& manifest_line,
                       const std::array<CorrelationEstimate, 4>& table) {
  std::ofstream out(path, std::ios::binary);
  out << "# manifest " << manifest_line << "\n";
  out << "theta_a,theta_b,E,stderr,counts\n";
  for (const auto& e : table) {
    out << csv_num(e.setting_a.theta_deg) << "," << csv_num(e.setting_b.theta_deg)
        << "," << csv_num(e.value) << "," << csv_num(e.stderr_) << ","
        << csv_num(e.counts.pp) << ";" << csv_num(e.counts.mm) << ";"
        << csv_num(e.counts.pm) << ";" << csv_num(e.counts.mp) << "\n";
  }
}

std::string tau_name(double tau_ns) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau_ns);
  return buf;
}

}  // namespace

int run_manifest(const RunManifest& manifest) {
  namespace fs = std::filesystem;
  const fs::path dir(manifest.out_dir);
  fs::create_directories(dir);

  json report;
  report["manifest"] = manifest_to_json(manifest);
  const std::string manifest_line = report["manifest"].dump();
  report["protocol"] = to_string(manifest.config.protocol);
  json warnings = json::array();
  json curves = json::object();

  try {
    ExperimentConfig cfg = manifest.config;
    CsvTrialLogger logger(dir, manifest_line);
    if (cfg.engine == Engine::Mc) cfg.trial_logger = &logger;

    const double vis1 = cfg.source.visibility_for("A1");
    const double vis2 = cfg.source.visibility_for("A2");
    if (vis1 < 1.0 || vis2 < 1.0)
      warnings.push_back(
          "visibility < 1 is a fitted white-noise knob, not a first-principles "
          "imperfection model");

    json results;
    std::vector<std::string> e_files;
    // (tau, series, S, stderr) rows for the s_vs_tau curve
    std::vector<std::array<std::string, 4>> s_rows;

    switch (cfg.protocol) {
      case Protocol::Pair: {
        const PairReport rep = run_pair(cfg);
        json runs = json::array();
        for (const auto& r : rep.runs) {
          json jr;
          jr["tau_ns"] = r.tau_ns;
          jr["arm"] = r.arm;
          jr["bell"] = bell_to_json(r.bell);
          jr["predicted_rate_per_s"] = r.predicted_rate_per_s;
          jr["trials_per_second"] = r.trials_per_s;
          json table = json::array();
          for (const auto& e : r.e_table) table.push_back(estimate_to_json(e));
          jr["e_table"] = table;
          runs.push_back(jr);

          const std::string fname =
              "e_table_" + r.arm + "_tau" + tau_name(r.tau_ns) + ".csv";
          write_e_table_csv(dir / fname, manifest_line, r.e_table);
          e_files.push_back(fname);
          s_rows.push_back({tau_name(r.tau_ns), r.arm, csv_num(r.bell.s),
                            csv_num(r.bell.stderr_)});
        }
        results["runs"] = runs;
        break;
      }
      case Protocol::Ghz3: {
        const GhzReport rep = run_ghz(cfg);
        json runs = json::array();
        for (const auto& r : rep.runs) {
          auto branch_json = [](const GhzBranch& b) {
            json jb;
            jb["herald_probability"] = b.herald_probability;
            jb["empty"] = b.empty;
            if (b.empty) return jb;
            json terms;
            for (const auto& [name, est] : b.terms)
              terms[name] = {{"value", est.value},
                             {"stderr", est.stderr_},
                             {"total", est.total}};
            jb["terms"] = terms;
            jb["witness"] = {{"w", b.witness.w},
                             {"stderr", b.witness.stderr_}};
            if (std::isfinite(b.witness.sigma_violation))
              jb["witness"]["sigma_violation"] = b.witness.sigma_violation;
            jb["mermin"] = {{"s_me", b.mermin.s_me},
                            {"stderr", b.mermin.stderr_},
                            {"exceeds_classical", b.mermin.exceeds_classical},
                            {"exceeds_tsirelson", b.mermin.exceeds_tsirelson}};
            if (std::isfinite(b.mermin.sigma_violation))
              jb["mermin"]["sigma_violation"] = b.mermin.sigma_violation;
            return jb;
          };
          json jr;
          jr["tau_ns"] = r.tau_ns;
          jr["heralded"] = branch_json(r.heralded);
          jr["vprime"] = branch_json(r.vprime);
          runs.push_back(jr);
        }
        results["runs"] = runs;
        break;
      }
      case Protocol::Swap: {
        const SwapReport rep = run_swap(cfg);
        json runs = json::array();
        for (const auto& r : rep.runs) {
          json jr;
          jr["tau_ns"] = r.tau_ns;
          jr["herald_probability"] = r.herald_probability;
          jr["phi_plus_fraction"] = r.phi_plus_fraction;
          jr["double_excitation_fraction"] = r.double_excitation_fraction;
          jr["success_probability"] = r.success_probability;
          jr["bell"] = bell_to_json(r.bell);
          json table = json::array();
          for (const auto& e : r.e_table) table.push_back(estimate_to_json(e));
          jr["e_table"] = table;
          runs.push_back(jr);

          const std::string fname =
              "e_table_swap_tau" + tau_name(r.tau_ns) + ".csv";
          write_e_table_csv(dir / fname, manifest_line, r.e_table);
          e_files.push_back(fname);
          s_rows.push_back({tau_name(r.tau_ns), "34", csv_num(r.bell.s),
                            csv_num(r.bell.stderr_)});
        }
        results["runs"] = runs;
        if (cfg.taus_ns.size() > 1)
          warnings.push_back(
              "S(tau) decay is reproduced through the per-tau visibility knob; "
              "storage-time dependence of the retrieval efficiency is not "
              "modeled");
        break;
      }
    }

    results["e_table_files"] = e_files;
    results["trial_log_files"] = logger.files();
    report["results"] = results;

    if (manifest.emit_curves) {
      std::ofstream out(dir / "phi_vs_tau.csv", std::ios::binary);
      out << "# manifest " << manifest_line << "\n";
      out << "tau_ns,phi_deg\n";
      const double beta = cfg.source.beta();
      for (int t = 0; t <= 500; t += 5)
        out << t << ","
            << csv_num(phi_of_tau(t * 1e-9, beta) * 180.0 / kPi) << "\n";
      curves["phi_vs_tau"] = "phi_vs_tau.csv";
    }
    if (cfg.taus_ns.size() > 1 && !s_rows.empty()) {
      std::ofstream out(dir / "s_vs_tau.csv", std::ios::binary);
      out << "# manifest " << manifest_line << "\n";
      out << "tau_ns,series,S,stderr\n";
      for (const auto& row : s_rows)
        out << row[0] << "," << row[1] << "," << row[2] << "," << row[3] << "\n";
      curves["s_vs_tau"] = "s_vs_tau.csv";
    }

    report["curves"] = curves;
    report["warnings"] = warnings;
  } catch (const std::exception& e) {
    report["curves"] = curves;
    warnings.push_back("run failed");
    report["warnings"] = warnings;
    report["results"] = {{"error", e.what()}};
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(2) << "\n";
    return 1;
  }

  std::ofstream out(dir / "report.json", std::ios::binary);
  out << report.dump(2) << "\n";
  return 0;
}

}  // namespace swp
