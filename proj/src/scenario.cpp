// Copyright 2026 The tvobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tvobs/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tvobs/csv.hpp"
#include "tvobs/errors.hpp"
#include "tvobs/ident.hpp"
#include "tvobs/svg.hpp"

namespace tvobs {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return false;
  out = v;
  return true;
}

struct RawEntry {
  std::string section, key, value;
  int line = 0;
};

std::string dotted(const RawEntry& e) { return e.section + "." + e.key; }

const char* const kSections[] = {"system", "gains",     "input",
                                 "sim",    "estimator", "output"};

// "theta<k>.<sub>" with sub one of row, col, omega, l.
bool split_theta_key(const std::string& key, int& index, std::string& sub) {
  if (key.rfind("theta", 0) != 0) return false;
  std::size_t i = 5;
  while (i < key.size() && std::isdigit(static_cast<unsigned char>(key[i]))) ++i;
  if (i == 5 || i - 5 > 6 || i >= key.size() || key[i] != '.') return false;
  index = std::stoi(key.substr(5, i - 5));
  sub = key.substr(i + 1);
  return sub == "row" || sub == "col" || sub == "omega" || sub == "l";
}

// Key/value extraction plus typed readers; every problem is appended to
// `issues` so one pass reports them all.
class ConfigReader {
 public:
  std::vector<std::string> issues;
  std::map<std::string, RawEntry> kv;

  void tokenize(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;
    bool known = false;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = raw;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          issues.push_back("line " + std::to_string(lineno) +
                           ": unterminated section header");
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        known = std::find(std::begin(kSections), std::end(kSections),
                          section) != std::end(kSections);
        if (!known)
          issues.push_back("line " + std::to_string(lineno) +
                           ": unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      const std::string key = eq == std::string::npos
                                  ? std::string()
                                  : trim(line.substr(0, eq));
      if (key.empty()) {
        issues.push_back("line " + std::to_string(lineno) +
                         ": expected key = value");
        continue;
      }
      if (section.empty()) {
        issues.push_back("line " + std::to_string(lineno) +
                         ": key outside any section");
        continue;
      }
      if (!known) continue;
      RawEntry e{section, key, trim(line.substr(eq + 1)), lineno};
      const std::string dk = dotted(e);
      if (kv.count(dk)) {
        issue(e, "duplicate key");
        continue;
      }
      lines[dk] = lineno;
      kv.emplace(dk, std::move(e));
    }
  }

  bool take(const std::string& section, const std::string& key, RawEntry& out) {
    const auto it = kv.find(section + "." + key);
    if (it == kv.end()) return false;
    out = it->second;
    kv.erase(it);
    return true;
  }

  void issue(const RawEntry& e, const std::string& msg) {
    issues.push_back(dotted(e) + " (line " + std::to_string(e.line) +
                     "): " + msg);
  }

  void number(const std::string& sec, const std::string& key, double& out) {
    RawEntry e;
    if (!take(sec, key, e)) return;
    double v;
    if (!parse_number(e.value, v)) {
      issue(e, "expected a number, got \"" + e.value + "\"");
      return;
    }
    out = v;
  }

  bool integer_value(const RawEntry& e, int& out) {
    double v;
    if (!parse_number(e.value, v) || v != std::floor(v) ||
        std::fabs(v) > 1e9) {
      issue(e, "expected an integer, got \"" + e.value + "\"");
      return false;
    }
    out = static_cast<int>(v);
    return true;
  }

  void integer(const std::string& sec, const std::string& key, int& out) {
    RawEntry e;
    if (!take(sec, key, e)) return;
    integer_value(e, out);
  }

  bool matrix_value(const RawEntry& e, TimeMatrix& out) {
    const auto rows = split(e.value, ';');
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) cells.push_back(split(r, ','));
    const std::size_t width = cells.front().size();
    for (const auto& r : cells) {
      if (r.size() != width) {
        issue(e, "rows have different lengths");
        return false;
      }
    }
    TimeMatrix m(static_cast<int>(cells.size()), static_cast<int>(width));
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        try {
          m.at(static_cast<int>(i), static_cast<int>(j)) =
              Expr::parse(cells[i][j]);
        } catch (const EvalError& err) {
          issue(e, "entry (" + std::to_string(i + 1) + "," +
                       std::to_string(j + 1) + "): " + err.what());
          ok = false;
        }
      }
    }
    if (ok) out = m;
    return ok;
  }

  void matrix(const std::string& sec, const std::string& key, TimeMatrix& out) {
    RawEntry e;
    if (take(sec, key, e)) matrix_value(e, out);
  }

  // Column vector written as entries separated by ';'. Entries must be
  // constant expressions.
  void const_col(const std::string& sec, const std::string& key,
                 Eigen::VectorXd& out) {
    RawEntry e;
    if (!take(sec, key, e)) return;
    TimeMatrix m;
    if (!matrix_value(e, m)) return;
    if (m.cols() != 1) {
      issue(e, "expected a column (entries separated by ;), got " +
                   std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
      return;
    }
    Eigen::VectorXd v(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
      if (m.at(i, 0).depends_on_time()) {
        issue(e, "entries must be constant");
        return;
      }
      v(i) = m.at(i, 0).eval(0.0);
    }
    out = v;
  }

  // Row vector written as entries separated by ','.
  void const_row(const std::string& sec, const std::string& key,
                 Eigen::RowVectorXd& out) {
    RawEntry e;
    if (!take(sec, key, e)) return;
    TimeMatrix m;
    if (!matrix_value(e, m)) return;
    if (m.rows() != 1) {
      issue(e, "expected a single row, got " + std::to_string(m.rows()) +
                   "x" + std::to_string(m.cols()));
      return;
    }
    Eigen::RowVectorXd v(m.cols());
    for (int j = 0; j < m.cols(); ++j) {
      if (m.at(0, j).depends_on_time()) {
        issue(e, "entries must be constant");
        return;
      }
      v(j) = m.at(0, j).eval(0.0);
    }
    out = v;
  }

  void number_list(const std::string& sec, const std::string& key,
                   Eigen::VectorXd& out) {
    RawEntry e;
    if (!take(sec, key, e)) return;
    const auto parts = split(e.value, ',');
    Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      double x;
      if (!parse_number(parts[i], x)) {
        issue(e, "expected a list of numbers, got \"" + e.value + "\"");
        return;
      }
      v(static_cast<Eigen::Index>(i)) = x;
    }
    out = v;
  }

  std::map<std::string, int> lines;
};

std::string where(const std::string& key,
                  const std::map<std::string, int>* lines) {
  if (lines) {
    const auto it = lines->find(key);
    if (it != lines->end())
      return key + " (line " + std::to_string(it->second) + ")";
  }
  return key;
}

void validate_impl(const ScenarioConfig& cfg,
                   const std::map<std::string, int>* lines,
                   std::vector<std::string>& issues) {
  const auto w = [&](const std::string& k) { return where(k, lines); };
  const auto shape = [&](const std::string& key, const TimeMatrix& m, int r,
                         int c) {
    if (m.rows() == 0 && m.cols() == 0) return;  // absence reported elsewhere
    if (m.rows() != r || m.cols() != c)
      issues.push_back(w(key) + ": expected " + std::to_string(r) + "x" +
                       std::to_string(c) + ", got " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()));
  };
  const auto length = [&](const std::string& key, Eigen::Index got, int want) {
    if (got == 0) return;
    if (got != want)
      issues.push_back(w(key) + ": expected " + std::to_string(want) +
                       " entries, got " + std::to_string(got));
  };

  if (cfg.n < 1) issues.push_back(w("system.n") + ": must be at least 1");
  if (cfg.n >= 1) {
    shape("system.A0", cfg.A0, cfg.n, cfg.n);
    shape("system.B", cfg.B, cfg.n, 1);
    shape("gains.M", cfg.M, cfg.n, cfg.n);
    length("system.C", cfg.C.size(), cfg.n);
    length("gains.G", cfg.G.size(), cfg.n);
    length("gains.N", cfg.N.size(), cfg.n);
    length("gains.L", cfg.L.size(), cfg.n);
    length("sim.x0", cfg.x0.size(), cfg.n);
    length("sim.z0", cfg.z0.size(), cfg.n);
  }
  if (!(cfg.dt > 0)) issues.push_back(w("sim.dt") + ": must be positive");
  if (cfg.horizon < 0)
    issues.push_back(w("sim.horizon") + ": must be nonnegative");
  if (cfg.noise < 0) issues.push_back(w("sim.noise") + ": must be nonnegative");
  const std::pair<const char*, double> positive[] = {
      {"estimator.lambda", cfg.lambda},   {"estimator.gamma1", cfg.gamma1},
      {"estimator.lambda1", cfg.lambda1}, {"estimator.lambda2", cfg.lambda2},
      {"estimator.gamma2", cfg.gamma2},   {"estimator.eps_div", cfg.eps_div}};
  for (const auto& [key, v] : positive) {
    if (!(v > 0)) issues.push_back(w(key) + ": must be positive");
  }
  if (cfg.mode != "replay" && cfg.mode != "cascade")
    issues.push_back(w("estimator.mode") + ": expected replay or cascade");
  if (cfg.mode == "replay" && cfg.horizon > 0 &&
      !(cfg.T1 > 0 && cfg.T1 <= cfg.horizon))
    issues.push_back(w("estimator.T1") +
                     ": must lie in (0, horizon] for replay mode");
  if (cfg.decimate < 1)
    issues.push_back(w("output.decimate") + ": must be at least 1");

  std::vector<int> seen_rows;
  for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
    const ThetaSpec& sp = cfg.thetas[i];
    const std::string base = "system.theta" + std::to_string(i + 1);
    if (cfg.n >= 1 && (sp.row < 1 || sp.row > cfg.n)) {
      issues.push_back(w(base + ".row") + ": must lie in [1, " +
                       std::to_string(cfg.n) + "]");
      continue;
    }
    if (sp.col < 1 || sp.col > sp.row)
      issues.push_back(w(base + ".col") + ": must satisfy 1 <= col <= row");
    if (!(sp.omega > 0))
      issues.push_back(w(base + ".omega") + ": must be positive");
    if (std::find(seen_rows.begin(), seen_rows.end(), sp.row) !=
        seen_rows.end())
      issues.push_back(w(base + ".row") + ": duplicate varying entry for row " +
                       std::to_string(sp.row));
    seen_rows.push_back(sp.row);
  }
}

std::vector<double> head(const std::vector<double>& v, std::size_t count) {
  return std::vector<double>(v.begin(),
                             v.begin() + std::min(count, v.size()));
}

std::vector<double> pad_hold(std::vector<double> v, std::size_t total) {
  const double last = v.empty() ? 0.0 : v.back();
  v.resize(total, last);
  return v;
}

std::string matrix_text(const TimeMatrix& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r) {
    if (r) out += " ; ";
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      out += m.at(r, c).str();
    }
  }
  return out;
}

std::string col_text(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += " ; ";
    out += format_double(v(i));
  }
  return out;
}

std::string list_text(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

bool same_matrix(const TimeMatrix& a, const TimeMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a.at(r, c).str() != b.at(r, c).str()) return false;
  return true;
}

bool same_values(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

}  // namespace

bool operator==(const ThetaSpec& a, const ThetaSpec& b) {
  return a.row == b.row && a.col == b.col && a.omega == b.omega &&
         a.l1 == b.l1 && a.l2 == b.l2;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.n == b.n && same_matrix(a.A0, b.A0) && same_matrix(a.B, b.B) &&
         same_values(a.C.transpose(), b.C.transpose()) &&
         a.thetas == b.thetas && same_values(a.G, b.G) &&
         same_values(a.N, b.N) && same_values(a.L, b.L) &&
         same_matrix(a.M, b.M) && a.u.str() == b.u.str() && a.t0 == b.t0 &&
         a.dt == b.dt && a.horizon == b.horizon && same_values(a.x0, b.x0) &&
         same_values(a.z0, b.z0) && a.noise == b.noise &&
         a.lambda == b.lambda && a.gamma1 == b.gamma1 &&
         a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2 &&
         a.gamma2 == b.gamma2 && a.eps_div == b.eps_div && a.T1 == b.T1 &&
         a.mode == b.mode && a.decimate == b.decimate;
}

ScenarioConfig parse_config(const std::string& text) {
  ConfigReader rd;
  rd.tokenize(text);

  ScenarioConfig cfg;
  rd.integer("system", "n", cfg.n);
  rd.matrix("system", "A0", cfg.A0);
  rd.matrix("system", "B", cfg.B);
  rd.const_row("system", "C", cfg.C);
  rd.const_col("gains", "G", cfg.G);
  rd.const_col("gains", "N", cfg.N);
  rd.const_col("gains", "L", cfg.L);
  rd.matrix("gains", "M", cfg.M);

  {
    RawEntry e;
    if (rd.take("input", "u", e)) {
      try {
        cfg.u = Expr::parse(e.value);
      } catch (const EvalError& err) {
        rd.issue(e, err.what());
      }
    } else {
      cfg.u = Expr::parse("sin(t)");
    }
  }

  rd.number("sim", "t0", cfg.t0);
  rd.number("sim", "dt", cfg.dt);
  rd.number("sim", "horizon", cfg.horizon);
  rd.number_list("sim", "x0", cfg.x0);
  rd.number_list("sim", "z0", cfg.z0);
  rd.number("sim", "noise", cfg.noise);
  if (cfg.x0.size() == 0 && cfg.n >= 1)
    cfg.x0 = Eigen::VectorXd::Ones(cfg.n);
  if (cfg.z0.size() == 0 && cfg.n >= 1)
    cfg.z0 = Eigen::VectorXd::Zero(cfg.n);

  rd.number("estimator", "lambda", cfg.lambda);
  rd.number("estimator", "gamma1", cfg.gamma1);
  rd.number("estimator", "lambda1", cfg.lambda1);
  rd.number("estimator", "lambda2", cfg.lambda2);
  rd.number("estimator", "gamma2", cfg.gamma2);
  rd.number("estimator", "eps_div", cfg.eps_div);
  rd.number("estimator", "T1", cfg.T1);
  {
    RawEntry e;
    if (rd.take("estimator", "mode", e)) {
      if (e.value == "replay" || e.value == "cascade")
        cfg.mode = e.value;
      else
        rd.issue(e, "expected replay or cascade, got \"" + e.value + "\"");
    }
  }
  rd.integer("output", "decimate", cfg.decimate);

  // Varying entries: system.theta<k>.{row,col,omega,l}.
  std::map<int, std::map<std::string, RawEntry>> drafts;
  for (auto it = rd.kv.begin(); it != rd.kv.end();) {
    int idx = 0;
    std::string sub;
    if (it->second.section == "system" &&
        split_theta_key(it->second.key, idx, sub)) {
      drafts[idx][sub] = it->second;
      it = rd.kv.erase(it);
    } else {
      ++it;
    }
  }
  const std::vector<std::string> required = {
      "system.A0", "system.B", "system.C",
      "gains.G",   "gains.N",  "gains.L",
      "gains.M"};
  for (const auto& [dk, e] : rd.kv) rd.issue(e, "unknown key");
  for (auto& [idx, parts] : drafts) {
    const std::string base = "system.theta" + std::to_string(idx);
    ThetaSpec sp;
    bool ok = true;
    const auto need = [&](const char* sub) -> const RawEntry* {
      const auto it = parts.find(sub);
      if (it == parts.end()) {
        rd.issues.push_back(base + "." + sub + ": missing required key");
        ok = false;
        return nullptr;
      }
      return &it->second;
    };
    if (const RawEntry* e = need("row")) ok &= rd.integer_value(*e, sp.row);
    if (const RawEntry* e = need("col")) ok &= rd.integer_value(*e, sp.col);
    if (const RawEntry* e = need("omega")) {
      if (!parse_number(e->value, sp.omega)) {
        rd.issue(*e, "expected a number, got \"" + e->value + "\"");
        ok = false;
      }
    }
    if (const RawEntry* e = need("l")) {
      const auto parts2 = split(e->value, ',');
      if (parts2.size() != 2 || !parse_number(parts2[0], sp.l1) ||
          !parse_number(parts2[1], sp.l2)) {
        rd.issue(*e, "expected two numbers, got \"" + e->value + "\"");
        ok = false;
      }
    }
    if (ok) cfg.thetas.push_back(sp);
  }

  for (const auto& key : required) {
    if (!rd.lines.count(key))
      rd.issues.push_back(key + ": missing required key");
  }
  if (!rd.lines.count("system.n") && cfg.n == 0)
    rd.issues.push_back("system.n: missing required key");

  validate_impl(cfg, &rd.lines, rd.issues);
  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> issues;
  validate_impl(cfg, nullptr, issues);
  if (!issues.empty()) throw ConfigError(issues);
}

std::string print_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[system]\n";
  out << "n = " << cfg.n << "\n";
  out << "A0 = " << matrix_text(cfg.A0) << "\n";
  out << "B = " << matrix_text(cfg.B) << "\n";
  out << "C = " << list_text(cfg.C.transpose()) << "\n";
  for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
    const ThetaSpec& sp = cfg.thetas[i];
    const std::string base = "theta" + std::to_string(i + 1);
    out << base << ".row = " << sp.row << "\n";
    out << base << ".col = " << sp.col << "\n";
    out << base << ".omega = " << format_double(sp.omega) << "\n";
    out << base << ".l = " << format_double(sp.l1) << ", "
        << format_double(sp.l2) << "\n";
  }
  out << "\n[gains]\n";
  out << "G = " << col_text(cfg.G) << "\n";
  out << "N = " << col_text(cfg.N) << "\n";
  out << "L = " << col_text(cfg.L) << "\n";
  out << "M = " << matrix_text(cfg.M) << "\n";
  out << "\n[input]\n";
  out << "u = " << cfg.u.str() << "\n";
  out << "\n[sim]\n";
  out << "t0 = " << format_double(cfg.t0) << "\n";
  out << "dt = " << format_double(cfg.dt) << "\n";
  out << "horizon = " << format_double(cfg.horizon) << "\n";
  out << "x0 = " << list_text(cfg.x0) << "\n";
  out << "z0 = " << list_text(cfg.z0) << "\n";
  out << "noise = " << format_double(cfg.noise) << "\n";
  out << "\n[estimator]\n";
  out << "lambda = " << format_double(cfg.lambda) << "\n";
  out << "gamma1 = " << format_double(cfg.gamma1) << "\n";
  out << "lambda1 = " << format_double(cfg.lambda1) << "\n";
  out << "lambda2 = " << format_double(cfg.lambda2) << "\n";
  out << "gamma2 = " << format_double(cfg.gamma2) << "\n";
  out << "eps_div = " << format_double(cfg.eps_div) << "\n";
  out << "T1 = " << format_double(cfg.T1) << "\n";
  out << "mode = " << cfg.mode << "\n";
  out << "\n[output]\n";
  out << "decimate = " << cfg.decimate << "\n";
  return out.str();
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

LtvSystem make_system(const ScenarioConfig& cfg) {
  LtvSystem sys;
  sys.n = cfg.n;
  sys.A0 = cfg.A0;
  sys.B = cfg.B;
  sys.C = cfg.C;
  sys.theta_col.assign(static_cast<std::size_t>(cfg.n), -1);
  sys.theta.assign(static_cast<std::size_t>(cfg.n), std::nullopt);
  for (const ThetaSpec& sp : cfg.thetas) {
    sys.theta_col[static_cast<std::size_t>(sp.row - 1)] = sp.col - 1;
    sys.theta[static_cast<std::size_t>(sp.row - 1)] =
        ThetaGenerator{sp.omega, sp.l1, sp.l2};
  }
  return sys;
}

ObserverGains make_gains(const ScenarioConfig& cfg) {
  return ObserverGains{cfg.G, cfg.N, cfg.L, cfg.M};
}

ScenarioResult execute_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  LtvSystem sys = make_system(cfg);
  ObserverGains gains = make_gains(cfg);
  validate_system(sys);

  ScenarioResult res;
  res.conditions = verify_conditions(sys, gains, cfg.t0,
                                     cfg.t0 + std::min(cfg.horizon, 10.0),
                                     0.01);
  RunReport& rep = res.report;
  rep.t0 = cfg.t0;
  rep.dt = cfg.dt;
  rep.horizon = cfg.horizon;
  rep.T1 = cfg.T1;
  rep.mode = cfg.mode;
  rep.r1 = res.conditions.r1;
  rep.r2 = res.conditions.r2;
  rep.r3 = res.conditions.r3;
  rep.cond_t0 = res.conditions.grid_t0;
  rep.cond_t1 = res.conditions.grid_t1;
  rep.cond_step = res.conditions.grid_step;

  std::vector<ThetaSpec> specs = cfg.thetas;
  std::sort(specs.begin(), specs.end(),
            [](const ThetaSpec& a, const ThetaSpec& b) { return a.row < b.row; });
  const bool single = specs.size() == 1;

  if (cfg.horizon <= 0) {
    Trajectory t;
    t.t0 = cfg.t0;
    t.dt = cfg.dt;
    t.set_samples(0);
    for (int i = 1; i <= cfg.n; ++i) t.add("x" + std::to_string(i));
    for (int i = 1; i <= cfg.n; ++i) t.add("xhat" + std::to_string(i));
    t.add("xerr_norm");
    t.add("y");
    t.add("yhat");
    t.add("u");
    for (const ThetaSpec& sp : specs)
      t.add("theta_true" + std::to_string(sp.row));
    for (const ThetaSpec& sp : specs) {
      const std::string sfx = single ? "" : std::to_string(sp.row);
      t.add("omega_hat" + sfx);
      t.add("k_hat" + sfx);
      t.add("l1_hat" + sfx);
      t.add("l2_hat" + sfx);
      t.add("theta_hat" + std::to_string(sp.row));
      t.add("delta" + sfx);
    }
    res.traj = std::move(t);
    res.assumptions.eps = cfg.eps_div;
    return res;
  }

  Trajectory traj = run_observer(sys, gains, cfg.u, cfg.t0, cfg.horizon,
                                 cfg.dt, cfg.x0, cfg.z0, cfg.noise, 1);
  res.assumptions = check_assumptions(sys, traj, cfg.eps_div);
  rep.structure_ok = res.assumptions.structure_ok;
  rep.has_data = true;
  const std::size_t K = traj.samples();
  rep.samples = K;
  const std::size_t tail_start = (K * 4) / 5;

  {
    const auto& xerr = traj.col("xerr_norm");
    rep.xerr_initial = xerr.front();
    rep.xerr_final = xerr.back();
    rep.xerr_tail_max = *std::max_element(
        xerr.begin() + static_cast<std::ptrdiff_t>(tail_start), xerr.end());
  }

  const std::size_t k1 = std::min<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.T1 / cfg.dt)), K - 1);

  std::map<int, std::vector<double>> estimated;  // 0-based row -> theta_hat
  for (const ThetaSpec& sp : specs) {
    const int r = sp.row - 1, c = sp.col - 1;
    const std::string sfx = single ? "" : std::to_string(sp.row);
    const std::vector<double> xhat_r = traj.col("xhat" + std::to_string(sp.row));
    const std::vector<double> xhat_c = traj.col("xhat" + std::to_string(sp.col));
    const std::vector<double> h_r = known_dynamics_series(sys, traj, r, true);

    // Derivative proxy of the pivot state for the swapping construction;
    // includes the pivot's own reconstructed entry when it has one.
    std::vector<double> dxs;
    if (c != r) {
      dxs = known_dynamics_series(sys, traj, c, true);
      const auto it = estimated.find(c);
      if (it != estimated.end()) {
        const std::vector<double> piv =
            traj.col("xhat" + std::to_string(sys.theta_col[c] + 1));
        for (std::size_t k = 0; k < K; ++k) dxs[k] += it->second[k] * piv[k];
      }
    }

    OmegaTrace ot;
    DremTrace dr;
    std::vector<double> omega_col, k_col;
    if (cfg.mode == "replay") {
      if (c == r) {
        const XiSignal xi =
            build_xi(head(xhat_r, k1 + 1), head(h_r, k1 + 1), cfg.eps_div);
        ot = omega_pipeline(xi, cfg.lambda, cfg.gamma1, cfg.dt, cfg.t0);
      } else {
        ot = theta_i_pipeline(head(xhat_r, k1 + 1), head(xhat_c, k1 + 1),
                              head(dxs, k1 + 1), head(h_r, k1 + 1), cfg.lambda,
                              cfg.gamma1, cfg.dt, cfg.eps_div, cfg.t0);
      }
      const double wf = ot.final_omega();
      omega_col = pad_hold(ot.omega_hat, K);
      k_col = pad_hold(ot.k_hat, K);
      if (c == r) {
        dr = drem_pipeline(xhat_r, h_r, wf, cfg.lambda1, cfg.lambda2,
                           cfg.gamma2, cfg.dt, cfg.t0);
      } else {
        dr = drem_pipeline(xhat_r, h_r, xhat_c, std::vector<double>(K, wf),
                           cfg.lambda1, cfg.lambda2, cfg.gamma2, cfg.dt,
                           cfg.t0);
      }
    } else {
      if (c == r) {
        const XiSignal xi = build_xi(xhat_r, h_r, cfg.eps_div);
        ot = omega_pipeline(xi, cfg.lambda, cfg.gamma1, cfg.dt, cfg.t0);
      } else {
        ot = theta_i_pipeline(xhat_r, xhat_c, dxs, h_r, cfg.lambda, cfg.gamma1,
                              cfg.dt, cfg.eps_div, cfg.t0);
      }
      omega_col = ot.omega_hat;
      k_col = ot.k_hat;
      dr = drem_pipeline(xhat_r, h_r, c == r ? xhat_r : xhat_c, ot.omega_hat,
                         cfg.lambda1, cfg.lambda2, cfg.gamma2, cfg.dt, cfg.t0);
    }

    std::vector<double> th(K, 0.0);
    const double wf = omega_col.back();
    for (std::size_t k = 0; k < K; ++k) {
      const double w = cfg.mode == "replay" ? wf : omega_col[k];
      const double tk = traj.time_at(k);
      th[k] = dr.l1[k] * std::sin(w * tk) + dr.l2[k] * std::cos(w * tk);
    }
    estimated[r] = th;

    traj.add("omega_hat" + sfx, omega_col);
    traj.add("k_hat" + sfx, k_col);
    traj.add("l1_hat" + sfx, dr.l1);
    traj.add("l2_hat" + sfx, dr.l2);
    traj.add("theta_hat" + std::to_string(sp.row), th);
    traj.add("delta" + sfx, dr.delta);

    RowIdent ri;
    ri.row = sp.row;
    ri.col = sp.col;
    ri.omega_true = sp.omega;
    ri.l1_true = sp.l1;
    ri.l2_true = sp.l2;
    ri.omega_hat = omega_col.back();
    ri.k_hat = k_col.back();
    ri.l1_hat = dr.final_l1();
    ri.l2_hat = dr.final_l2();
    ri.poor_excitation = dr.poor_excitation;
    ri.gated = ot.gated;
    {
      std::size_t first_ok = 0;
      for (std::size_t k = K; k-- > 0;) {
        if (std::fabs(omega_col[k] - ri.omega_hat) > 0.05) {
          first_ok = k + 1;
          break;
        }
      }
      ri.settle = first_ok >= K ? -1.0
                                : static_cast<double>(first_ok) * cfg.dt;
    }
    {
      const auto& tt = traj.col("theta_true" + std::to_string(sp.row));
      double acc = 0;
      for (std::size_t k = tail_start; k < K; ++k) {
        const double e = th[k] - tt[k];
        acc += e * e;
      }
      ri.theta_rms_tail =
          std::sqrt(acc / static_cast<double>(K - tail_start));
    }
    {
      std::vector<double> ds = dr.delta;
      std::sort(ds.begin(), ds.end());
      ri.delta_min = ds.front();
      ri.delta_max = ds.back();
      ri.delta_median = ds[ds.size() / 2];
    }
    double mp = std::numeric_limits<double>::infinity();
    for (double v : xhat_c) mp = std::min(mp, std::fabs(v));
    ri.min_pivot = mp;
    rep.rows.push_back(ri);
  }

  res.traj = std::move(traj);
  return res;
}

std::string format_report(const RunReport& rep) {
  std::ostringstream out;
  out << "run report\n==========\n";
  out << "status: " << (rep.has_data ? "ok" : "no trajectory data") << "\n";
  out << "mode: " << rep.mode << "\n";
  out << "samples: " << rep.samples << " (dt " << format_sig9(rep.dt)
      << ", t in [" << format_sig9(rep.t0) << ", "
      << format_sig9(rep.t0 + rep.horizon) << "])\n";
  out << "conditions (grid [" << format_sig9(rep.cond_t0) << ", "
      << format_sig9(rep.cond_t1) << "] step " << format_sig9(rep.cond_step)
      << "): r1 " << format_sig9(rep.r1) << ", r2 " << format_sig9(rep.r2)
      << ", r3 " << format_sig9(rep.r3) << "\n";
  out << "structure: " << (rep.structure_ok ? "ok" : "violated") << "\n";
  if (!rep.has_data) return out.str();
  out << "state error: initial " << format_sig9(rep.xerr_initial) << ", final "
      << format_sig9(rep.xerr_final) << ", tail max "
      << format_sig9(rep.xerr_tail_max) << "\n";
  for (const RowIdent& ri : rep.rows) {
    out << "varying entry (row " << ri.row << ", column " << ri.col << "):\n";
    out << "  true: omega " << format_sig9(ri.omega_true) << ", amplitudes ("
        << format_sig9(ri.l1_true) << ", " << format_sig9(ri.l2_true) << ")\n";
    out << "  frequency: final " << format_sig9(ri.omega_hat) << ", k "
        << format_sig9(ri.k_hat) << ", settle ";
    if (ri.settle < 0)
      out << "never";
    else
      out << format_sig9(ri.settle) << " s";
    out << "\n";
    out << "  amplitudes: (" << format_sig9(ri.l1_hat) << ", "
        << format_sig9(ri.l2_hat) << ")\n";
    out << "  theta rms over tail 20%: " << format_sig9(ri.theta_rms_tail)
        << "\n";
    out << "  excitation delta: min " << format_sig9(ri.delta_min)
        << ", median " << format_sig9(ri.delta_median) << ", max "
        << format_sig9(ri.delta_max) << "\n";
    if (ri.poor_excitation)
      out << "  warning: poor excitation, delta stayed near zero\n";
    out << "  gated samples: " << ri.gated << ", min |pivot| "
        << format_sig9(ri.min_pivot) << "\n";
  }
  return out.str();
}

Trajectory export_view(const Trajectory& traj, const ScenarioConfig& cfg) {
  std::vector<ThetaSpec> specs = cfg.thetas;
  std::sort(specs.begin(), specs.end(),
            [](const ThetaSpec& a, const ThetaSpec& b) { return a.row < b.row; });
  const bool single = specs.size() == 1;

  std::vector<std::string> order;
  for (int i = 1; i <= cfg.n; ++i) order.push_back("x" + std::to_string(i));
  for (int i = 1; i <= cfg.n; ++i) order.push_back("xhat" + std::to_string(i));
  order.emplace_back("xerr_norm");
  order.emplace_back("y");
  order.emplace_back("u");
  for (const ThetaSpec& sp : specs)
    order.push_back("theta_true" + std::to_string(sp.row));
  for (const ThetaSpec& sp : specs) {
    const std::string sfx = single ? "" : std::to_string(sp.row);
    order.push_back("omega_hat" + sfx);
    order.push_back("k_hat" + sfx);
    order.push_back("l1_hat" + sfx);
    order.push_back("l2_hat" + sfx);
    order.push_back("theta_hat" + std::to_string(sp.row));
  }
  for (const ThetaSpec& sp : specs)
    order.push_back("delta" + (single ? "" : std::to_string(sp.row)));

  Trajectory out;
  out.t0 = traj.t0;
  out.dt = traj.dt;
  out.set_samples(traj.samples());
  for (const std::string& name : order)
    if (traj.has(name)) out.add(name, traj.col(name));
  return out;
}

void emit_plots(const Trajectory& traj, const RunReport& rep,
                const std::string& dir) {
  const std::size_t K = traj.samples();
  std::vector<double> t(K);
  for (std::size_t k = 0; k < K; ++k) t[k] = traj.time_at(k);
  const auto path = [&](const char* name) { return dir + "/" + name; };
  const bool single = rep.rows.size() == 1;
  const auto sfx = [&](int row) {
    return single ? std::string() : std::to_string(row);
  };
  const auto diff = [&](const std::string& name, double offset) {
    std::vector<double> d = traj.col(name);
    for (double& v : d) v -= offset;
    return d;
  };

  {
    std::vector<PlotSeries> s;
    for (int i = 1; traj.has("x" + std::to_string(i)); ++i)
      s.push_back({"x" + std::to_string(i),
                   traj.col("x" + std::to_string(i)), false});
    for (int i = 1; traj.has("xhat" + std::to_string(i)); ++i)
      s.push_back({"est x" + std::to_string(i),
                   traj.col("xhat" + std::to_string(i)), true});
    write_line_plot(path("states.svg"), "state and estimate", "t [s]",
                    "state", t, s);
  }
  write_line_plot(path("state_error.svg"), "state estimation error", "t [s]",
                  "error norm", t,
                  {{"||x - est||", traj.col("xerr_norm"), false}});
  {
    std::vector<PlotSeries> s;
    for (const RowIdent& ri : rep.rows)
      s.push_back({"row " + std::to_string(ri.row),
                   diff("omega_hat" + sfx(ri.row), ri.omega_true), false});
    write_line_plot(path("omega_error.svg"), "frequency estimate error",
                    "t [s]", "rad/s", t, s);
  }
  {
    std::vector<PlotSeries> s;
    for (const RowIdent& ri : rep.rows) {
      s.push_back({"l1 row " + std::to_string(ri.row),
                   diff("l1_hat" + sfx(ri.row), ri.l1_true), false});
      s.push_back({"l2 row " + std::to_string(ri.row),
                   diff("l2_hat" + sfx(ri.row), ri.l2_true), true});
    }
    write_line_plot(path("amplitude_error.svg"), "amplitude estimate error",
                    "t [s]", "amplitude error", t, s);
  }
  {
    std::vector<PlotSeries> s;
    for (const RowIdent& ri : rep.rows) {
      s.push_back({"true row " + std::to_string(ri.row),
                   traj.col("theta_true" + std::to_string(ri.row)), false});
      s.push_back({"est row " + std::to_string(ri.row),
                   traj.col("theta_hat" + std::to_string(ri.row)), true});
    }
    write_line_plot(path("theta.svg"), "varying parameter and estimate",
                    "t [s]", "parameter", t, s);
  }
  {
    std::vector<PlotSeries> s;
    for (const RowIdent& ri : rep.rows) {
      const auto& tt = traj.col("theta_true" + std::to_string(ri.row));
      std::vector<double> d = traj.col("theta_hat" + std::to_string(ri.row));
      for (std::size_t k = 0; k < d.size(); ++k) d[k] -= tt[k];
      s.push_back({"row " + std::to_string(ri.row), std::move(d), false});
    }
    write_line_plot(path("theta_error.svg"), "parameter estimate error",
                    "t [s]", "parameter error", t, s);
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ScenarioResult res = execute_scenario(cfg);
  export_csv(export_view(res.traj, cfg), out_dir + "/trajectory.csv",
             cfg.decimate);
  {
    const std::string p = out_dir + "/report.txt";
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p + " for writing");
    f << format_report(res.report);
    if (!f) throw std::runtime_error("failed to write " + p);
  }
  emit_plots(res.traj, res.report, out_dir);
  return res;
}

int run_batch(const std::string& scenario_dir, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& ent : fs::directory_iterator(scenario_dir)) {
    if (ent.is_regular_file() && ent.path().extension() == ".scenario")
      files.push_back(ent.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    const ScenarioConfig cfg = load_config(p.string());
    run_scenario(cfg, out_dir + "/" + p.stem().string());
  }
  return static_cast<int>(files.size());
}

const char kReferenceScenario[] =
    R"(# Two-state system with one sinusoidal entry on the diagonal of row 1.
# The gains satisfy the algebraic matching conditions exactly.

[system]
n = 2
A0 = 0, 0.1 - 0.1*sin(t) + 0.1*sin(5*t) + 1.5*cos(5*t) ; -0.1, -1 + 0.5*cos(2*t)
B = -1 ; 4
C = 1, 1
theta1.row = 1
theta1.col = 1
theta1.omega = 3
theta1.l = 3, 0.5

[gains]
G = 1 ; 0
N = -4 ; 4
L = 0.1 ; 0.5
M = 0.1, 1 - 0.5*cos(2*t) ; -0.1, -1 + 0.5*cos(2*t)

[input]
u = sin(t) - 2

[sim]
dt = 0.001
horizon = 60
x0 = 2, -1
z0 = 0, 0

[estimator]
lambda = 2
gamma1 = 100
lambda1 = 10
lambda2 = 1
gamma2 = 1e-08
eps_div = 1e-06
T1 = 40
mode = replay

[output]
decimate = 10
)";

const char kTripleScenario[] =
    R"(# Three-state system; the varying entry sits below the diagonal
# (row 2, column 1), so identification runs through the swapping
# construction with x1 as pivot.

[system]
n = 3
A0 = -1, 0, 0 ; 0.5, -2, 0.3 ; 0, 0.2, -1.5
B = 1 ; 0.5 ; 0.3
C = 1, 1, 0
theta1.row = 2
theta1.col = 1
theta1.omega = 2
theta1.l = 1, -0.5

[gains]
G = 0 ; 1 ; 0
N = 1 ; -1 ; 0.3
L = 1 ; 2 ; 0
M = -1, 0, 0 ; 1, 0, 0 ; 0, 0.2, -1.5

[input]
u = 2 + sin(t)

[sim]
dt = 0.001
horizon = 40
x0 = 2, 1, 0.5
z0 = 0, 0, 0

[estimator]
lambda = 10
gamma1 = 10
lambda1 = 10
lambda2 = 1
gamma2 = 0.3
eps_div = 0.5
T1 = 25
mode = replay

[output]
decimate = 10
)";

}  // namespace tvobs
