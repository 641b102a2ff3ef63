#include "camfis/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "camfis/error.hpp"

namespace camfis::harness {

Scale parse_scale(std::string_view name) {
  if (name == "paper") return Scale::paper;
  if (name == "desk") return Scale::desk;
  throw ConfigError("unknown scale '" + std::string(name) + "' (expected paper or desk)");
}

void CampaignConfig::validate() const {
  if (fidelities.size() < 2) throw ConfigError("config: need at least two surrogate fidelities");
  const int min_n = problem == ProblemKind::heat ? 4 : 6;
  for (int n : fidelities) {
    if (n < min_n) throw ConfigError("config: fidelity " + std::to_string(n) + " is below the minimum resolution");
  }
  if (high_fidelity < min_n) throw ConfigError("config: high_fidelity is below the minimum resolution");
  if (theta_truth.size() != kFieldSegments || prior_mean.size() != kFieldSegments) {
    throw ConfigError("config: theta_truth and prior_mean need 6 entries");
  }
  if (!(noise_variance > 0.0) || !(prior_variance > 0.0)) throw ConfigError("config: variances must be positive");
  if (pilot_m < 2 || pilot_trials < 1) throw ConfigError("config: pilot needs m >= 2 and n_trials >= 1");
  if (truth_m < 1 || truth_trials < 1) throw ConfigError("config: truth needs m >= 1 and n_trials >= 1");
  if (mse_trials < 1) throw ConfigError("config: mse needs n_trials >= 1");
  for (double eps : tolerances) {
    if (!(eps > 0.0)) throw ConfigError("config: tolerances must be positive");
  }
  if (!(f_sup_factor > 0.0)) throw ConfigError("config: f_sup_factor must be positive");
  if (baseline_fidelity != 0 && baseline_fidelity < min_n) throw ConfigError("config: baseline_fidelity too small");
  if (pinned_costs && (!(pinned_costs->high_fidelity_cost > 0.0) || pinned_costs->c0 < 0.0 || pinned_costs->c1 < 0.0)) {
    throw ConfigError("config: pinned costs need C > 0 and c0, c1 >= 0");
  }
  if (timing_evals < 1 || timing_repeats < 1) throw ConfigError("config: timing needs at least one evaluation");
  newton.validate();
}

CampaignConfig default_config(ProblemKind problem, Scale scale) {
  CampaignConfig c;
  c.problem = problem;
  c.theta_truth.assign(kFieldSegments, 1.0);
  c.prior_mean.assign(kFieldSegments, 1.0);
  if (problem == ProblemKind::heat) {
    c.noise_variance = 1e-5;
    c.prior_variance = 1e-1;
    if (scale == Scale::paper) {
      for (int n = 8; n <= 64; n += 4) c.fidelities.push_back(n);
      c.high_fidelity = 256;
      c.pilot_m = 1000;
      c.pilot_trials = 500;
      c.truth_m = 100000;
      c.truth_trials = 500;
      c.mse_trials = 1000;
      c.tolerances = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
    } else {
      c.fidelities = {8, 16, 32, 64};
      c.high_fidelity = 128;
      c.pilot_m = 500;
      c.pilot_trials = 50;
      c.truth_m = 10000;
      c.truth_trials = 50;
      c.mse_trials = 200;
      c.tolerances = {10.0, 1.0, 1e-1, 1e-2, 1e-3};
    }
  } else {
    c.noise_variance = 5.623e-4;
    c.prior_variance = 1.778e-2;
    if (scale == Scale::paper) {
      // h^-1 + 1 = 8, 12, ..., 64 grid points; the surrogate-alone baseline has 16.
      for (int points = 8; points <= 64; points += 4) c.fidelities.push_back(points - 1);
      c.high_fidelity = 255;
      c.baseline_fidelity = 15;
      c.pilot_m = 100000;
      c.pilot_trials = 100;
      c.truth_m = 100000;
      c.truth_trials = 100;
      c.mse_trials = 2500;
      c.tolerances = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
    } else {
      c.fidelities = {15, 23, 31, 47, 63};
      c.high_fidelity = 127;
      c.pilot_m = 10000;
      c.pilot_trials = 20;
      c.truth_m = 10000;
      c.truth_trials = 20;
      c.mse_trials = 200;
      c.tolerances = {10.0, 1.0, 1e-1, 1e-2, 1e-3};
    }
  }
  return c;
}

namespace {

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Document read_document(std::istream& in) {
  Document doc;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    doc[section][key] = trim(std::string_view(t).substr(eq + 1));
  }
  return doc;
}

std::vector<std::string> split_list(const std::string& s) {
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("config: '" + key + "' is not a number: " + s);
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config: '" + key + "' is not an integer: " + s);
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& s) {
  const long long v = to_integer(key, s);
  if (v < 0) throw ConfigError("config: '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(to_double(key, tok));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split_list(s)) out.push_back(static_cast<int>(to_integer(key, tok)));
  return out;
}

void apply_top_level(CampaignConfig& c, const Section& sec, bool allow_problem) {
  for (const auto& [key, value] : sec) {
    if (key == "problem") {
      if (!allow_problem) throw ConfigError("config: 'problem' is only allowed at top level");
      c.problem = parse_problem_kind(value);
    } else if (key == "fidelities") {
      c.fidelities = to_ints(key, value);
    } else if (key == "high_fidelity") {
      c.high_fidelity = static_cast<int>(to_integer(key, value));
    } else if (key == "theta_truth") {
      c.theta_truth = to_doubles(key, value);
    } else if (key == "noise_variance") {
      c.noise_variance = to_double(key, value);
    } else if (key == "prior_mean") {
      c.prior_mean = to_doubles(key, value);
    } else if (key == "prior_variance") {
      c.prior_variance = to_double(key, value);
    } else if (key == "tolerances") {
      c.tolerances = to_doubles(key, value);
    } else if (key == "f_sup_factor") {
      c.f_sup_factor = to_double(key, value);
    } else if (key == "baseline_fidelity") {
      c.baseline_fidelity = static_cast<int>(to_integer(key, value));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

void apply_counts(const Section& sec, const std::string& name, std::size_t* m, std::size_t* trials) {
  for (const auto& [key, value] : sec) {
    if (key == "m" && m != nullptr) {
      *m = to_count(name + "." + key, value);
    } else if (key == "n_trials") {
      *trials = to_count(name + "." + key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
    }
  }
}

}  // namespace

CampaignConfig parse_config(std::istream& in, const CampaignConfig& base) {
  const Document doc = read_document(in);
  CampaignConfig c = base;
  if (auto it = doc.find(""); it != doc.end()) apply_top_level(c, it->second, true);

  for (const auto& [name, sec] : doc) {
    if (name.empty()) continue;
    if (name == "heat" || name == "beam") {
      if (parse_problem_kind(name) == c.problem) apply_top_level(c, sec, false);
    } else if (name == "pilot") {
      apply_counts(sec, name, &c.pilot_m, &c.pilot_trials);
    } else if (name == "truth") {
      apply_counts(sec, name, &c.truth_m, &c.truth_trials);
    } else if (name == "mse") {
      apply_counts(sec, name, nullptr, &c.mse_trials);
    } else if (name == "newton") {
      for (const auto& [key, value] : sec) {
        if (key == "fd_step") {
          c.newton.fd_step = to_double(key, value);
        } else if (key == "relative_step") {
          c.newton.relative_step = to_integer(key, value) != 0;
        } else if (key == "grad_tol") {
          c.newton.grad_tol = to_double(key, value);
        } else if (key == "max_iter") {
          c.newton.max_iter = static_cast<int>(to_integer(key, value));
        } else if (key == "backtrack_factor") {
          c.newton.backtrack_factor = to_double(key, value);
        } else if (key == "max_backtracks") {
          c.newton.max_backtracks = static_cast<int>(to_integer(key, value));
        } else {
          throw ConfigError("config: unknown key '" + key + "' in [newton]");
        }
      }
    } else if (name == "costs") {
      PinnedCosts pc = c.pinned_costs.value_or(PinnedCosts{});
      for (const auto& [key, value] : sec) {
        if (key == "c0") {
          pc.c0 = to_double(key, value);
        } else if (key == "c1") {
          pc.c1 = to_double(key, value);
        } else if (key == "C") {
          pc.high_fidelity_cost = to_double(key, value);
        } else {
          throw ConfigError("config: unknown key '" + key + "' in [costs]");
        }
      }
      c.pinned_costs = pc;
    } else if (name == "run") {
      for (const auto& [key, value] : sec) {
        if (key == "threads") {
          c.threads = to_count(key, value);
        } else if (key == "timing_evals") {
          c.timing_evals = to_count(key, value);
        } else if (key == "timing_repeats") {
          c.timing_repeats = to_count(key, value);
        } else {
          throw ConfigError("config: unknown key '" + key + "' in [run]");
        }
      }
    } else {
      throw ConfigError("config: unknown section [" + name + "]");
    }
  }
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path, const CampaignConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, base);
}

std::optional<ProblemKind> peek_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  const Document doc = read_document(in);
  if (auto it = doc.find(""); it != doc.end()) {
    if (auto k = it->second.find("problem"); k != it->second.end()) return parse_problem_kind(k->second);
  }
  return std::nullopt;
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

}  // namespace

void write_config(std::ostream& out, const CampaignConfig& c) {
  out << std::setprecision(17);
  out << "problem = " << to_string(c.problem) << '\n'
      << "fidelities = " << join(c.fidelities) << '\n'
      << "high_fidelity = " << c.high_fidelity << '\n'
      << "theta_truth = " << join(c.theta_truth) << '\n'
      << "noise_variance = " << c.noise_variance << '\n'
      << "prior_mean = " << join(c.prior_mean) << '\n'
      << "prior_variance = " << c.prior_variance << '\n'
      << "tolerances = " << join(c.tolerances) << '\n'
      << "f_sup_factor = " << c.f_sup_factor << '\n'
      << "baseline_fidelity = " << c.baseline_fidelity << "\n\n"
      << "[pilot]\nm = " << c.pilot_m << "\nn_trials = " << c.pilot_trials << "\n\n"
      << "[truth]\nm = " << c.truth_m << "\nn_trials = " << c.truth_trials << "\n\n"
      << "[mse]\nn_trials = " << c.mse_trials << "\n\n"
      << "[newton]\nfd_step = " << c.newton.fd_step << "\nrelative_step = " << (c.newton.relative_step ? 1 : 0)
      << "\ngrad_tol = " << c.newton.grad_tol << "\nmax_iter = " << c.newton.max_iter
      << "\nbacktrack_factor = " << c.newton.backtrack_factor << "\nmax_backtracks = " << c.newton.max_backtracks
      << "\n\n";
  if (c.pinned_costs) {
    out << "[costs]\nc0 = " << c.pinned_costs->c0 << "\nc1 = " << c.pinned_costs->c1
        << "\nC = " << c.pinned_costs->high_fidelity_cost << "\n\n";
  }
  out << "[run]\nthreads = " << c.threads << "\ntiming_evals = " << c.timing_evals
      << "\ntiming_repeats = " << c.timing_repeats << '\n';
}

}  // namespace camfis::harness
