#include "camfis/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "camfis/error.hpp"

namespace camfis::harness {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("bad numeric CSV cell '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  // from_chars rejects "inf"/"nan" spellings produced by to_chars only in some
  // library versions; handle them explicitly.
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return parse_number<double>(s);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, ptr);
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error("CSV column '" + std::string(name) + "' missing");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty CSV");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) throw Error(path.string() + ": ragged CSV row");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<TradeoffRow> tradeoff_rows(std::span<const double> tolerances,
                                       std::span<const TradeoffSolution> solutions) {
  if (tolerances.size() != solutions.size()) throw DimensionError("tradeoff_rows: size mismatch");
  std::vector<TradeoffRow> rows;
  for (std::size_t i = 0; i < tolerances.size(); ++i) {
    rows.push_back({tolerances[i], static_cast<int>(std::lround(1.0 / solutions[i].h_star)), solutions[i].m_star,
                    solutions[i].predicted_cost});
  }
  return rows;
}

void write_pilot_csv(const std::filesystem::path& path, const PilotReport& report) {
  auto out = open_out(path);
  out << "n,h,chi2_mean,chi2_std,M_h,fit_seconds,c_seconds\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << format_double(r.h) << ',' << format_double(r.chi2_mean) << ','
        << format_double(r.chi2_std) << ',' << r.laplace_evals << ',' << format_double(r.fit_seconds) << ','
        << format_double(r.eval_seconds) << '\n';
  }
}

std::vector<PilotRow> read_pilot_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t cn = t.column("n"), ch = t.column("h"), cm = t.column("chi2_mean"), cs = t.column("chi2_std"),
                    cM = t.column("M_h"), cf = t.column("fit_seconds"), cc = t.column("c_seconds");
  std::vector<PilotRow> rows;
  for (const auto& r : t.rows) {
    rows.push_back({parse_number<int>(r[cn]), parse_double(r[ch]), parse_double(r[cm]), parse_double(r[cs]),
                    parse_number<std::uint64_t>(r[cM]), parse_double(r[cf]), parse_double(r[cc])});
  }
  return rows;
}

void write_constants_csv(const std::filesystem::path& path, const PilotReport& report) {
  auto out = open_out(path);
  const auto& em = report.error_model;
  const auto& cm = report.cost_model;
  out << "K0_tilde,K1,c0,c1,C,M\n"
      << format_double(em.k0_tilde) << ',' << format_double(em.k1) << ',' << format_double(cm.c0) << ','
      << format_double(cm.c1) << ',' << format_double(cm.high_fidelity_cost) << ',' << cm.training_evals << '\n';
}

void read_constants_csv(const std::filesystem::path& path, PilotReport& report) {
  const CsvTable t = read_csv(path);
  if (t.rows.size() != 1) throw Error(path.string() + ": expected one row of constants");
  const auto& r = t.rows.front();
  report.error_model = ErrorModel{};
  report.error_model.k0_tilde = parse_double(r[t.column("K0_tilde")]);
  report.error_model.k1 = parse_double(r[t.column("K1")]);
  report.cost_model.c0 = parse_double(r[t.column("c0")]);
  report.cost_model.c1 = parse_double(r[t.column("c1")]);
  report.cost_model.high_fidelity_cost = parse_double(r[t.column("C")]);
  report.cost_model.training_evals = parse_number<std::uint64_t>(r[t.column("M")]);
}

void write_tradeoff_csv(const std::filesystem::path& path, std::span<const TradeoffRow> rows) {
  auto out = open_out(path);
  out << "epsilon,n_star,m_star,predicted_cost\n";
  for (const auto& r : rows)
    out << format_double(r.epsilon) << ',' << r.n_star << ',' << r.m_star << ',' << format_double(r.predicted_cost)
        << '\n';
}

std::vector<TradeoffRow> read_tradeoff_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ce = t.column("epsilon"), cn = t.column("n_star"), cm = t.column("m_star"),
                    cp = t.column("predicted_cost");
  std::vector<TradeoffRow> rows;
  for (const auto& r : t.rows)
    rows.push_back({parse_double(r[ce]), parse_number<int>(r[cn]), parse_number<std::uint64_t>(r[cm]),
                    parse_double(r[cp])});
  return rows;
}

void write_mse_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> records) {
  auto out = open_out(path);
  out << "epsilon,estimator,mse_hat,mean_cost_seconds,n_trials,seed\n";
  for (const auto& r : records)
    out << format_double(r.epsilon) << ',' << to_string(r.estimator) << ',' << format_double(r.mse_hat) << ','
        << format_double(r.mean_cost_seconds) << ',' << r.n_trials << ',' << r.seed << '\n';
}

void write_records_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> records) {
  auto out = open_out(path);
  out << "epsilon,estimator,n,m,truth,mse_hat,mean_cost_seconds,predicted_cost,n_trials,seed\n";
  for (const auto& r : records)
    out << format_double(r.epsilon) << ',' << to_string(r.estimator) << ',' << r.n << ',' << r.m << ','
        << format_double(r.truth) << ',' << format_double(r.mse_hat) << ',' << format_double(r.mean_cost_seconds)
        << ',' << format_double(r.predicted_cost) << ',' << r.n_trials << ',' << r.seed << '\n';
}

std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  std::vector<ExperimentRecord> out;
  for (const auto& r : t.rows) {
    ExperimentRecord rec;
    rec.epsilon = parse_double(r[t.column("epsilon")]);
    rec.estimator = parse_estimator(r[t.column("estimator")]);
    rec.n = parse_number<int>(r[t.column("n")]);
    rec.m = parse_number<std::uint64_t>(r[t.column("m")]);
    rec.truth = parse_double(r[t.column("truth")]);
    rec.mse_hat = parse_double(r[t.column("mse_hat")]);
    rec.mean_cost_seconds = parse_double(r[t.column("mean_cost_seconds")]);
    rec.predicted_cost = parse_double(r[t.column("predicted_cost")]);
    rec.n_trials = parse_number<std::size_t>(r[t.column("n_trials")]);
    rec.seed = parse_number<std::uint64_t>(r[t.column("seed")]);
    out.push_back(rec);
  }
  return out;
}

void write_truth_csv(const std::filesystem::path& path, const TruthEstimate& truth, std::size_t n_samples,
                     std::uint64_t seed) {
  auto out = open_out(path);
  out << "mean,std_dev,n_samples,n_trials,seed\n"
      << format_double(truth.mean) << ',' << format_double(truth.std_dev) << ',' << n_samples << ','
      << truth.runs.size() << ',' << seed << '\n';
}

}  // namespace camfis::harness
