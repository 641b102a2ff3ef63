#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "camfis/harness/harness.hpp"

namespace camfis::harness {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

struct TradeoffRow {
  double epsilon = 0.0;
  int n_star = 0;
  std::uint64_t m_star = 0;
  double predicted_cost = 0.0;
};

std::vector<TradeoffRow> tradeoff_rows(std::span<const double> tolerances,
                                       std::span<const TradeoffSolution> solutions);

/// n,h,chi2_mean,chi2_std,M_h,fit_seconds,c_seconds
void write_pilot_csv(const std::filesystem::path& path, const PilotReport& report);
std::vector<PilotRow> read_pilot_csv(const std::filesystem::path& path);

/// K0_tilde,K1,c0,c1,C,M
void write_constants_csv(const std::filesystem::path& path, const PilotReport& report);
/// Fills error_model and cost_model of `report`; rows are left untouched.
void read_constants_csv(const std::filesystem::path& path, PilotReport& report);

/// epsilon,n_star,m_star,predicted_cost
void write_tradeoff_csv(const std::filesystem::path& path, std::span<const TradeoffRow> rows);
std::vector<TradeoffRow> read_tradeoff_csv(const std::filesystem::path& path);

/// epsilon,estimator,mse_hat,mean_cost_seconds,n_trials,seed
void write_mse_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> records);
/// Full record including n, m, truth and predicted cost.
void write_records_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);

/// mean,std_dev,n_samples,n_trials,seed
void write_truth_csv(const std::filesystem::path& path, const TruthEstimate& truth, std::size_t n_samples,
                     std::uint64_t seed);

/// Header plus rows of raw string cells. Throws on ragged rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace camfis::harness
