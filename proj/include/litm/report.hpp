#pragma once

#include <string>
#include <vector>

#include "litm/eval.hpp"

namespace litm {

struct MetricsRow {
  int epoch = 0;
  int iter = 0;
  std::string sampler;
  double lr = 0.0;
  std::vector<double> loss;
  double total = 0.0;
  std::vector<double> mean_dap, mean_dan, gap;
};

std::vector<MetricsRow> load_metrics(const std::string& path);

std::string eval_result_json(const EvalResult& res);
std::string eval_result_table(const EvalResult& res);
std::string cmc_csv(const EvalResult& res);

// Per-stage means over the last epoch plus headline totals.
std::string metrics_summary_table(const std::vector<MetricsRow>& rows);
// One CSV row per iteration for plotting.
std::string metrics_curves_csv(const std::vector<MetricsRow>& rows);

}  // namespace litm
