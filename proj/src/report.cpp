#include "litm/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "jsonutil.hpp"

namespace litm {

std::vector<MetricsRow> load_metrics(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open metrics log: " + path);

  std::vector<MetricsRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::inconsistent,
           "metrics line " + std::to_string(lineno) + ": " + e.what());
    }
    MetricsRow row;
    detail::StrictObject o(j, "metrics line " + std::to_string(lineno),
                           ErrorCode::inconsistent);
    o.get_int("epoch", row.epoch);
    o.get_int("iter", row.iter);
    o.get_string("sampler", row.sampler);
    o.get_double("lr", row.lr);
    o.get_double_array("loss", row.loss);
    o.get_double("total", row.total);
    o.get_double_array("mean_dap", row.mean_dap);
    o.get_double_array("mean_dan", row.mean_dan);
    o.get_double_array("gap", row.gap);
    o.finish();
    if (row.loss.empty() || row.loss.size() != row.mean_dap.size() ||
        row.loss.size() != row.mean_dan.size() || row.loss.size() != row.gap.size())
      fail(ErrorCode::inconsistent,
           "metrics line " + std::to_string(lineno) + ": uneven stage arrays");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::truncated, "metrics log has no rows");
  return rows;
}

std::string eval_result_json(const EvalResult& res) {
  nlohmann::ordered_json j;
  j["stage"] = res.stage;
  j["n_queries"] = res.n_queries;
  j["n_gallery"] = res.n_gallery;
  j["map"] = res.report.map;
  j["cmc"] = res.report.cmc;
  auto& stats = j["pair_stats"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < res.pair_stats.size(); ++s) {
    nlohmann::ordered_json e;
    e["stage"] = s;
    e["mean_dap"] = res.pair_stats[s].mean_dap;
    e["mean_dan"] = res.pair_stats[s].mean_dan;
    e["gap"] = res.pair_stats[s].gap;
    stats.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string eval_result_table(const EvalResult& res) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "ranking stage: " << res.stage << "   queries: " << res.n_queries
     << "   gallery: " << res.n_gallery << '\n';
  os << "mAP: " << res.report.map << '\n';
  os << "CMC:";
  for (std::size_t k = 0; k < res.report.cmc.size(); ++k)
    os << "  @" << (k + 1) << " " << res.report.cmc[k];
  os << '\n';
  os << '\n';
  os << "stage  mean_d_ap   mean_d_an   gap\n";
  for (std::size_t s = 0; s < res.pair_stats.size(); ++s)
    os << std::left << std::setw(7) << s << std::setw(12) << res.pair_stats[s].mean_dap
       << std::setw(12) << res.pair_stats[s].mean_dan << res.pair_stats[s].gap << '\n';
  return os.str();
}

std::string cmc_csv(const EvalResult& res) {
  std::ostringstream os;
  os << "k,cmc\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < res.report.cmc.size(); ++k)
    os << (k + 1) << ',' << res.report.cmc[k] << '\n';
  return os.str();
}

std::string metrics_summary_table(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "summary: no metrics rows");
  const std::size_t stages = rows[0].loss.size();
  for (const auto& r : rows)
    if (r.loss.size() != stages)
      fail(ErrorCode::inconsistent, "summary: stage count changes across rows");

  const int last_epoch = rows.back().epoch;
  std::vector<double> loss(stages, 0.0), dap(stages, 0.0), dan(stages, 0.0);
  int n = 0;
  for (const auto& r : rows) {
    if (r.epoch != last_epoch) continue;
    ++n;
    for (std::size_t s = 0; s < stages; ++s) {
      loss[s] += r.loss[s];
      dap[s] += r.mean_dap[s];
      dan[s] += r.mean_dan[s];
    }
  }

  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "iterations: " << rows.size() << "   first total: " << rows.front().total
     << "   last total: " << rows.back().total << '\n';
  os << "last epoch (" << last_epoch << ") means over " << n << " iterations:\n";
  os << "stage  loss        mean_d_ap   mean_d_an   gap\n";
  for (std::size_t s = 0; s < stages; ++s) {
    const double mdap = dap[s] / n, mdan = dan[s] / n;
    os << std::left << std::setw(7) << s << std::setw(12) << loss[s] / n << std::setw(12)
       << mdap << std::setw(12) << mdan << (mdan - mdap) << '\n';
  }
  return os.str();
}

std::string metrics_curves_csv(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "curves: no metrics rows");
  const std::size_t stages = rows[0].loss.size();
  std::ostringstream os;
  os << "epoch,iter,sampler,lr,total";
  for (std::size_t s = 0; s < stages; ++s) os << ",loss_" << s;
  for (std::size_t s = 0; s < stages; ++s) os << ",mean_dap_" << s;
  for (std::size_t s = 0; s < stages; ++s) os << ",mean_dan_" << s;
  for (std::size_t s = 0; s < stages; ++s) os << ",gap_" << s;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    if (r.loss.size() != stages)
      fail(ErrorCode::inconsistent, "curves: stage count changes across rows");
    os << r.epoch << ',' << r.iter << ',' << r.sampler << ',' << r.lr << ',' << r.total;
    for (double v : r.loss) os << ',' << v;
    for (double v : r.mean_dap) os << ',' << v;
    for (double v : r.mean_dan) os << ',' << v;
    for (double v : r.gap) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace litm
