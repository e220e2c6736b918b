#include "episim/analytics.hpp"

#include <iomanip>

namespace episim {

void write_report_csv(std::ostream& os, const ScalingReport& rep) {
  const auto old = os.precision(17);
  os << "n,mean,std,d10,d20,d30,d40,d50,d60,d70,d80,d90\n";
  for (const auto& r : rep.rows) {
    os << r.n << ',' << r.mean << ',' << r.std;
    for (double d : r.deciles) os << ',' << d;
    os << '\n';
  }
  os.precision(old);
}

void write_gnuplot(std::ostream& os, const ScalingReport& rep) {
  const auto old = os.precision(17);
  os << "# n " << (rep.correction == LogCorrection::none ? "mean_T" : "mean_T_over_ln_n") << '\n';
  for (const auto& r : rep.rows)
    os << r.n << ' ' << log_corrected(r.mean, static_cast<double>(r.n), rep.correction) << '\n';
  os.precision(old);
}

nlohmann::json fit_json(const std::optional<ExponentFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},
          {"intercept", f->intercept},
          {"stderr", f->slope_stderr},
          {"ci95", {f->ci_low, f->ci_high}}};
}

nlohmann::json report_json(const ScalingReport& rep, const nlohmann::json& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"n", r.n}, {"nodes", r.nodes}, {"mean", r.mean}, {"std", r.std}, {"seconds", r.seconds}});
  return {{"log_correction", rep.correction == LogCorrection::none ? "none" : "divide_by_log_n"},
          {"exponent", fit_json(rep.fit)},
          {"exponent_raw", fit_json(rep.fit_raw)},
          {"exponent_corrected", fit_json(rep.fit_corrected)},
          {"rows", rows},
          {"incomplete", rep.incomplete},
          {"incomplete_reason", rep.incomplete_reason},
          {"master_seed", std::to_string(rep.master_seed)},
          {"seconds", rep.seconds},
          {"config", config}};
}

nlohmann::json verdict_json(const DominanceVerdict& v) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& d : v.deciles)
    rows.push_back({{"q", d.q}, {"a", d.quantile_a}, {"b", d.quantile_b}, {"diff", d.difference},
                    {"upper_bound", d.upper_bound}});
  return {{"verdict", v.label()}, {"consistent", v.consistent}, {"deciles", rows}};
}

}  // namespace episim
