#include "mulab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "mulab/errors.hpp"
#include "mulab/eval.hpp"

namespace mulab {

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

auto row_key(const ReportRow& r) {
  return std::tie(r.dataset, r.method, r.policy, r.forget_mode,
                  r.forget_parameter, r.seed);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.front() == ' ') field.erase(0, 1);
    fields.push_back(field);
  }
  return fields;
}

double parse_number(const std::string& field, size_t line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw FormatError("report line " + std::to_string(line_no) +
                      ": not a number: " + field);
  }
}

// Sample standard deviation (n - 1); zero for a single value.
double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double sum_sq = 0;
  for (double v : values) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string report_csv_header() {
  return "dataset, method, policy, forget mode, forget parameter, seed, UA, "
         "RA, TA, MIA, RTE, gap_UA, gap_RA, gap_TA, gap_MIA, AG, gap_mode";
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              return row_key(a) < row_key(b);
            });
}

std::string report_to_csv(std::vector<ReportRow> rows) {
  if (rows.empty()) throw InputError("report has no rows");
  sort_rows(rows);
  std::string out = report_csv_header();
  out += "\n";
  for (const ReportRow& r : rows) {
    out += r.dataset + ", " + r.method + ", " + r.policy + ", " +
           r.forget_mode + ", " + fixed4(r.forget_parameter) + ", " +
           std::to_string(r.seed) + ", " + fixed4(r.ua) + ", " +
           fixed4(r.ra) + ", " + fixed4(r.ta) + ", " + fixed4(r.mia) + ", " +
           fixed4(r.rte) + ", " + fixed4(r.gap_ua) + ", " + fixed4(r.gap_ra) +
           ", " + fixed4(r.gap_ta) + ", " + fixed4(r.gap_mia) + ", " +
           fixed4(r.ag) + ", " + r.gap_mode + "\n";
  }
  return out;
}

nlohmann::ordered_json report_to_json(std::vector<ReportRow> rows) {
  if (rows.empty()) throw InputError("report has no rows");
  sort_rows(rows);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json o;
    o["dataset"] = r.dataset;
    o["method"] = r.method;
    o["policy"] = r.policy;
    o["forget_mode"] = r.forget_mode;
    o["forget_parameter"] = r.forget_parameter;
    o["seed"] = r.seed;
    o["UA"] = r.ua;
    o["RA"] = r.ra;
    o["TA"] = r.ta;
    o["MIA"] = r.mia;
    o["RTE"] = r.rte;
    o["gap_UA"] = r.gap_ua;
    o["gap_RA"] = r.gap_ra;
    o["gap_TA"] = r.gap_ta;
    o["gap_MIA"] = r.gap_mia;
    o["AG"] = r.ag;
    o["gap_mode"] = r.gap_mode;
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("report is empty");
  if (line == report_csv_header() + "\r") line.pop_back();
  if (line != report_csv_header())
    throw FormatError("report header mismatch");

  std::vector<ReportRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 17)
      throw FormatError("report line " + std::to_string(line_no) +
                        ": expected 17 fields, got " +
                        std::to_string(f.size()));
    ReportRow r;
    r.dataset = f[0];
    r.method = f[1];
    r.policy = f[2];
    r.forget_mode = f[3];
    r.forget_parameter = parse_number(f[4], line_no);
    r.seed = static_cast<uint64_t>(
        std::llround(parse_number(f[5], line_no)));
    r.ua = parse_number(f[6], line_no);
    r.ra = parse_number(f[7], line_no);
    r.ta = parse_number(f[8], line_no);
    r.mia = parse_number(f[9], line_no);
    r.rte = parse_number(f[10], line_no);
    r.gap_ua = parse_number(f[11], line_no);
    r.gap_ra = parse_number(f[12], line_no);
    r.gap_ta = parse_number(f[13], line_no);
    r.gap_mia = parse_number(f[14], line_no);
    r.ag = parse_number(f[15], line_no);
    r.gap_mode = f[16];
    try {
      gap_mode_from_name(r.gap_mode);
    } catch (const InputError&) {
      throw FormatError("report line " + std::to_string(line_no) +
                        ": unknown gap mode: " + r.gap_mode);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw InputError("report has no rows");
  using GroupKey =
      std::tuple<std::string, std::string, std::string, std::string, double>;
  std::map<GroupKey, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rows)
    groups[{r.dataset, r.method, r.policy, r.forget_mode, r.forget_parameter}]
        .push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    std::tie(a.dataset, a.method, a.policy, a.forget_mode,
             a.forget_parameter) = key;
    a.n = static_cast<int>(members.size());
    auto stat = [&members](double ReportRow::* field, double& mean,
                           double& sd) {
      std::vector<double> values;
      values.reserve(members.size());
      for (const ReportRow* r : members) values.push_back(r->*field);
      double sum = 0;
      for (double v : values) sum += v;
      mean = sum / static_cast<double>(values.size());
      sd = sample_std(values, mean);
    };
    stat(&ReportRow::ua, a.ua_mean, a.ua_std);
    stat(&ReportRow::ra, a.ra_mean, a.ra_std);
    stat(&ReportRow::ta, a.ta_mean, a.ta_std);
    stat(&ReportRow::mia, a.mia_mean, a.mia_std);
    stat(&ReportRow::rte, a.rte_mean, a.rte_std);
    stat(&ReportRow::ag, a.ag_mean, a.ag_std);
    out.push_back(std::move(a));
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<ReportRow>& rows) {
  std::vector<AggregateRow> aggs = aggregate_rows(rows);
  std::string out =
      "dataset, method, policy, forget mode, forget parameter, n, UA, RA, "
      "TA, MIA, RTE, AG";
  out += "\n";
  auto pm = [](double mean, double sd) {
    return fixed4(mean) + " ± " + fixed4(sd);
  };
  for (const AggregateRow& a : aggs) {
    out += a.dataset + ", " + a.method + ", " + a.policy + ", " +
           a.forget_mode + ", " + fixed4(a.forget_parameter) + ", " +
           std::to_string(a.n) + ", " + pm(a.ua_mean, a.ua_std) + ", " +
           pm(a.ra_mean, a.ra_std) + ", " + pm(a.ta_mean, a.ta_std) + ", " +
           pm(a.mia_mean, a.mia_std) + ", " + pm(a.rte_mean, a.rte_std) +
           ", " + pm(a.ag_mean, a.ag_std) + "\n";
  }
  return out;
}

}  // namespace mulab
