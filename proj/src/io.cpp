#include "semorder/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semorder/errors.hpp"

namespace semorder::io {

namespace {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T optional(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("field '") + key + "': " + e.what());
  }
}

/// NaN and infinities become null (JSON has no encoding for them).
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<int> one_based(const std::vector<int>& zero_based) {
  std::vector<int> out;
  for (int v : zero_based) out.push_back(v + 1);
  return out;
}

Json summary_json(const Summary& s) {
  return {{"mean", number(s.mean)}, {"sd", number(s.sd)}, {"se", number(s.se)}, {"q90", number(s.q90)}, {"count", s.count}};
}

Json slope_json(const SlopeFit& s) {
  return {{"slope", number(s.slope)}, {"intercept", number(s.intercept)}, {"slope_se", number(s.slope_se)},
          {"r_squared", number(s.r_squared)}};
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Dictionary dictionary_from_json(const Json& j) {
  const auto family = basis_family_from_string(required<std::string>(j, "family"));
  const int size = required<int>(j, "size");
  const auto domain = required<std::vector<double>>(j, "domain");
  if (domain.size() != 2) throw UsageError("dictionary domain must be [a, b]");
  return Dictionary(family, size, domain[0], domain[1]);
}

Json to_json(const Dictionary& dict) {
  return {{"family", to_string(dict.family())},
          {"size", dict.size()},
          {"domain", {dict.lower(), dict.upper()}},
          {"sup_bound", dict.sup_bound()}};
}

ClassSpec class_from_json(const Json& j) {
  ClassSpec cls{dictionary_from_json(required<Json>(j, "dictionary"))};
  const auto kind = optional<std::string>(j, "kind", "span");
  if (kind == "span")
    cls.kind = ClassKind::Span;
  else if (kind == "l1")
    cls.kind = ClassKind::L1;
  else
    throw UsageError("class kind must be 'span' or 'l1'");
  cls.budget = optional<double>(j, "M", 1.0);
  cls.intercept = optional<bool>(j, "intercept", true);
  cls.validate();
  return cls;
}

Json to_json(const ClassSpec& cls) {
  Json j = {{"dictionary", to_json(cls.dict)}, {"kind", to_string(cls.kind)}, {"intercept", cls.intercept}};
  if (cls.kind == ClassKind::L1) j["M"] = cls.budget;
  return j;
}

EdgeFunction edge_function_from_json(const std::string& kind, const Json& params) {
  if (kind == "sine")
    return EdgeFunction(edge::Sine{optional<double>(params, "amplitude", 1.0), optional<double>(params, "frequency", 1.0)});
  if (kind == "cubic") return EdgeFunction(edge::Cubic{optional<double>(params, "scale", 1.0)});
  if (kind == "tanh") return EdgeFunction(edge::Tanh{optional<double>(params, "scale", 1.0)});
  if (kind == "linear") return EdgeFunction(edge::Linear{optional<double>(params, "slope", 1.0)});
  if (kind == "dictionary-combination") {
    const auto coefficients = required<std::vector<double>>(params, "coefficients");
    return EdgeFunction(edge::DictionaryCombination{
        dictionary_from_json(required<Json>(params, "dictionary")),
        Eigen::Map<const Vector>(coefficients.data(), static_cast<Index>(coefficients.size()))});
  }
  throw UsageError("unknown edge kind '" + kind + "'");
}

Json edge_params_to_json(const EdgeFunction& fn) {
  const auto& k = fn.kind();
  if (const auto* s = std::get_if<edge::Sine>(&k)) return {{"amplitude", s->amplitude}, {"frequency", s->frequency}};
  if (const auto* c = std::get_if<edge::Cubic>(&k)) return {{"scale", c->scale}};
  if (const auto* t = std::get_if<edge::Tanh>(&k)) return {{"scale", t->scale}};
  if (const auto* l = std::get_if<edge::Linear>(&k)) return {{"slope", l->slope}};
  const auto& d = std::get<edge::DictionaryCombination>(k);
  return {{"dictionary", to_json(d.dict)},
          {"coefficients", std::vector<double>(d.coefficients.data(), d.coefficients.data() + d.coefficients.size())}};
}

SemSpec sem_from_json(const Json& j) {
  SemSpec spec;
  spec.p = required<int>(j, "p");
  if (spec.p < 1) throw UsageError("SEM needs p >= 1");
  if (j.contains("order")) {
    for (int v : required<std::vector<int>>(j, "order")) spec.order.push_back(v - 1);
  } else {
    for (int v = 0; v < spec.p; ++v) spec.order.push_back(v);
  }
  spec.noise_sd = required<std::vector<double>>(j, "noise_sd");
  for (const auto& e : optional<Json>(j, "edges", Json::array())) {
    const int from = required<int>(e, "from");
    const int to = required<int>(e, "to");
    const auto kind = required<std::string>(e, "kind");
    spec.edges.push_back(Edge{from - 1, to - 1, edge_function_from_json(kind, optional<Json>(e, "params", Json::object()))});
  }
  spec.validate();
  return spec;
}

Json to_json(const SemSpec& spec) {
  Json edges = Json::array();
  for (const auto& e : spec.edges)
    edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"kind", e.fn.name()}, {"params", edge_params_to_json(e.fn)}});
  return {{"p", spec.p}, {"order", one_based(spec.order)}, {"edges", edges}, {"noise_sd", spec.noise_sd}};
}

Json to_json(const OrderEstimate& est) {
  Json sigma = Json::array();
  for (double s : est.sigma_hat) sigma.push_back(number(s));
  return {{"order", one_based(est.order)},
          {"sigma_hat", sigma},
          {"score", number(est.score)},
          {"method", to_string(est.method)},
          {"floored_positions", one_based(est.floored_positions)},
          {"degenerate_positions", one_based(est.degenerate_positions)}};
}

Json to_json(const GapReport& report, bool include_table) {
  Json j = {{"xi", number(report.xi)},
            {"xi_is_infinite", std::isinf(report.xi)},
            {"mc_se", number(report.mc_se)},
            {"argmin", one_based(report.argmin)},
            {"batches", report.batches}};
  if (include_table) {
    Json table = Json::array();
    for (const auto& row : report.table) {
      Json sigma = Json::array();
      for (double s : row.sigma2) sigma.push_back(number(s));
      table.push_back({{"perm", one_based(row.perm)}, {"topological", row.topological}, {"gap", number(row.gap)}, {"sigma2", sigma}});
    }
    j["table"] = table;
  }
  return j;
}

Json to_json(const std::vector<ConsistencyRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n},
                   {"reps", r.reps},
                   {"recovered", r.recovered},
                   {"frequency", number(r.frequency)},
                   {"binomial_se", number(r.binomial_se)},
                   {"mean_score_gap", number(r.mean_score_gap)}});
  return out;
}

Json to_json(const MisspecReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells)
    cells.push_back({{"n", c.n},
                     {"reps", c.reps},
                     {"mean_dist", number(c.distance.mean)},
                     {"q90", number(c.distance.q90)},
                     {"distance", summary_json(c.distance)},
                     {"excess_risk", summary_json(c.excess_risk)},
                     {"ratio_to_delta_n", summary_json(c.ratio)},
                     {"delta_n", number(c.delta_n)},
                     {"degenerate_fits", c.degenerate}});
  const auto& o = report.oracle;
  return {{"cells", cells},
          {"slope", number(report.slope.slope)},
          {"slope_fit", slope_json(report.slope)},
          {"oracle",
           {{"oracle_n", o.oracle_n},
            {"lambda_min", number(o.lambda_min)},
            {"k_x", number(o.k_x)},
            {"risk_star", number(o.risk_star)},
            {"singular", o.singular},
            {"beta_star", std::vector<double>(o.beta_star.data(), o.beta_star.data() + o.beta_star.size())}}},
          {"note", "rates up to universal constants"}};
}

Json to_json(const RateReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells)
    cells.push_back({{"n", c.n},
                     {"p", c.p},
                     {"N", c.dict_size},
                     {"M", c.budget},
                     {"seed", c.seed},
                     {"reps", c.reps},
                     {"reps_used", c.reps_used},
                     {"degenerate", c.degenerate},
                     {"z", summary_json(c.z)}});
  Json slopes = Json::array();
  for (const auto& s : report.slopes) {
    Json entry = slope_json(s.fit);
    entry["p"] = s.p;
    entry["N"] = s.dict_size;
    entry["M"] = s.budget;
    entry["theoretical_slope"] = s.theoretical;
    slopes.push_back(entry);
  }
  return {{"case", to_string(report.rate_case)}, {"cells", cells}, {"slopes", slopes}};
}

Json to_json(const TradeoffReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back({{"N", r.dict_size}, {"z_mean", number(r.z_mean)}, {"bias", number(r.bias)}});
  return {{"case", "case5"},
          {"alpha", report.alpha},
          {"n", report.n},
          {"p", report.p},
          {"rows", rows},
          {"crossing_N", report.crossing_size > 0 ? Json(report.crossing_size) : Json(nullptr)}};
}

void write_csv(std::ostream& out, const DataMatrix& data) {
  for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << format_double(data.values(i, j));
    out << '\n';
  }
}

std::string to_csv(const DataMatrix& data) {
  std::ostringstream out;
  write_csv(out, data);
  return out.str();
}

DataMatrix read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Index p = 1;
  for (char c : line) p += c == ',' ? 1 : 0;
  if (line.empty()) throw UsageError("CSV header is empty");

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* cursor = line.data();
    const char* end = line.data() + line.size();
    for (Index j = 0; j < p; ++j) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(cursor, end, v);
      if (ec != std::errc()) throw UsageError("CSV row " + std::to_string(rows + 1) + ": bad number");
      values.push_back(v);
      cursor = next;
      if (j + 1 < p) {
        if (cursor == end || *cursor != ',') throw UsageError("CSV row " + std::to_string(rows + 1) + ": too few fields");
        ++cursor;
      }
    }
    if (cursor != end) throw UsageError("CSV row " + std::to_string(rows + 1) + ": too many fields");
    ++rows;
  }
  if (rows == 0) throw UsageError("CSV has no data rows");
  DataMatrix data;
  data.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), rows, p);
  return data;
}

DataMatrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open data file '" + path + "'");
  return read_csv(in);
}

std::string misspec_csv(const MisspecReport& report) {
  std::ostringstream out;
  out << "n,rep,metric,value\n";
  for (const auto& c : report.cells) {
    for (std::size_t r = 0; r < c.distances.size(); ++r) {
      out << c.n << ',' << r << ",distance," << format_double(c.distances[r]) << '\n';
      out << c.n << ',' << r << ",excess_risk," << format_double(c.excess_risks[r]) << '\n';
      out << c.n << ',' << r << ",ratio_to_delta_n," << format_double(c.distances[r] / c.delta_n) << '\n';
    }
  }
  return out.str();
}

std::string rate_csv(const RateReport& report) {
  std::ostringstream out;
  out << "case,n,p,N,M,reps,reps_used,mean,sd,q90,degenerate,seed\n";
  for (const auto& c : report.cells) {
    out << to_string(report.rate_case) << ',' << c.n << ',' << c.p << ',' << c.dict_size << ',' << format_double(c.budget)
        << ',' << c.reps << ',' << c.reps_used << ',' << format_double(c.z.mean) << ',' << format_double(c.z.sd) << ','
        << format_double(c.z.q90) << ',' << (c.degenerate ? 1 : 0) << ',' << c.seed << '\n';
  }
  out << "\nslope_p,slope_N,slope_M,slope,slope_se,r_squared,theoretical\n";
  for (const auto& s : report.slopes)
    out << s.p << ',' << s.dict_size << ',' << format_double(s.budget) << ',' << format_double(s.fit.slope) << ','
        << format_double(s.fit.slope_se) << ',' << format_double(s.fit.r_squared) << ',' << format_double(s.theoretical)
        << '\n';
  return out.str();
}

}  // namespace semorder::io
