#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "semorder/dictionary.hpp"
#include "semorder/misspec.hpp"
#include "semorder/order.hpp"
#include "semorder/rates.hpp"
#include "semorder/regress.hpp"
#include "semorder/semgen.hpp"

namespace semorder::io {

using Json = nlohmann::json;

// Variables and positions are 1-based in every external format.

Dictionary dictionary_from_json(const Json& j);
Json to_json(const Dictionary& dict);

/// {"dictionary": {...}, "kind": "span"|"l1", "M": m, "intercept": bool}
ClassSpec class_from_json(const Json& j);
Json to_json(const ClassSpec& cls);

EdgeFunction edge_function_from_json(const std::string& kind, const Json& params);
Json edge_params_to_json(const EdgeFunction& fn);

/// {"p", "order", "edges": [{"from", "to", "kind", "params"}], "noise_sd"}; validated.
SemSpec sem_from_json(const Json& j);
Json to_json(const SemSpec& spec);

Json to_json(const OrderEstimate& est);
Json to_json(const GapReport& report, bool include_table = true);
Json to_json(const std::vector<ConsistencyRow>& rows);
Json to_json(const MisspecReport& report);
Json to_json(const RateReport& report);
Json to_json(const TradeoffReport& report);

/// Headered CSV, columns x1..xp, 17 significant digits, LF line endings.
void write_csv(std::ostream& out, const DataMatrix& data);
std::string to_csv(const DataMatrix& data);
DataMatrix read_csv(std::istream& in);
DataMatrix read_csv_file(const std::string& path);

/// Long format: n,rep,metric,value
std::string misspec_csv(const MisspecReport& report);
/// One row per cell: case,n,p,N,M,reps,reps_used,mean,sd,q90,degenerate,seed
std::string rate_csv(const RateReport& report);

/// Shortest decimal form that is stable across runs ("%.17g").
std::string format_double(double value);

}  // namespace semorder::io
