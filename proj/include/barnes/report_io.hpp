#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "barnes/eval.hpp"
#include "barnes/meansquare.hpp"
#include "barnes/tilde.hpp"

namespace barnes {

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_number(double v);

nlohmann::json to_json(const EvalResult& result);
nlohmann::json to_json(const TildeResult& result);
nlohmann::json to_json(const MeanSquareTrace& trace);
nlohmann::json to_json(const VerificationReport& report);

/// CSV "T,I,evals". A non-null config is written first as a single
/// "# config: {...}" comment line.
void write_trace_csv(std::ostream& out, const MeanSquareTrace& trace, const nlohmann::json* config = nullptr);

}  // namespace barnes
