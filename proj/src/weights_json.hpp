#ifndef LOREMBED_WEIGHTS_JSON_HPP
#define LOREMBED_WEIGHTS_JSON_HPP

#include "json.hpp"
#include "weights.hpp"

namespace lorembed {

/// Weight JSON schema:
///   {"type":"power","c":1.0,"alpha":0.0}
///   {"type":"powerlog","c":1.0,"alpha":0.0,"beta":1.0}
///   {"type":"endpower","c":1.0,"alpha":-1.0}
///   {"type":"endpowerlog","c":1.0,"alpha":-1.0,"beta":1.0}
///   {"type":"piecewise","breaks":[0.5],"pieces":[<single-piece objects>]}
/// "c" defaults to 1, "alpha" and "beta" to 0.  L comes from the enclosing
/// scenario.  Custom weights have no JSON form.
WeightSpec weight_from_json(const nlohmann::json& j, double L);
nlohmann::json weight_to_json(const WeightSpec& w);

}  // namespace lorembed

#endif
