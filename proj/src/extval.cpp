#include "extval.hpp"

#include <atomic>

namespace lorembed {

namespace {
std::atomic<double> g_cap{1e300};
}

double ext_cap() { return g_cap.load(std::memory_order_relaxed); }
void set_ext_cap(double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("ext cap must be positive");
    g_cap.store(cap, std::memory_order_relaxed);
}

ExtValue ext_pow(ExtValue x, double e) {
    if (e == 0.0) return ExtValue(1.0);
    if (x.is_zero()) return e > 0.0 ? ExtValue(0.0) : ExtValue::infinity();
    if (x.is_inf()) return e > 0.0 ? ExtValue::infinity() : ExtValue(0.0);
    double r = std::pow(x.value(), e);
    if (std::isinf(r)) return ExtValue::infinity();
    return ExtValue(r);
}

ExtValue ext_prod_pow(std::initializer_list<std::pair<double, double>> factors) {
    bool zero = false, inf = false;
    double logsum = 0.0;
    for (const auto& [b, e] : factors) {
        if (e == 0.0) continue;
        if (std::isnan(b)) throw EvalError("NaN entered extended arithmetic", 0.0);
        if (b < 0.0)
            throw std::domain_error("negative base in nonnegative extended arithmetic");
        if (b == 0.0)
            (e > 0.0 ? zero : inf) = true;
        else if (std::isinf(b))
            (e > 0.0 ? inf : zero) = true;
        else
            logsum += e * std::log(b);
    }
    if (zero) return ExtValue(0.0);
    if (inf) return ExtValue::infinity();
    double r = std::exp(logsum);
    if (std::isinf(r)) return ExtValue::infinity();
    return ExtValue(r);
}

double positive_floor(double x) {
    return x > 0.0 ? x : std::numeric_limits<double>::denorm_min();
}

}  // namespace lorembed
