#pragma once

#include <cmath>
#include <string>

#include "fkea/common.hpp"

namespace fkea {

// Rényi order parameter. Valid orders are positive reals plus infinity;
// alpha == 1 selects the Shannon limit. The original text token is kept so
// reports can key scores by exactly what the user wrote ("1.5", "inf", ...).
struct Alpha {
    double value = 0.0;
    bool infinite = false;
    std::string token;

    static Alpha finite(double v) {
        Alpha a;
        a.value = v;
        a.token = format_value(v);
        return a;
    }

    static Alpha infinity() {
        Alpha a;
        a.infinite = true;
        a.token = "inf";
        return a;
    }

    // Accepts decimal literals and "inf"/"Inf"/"INF".
    static Alpha parse(const std::string& text);

    bool is_one() const {
        return !infinite && std::abs(value - 1.0) < 1e-9;
    }

    void validate() const {
        if (infinite) return;
        if (!std::isfinite(value) || value <= 0.0) {
            raise(errc::invalid_input,
                  "alpha must be a positive real or inf, got '" + token + "'");
        }
    }

private:
    static std::string format_value(double v);
};

}  // namespace fkea
