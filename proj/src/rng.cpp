#include "ran/rng.hpp"

#include <cmath>
#include <numbers>

namespace ran {

double Rng::normal(double mean, double sd) {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
}

}  // namespace ran
