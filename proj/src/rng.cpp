#include "stirap/rng.hpp"

#include <cmath>
#include <numbers>

namespace stirap {

double Rng::gaussian(double sigma) {
    if (have_spare_) {
        have_spare_ = false;
        return sigma * spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return sigma * radius * std::cos(angle);
}

}  // namespace stirap
