#pragma once

#include <cmath>

#include "crowdtruth/numeric.hpp"

namespace crowdtruth {

// Probability that a worker answers correctly as a function of expertise
// e and difficulty d. Difficulty either shifts the ability (sigmoid of
// e - d) or damps it (sigmoid of e * exp(-d)).
enum class CorrectnessLink { shift, damp };

inline double link_activation(CorrectnessLink link, double e, double d) {
    return link == CorrectnessLink::shift ? e - d : e * std::exp(-d);
}

inline double link_correct_prob(CorrectnessLink link, double e, double d) {
    return sigmoid(link_activation(link, e, d));
}

// Partials of the activation with respect to e and d.
inline void link_activation_partials(CorrectnessLink link, double e, double d, double* de,
                                     double* dd) {
    if (link == CorrectnessLink::shift) {
        *de = 1.0;
        *dd = -1.0;
    } else {
        double s = std::exp(-d);
        *de = s;
        *dd = -e * s;
    }
}

}  // namespace crowdtruth
