#pragma once

#include "rrpolicy/types.hpp"

namespace rrpolicy {

// Logistic treatment model e_1(x) = sigmoid(beta.x + intercept), evaluated
// with clipping so that e_t stays inside [clip, 1-clip]; e_0 = 1 - e_1 exactly.
struct PropensityModel {
    Vector beta;
    double intercept = 0.0;
    double clip = 0.01;

    double prob(const Vector& x, int t) const;
    // e_1(x_i) for every row, clipped.
    Vector prob_treated(const Matrix& X) const;
};

// Maximum-likelihood logistic regression of T on X with intercept
// (Newton iterations with step halving; gradient norm < 1e-8 or 500 steps).
PropensityModel fit_propensity(const Dataset& data, double clip = 0.01);

}  // namespace rrpolicy
