#include <doctest.h>

#include <cmath>

#include "rrpolicy/errors.hpp"
#include "rrpolicy/propensity.hpp"
#include "rrpolicy/rng.hpp"
#include "rrpolicy/simulation.hpp"
#include "rrpolicy/standardize.hpp"

using namespace rrpolicy;

namespace {

Dataset tiny_dataset(int n, int p, int k, std::uint64_t seed) {
    RandomStream rng = derive_stream(seed, 1);
    Dataset data;
    data.covariates = rng.normal_matrix(n, p);
    data.outcomes = rng.normal_matrix(n, k);
    data.treatments.resize(n);
    for (int i = 0; i < n; ++i) data.treatments(i) = rng.bernoulli(0.5) ? 1 : 0;
    if (data.arm_count(0) == 0) data.treatments(0) = 0;
    if (data.arm_count(1) == 0) data.treatments(1) = 1;
    return data;
}

}  // namespace

TEST_CASE("standardize produces zero-mean unit-variance columns") {
    Dataset data = tiny_dataset(37, 4, 3, 11);
    data.covariates(0, 0) = 1.0;
    data.covariates(1, 0) = 2.0;
    data.covariates(2, 0) = 3.0;

    auto [std_data, params] = standardize(data);
    for (int j = 0; j < std_data.covariates.cols(); ++j) {
        const auto col = std_data.covariates.col(j);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().sum() / (col.size() - 1));
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(sd - 1.0) < 1e-12);
    }
    for (int j = 0; j < std_data.outcomes.cols(); ++j) {
        CHECK(std::abs(std_data.outcomes.col(j).mean()) < 1e-12);
    }
}

TEST_CASE("standardize is idempotent up to float tolerance") {
    Dataset data = tiny_dataset(50, 3, 2, 12);
    auto [once, params1] = standardize(data);
    auto [twice, params2] = standardize(once);
    CHECK((twice.covariates - once.covariates).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((twice.outcomes - once.outcomes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize rejects a constant column") {
    Dataset data = tiny_dataset(20, 3, 2, 13);
    data.covariates.col(1).setConstant(5.0);
    CHECK_THROWS_AS(standardize(data), ZeroVarianceColumn);
}

TEST_CASE("standardize then inverse reproduces the input") {
    Dataset data = tiny_dataset(64, 5, 4, 14);
    auto [std_data, params] = standardize(data);
    const Matrix x_back = invert_standardization(std_data.covariates, params.x_mean, params.x_sd);
    const Matrix y_back = invert_standardization(std_data.outcomes, params.y_mean, params.y_sd);
    const double x_scale = data.covariates.cwiseAbs().maxCoeff();
    CHECK((x_back - data.covariates).cwiseAbs().maxCoeff() / x_scale < 1e-10);
    CHECK((y_back - data.outcomes).cwiseAbs().maxCoeff() /
              data.outcomes.cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("policy_prob basics") {
    PolicyParams policy;
    policy.theta = Vector::Zero(4);
    Vector x(4);
    x << 1.0, -2.0, 0.5, 3.0;
    CHECK(policy_prob(policy, x, 1) == doctest::Approx(0.5));
    CHECK(policy_prob(policy, x, 0) == doctest::Approx(0.5));

    policy.theta = Vector::Ones(4);
    Vector x0 = Vector::Zero(4);
    CHECK(policy_prob(policy, x0, 1) == doctest::Approx(0.5));

    // saturation without overflow; reference value from the stable form
    Vector x_big(4);
    x_big << 10.0, 10.0, 10.0, 10.0;  // theta.x = 40
    const double p1 = policy_prob(policy, x_big, 1);
    CHECK(std::abs(p1 - 1.0) < 1e-12);
    CHECK(std::isfinite(policy_prob(policy, 175.0 * x_big, 1)));  // theta.x = 700

    Vector bad(3);
    CHECK_THROWS_AS(policy_prob(policy, bad, 1), DimensionMismatch);
}

TEST_CASE("policy probabilities sum to one exactly across arms") {
    RandomStream rng = derive_stream(99, 2);
    PolicyParams policy;
    policy.theta = rng.normal_vector(6);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector x = rng.normal_vector(6) * 10.0;
        CHECK(policy_prob(policy, x, 0) + policy_prob(policy, x, 1) == 1.0);
    }
}

TEST_CASE("propensity null model recovers zero coefficients") {
    RandomStream rng = derive_stream(7, 3);
    const int n = 20000, p = 4;
    Dataset data;
    data.covariates = rng.normal_matrix(n, p);
    data.outcomes = Matrix::Zero(n, 1).array() + 1.0;
    data.outcomes.col(0) = rng.normal_vector(n);
    data.treatments.resize(n);
    for (int i = 0; i < n; ++i) data.treatments(i) = rng.bernoulli(0.5) ? 1 : 0;

    const PropensityModel model = fit_propensity(data);
    CHECK(model.beta.cwiseAbs().maxCoeff() < 0.05);
    CHECK(std::abs(model.intercept) < 0.05);
}

TEST_CASE("propensity recovers the generating coefficients") {
    const DGPParams params = generate_dgp(8, 5, 2, 1.0, 48);
    const Dataset data = sample_dataset(params, 10000, 555);
    const PropensityModel model = fit_propensity(data);
    CHECK((model.beta - params.beta).cwiseAbs().maxCoeff() < 0.1);
    CHECK(std::abs(model.intercept) < 0.1);
}

TEST_CASE("propensity fit requires both arms") {
    Dataset data = tiny_dataset(30, 3, 2, 15);
    data.treatments.setConstant(1);
    CHECK_THROWS_AS(fit_propensity(data), ValidationError);
}

TEST_CASE("propensity detects perfect separation") {
    Dataset data = tiny_dataset(60, 1, 1, 16);
    for (int i = 0; i < data.n(); ++i) {
        data.covariates(i, 0) = i < 30 ? -1.0 - i * 0.01 : 1.0 + i * 0.01;
        data.treatments(i) = i < 30 ? 0 : 1;
    }
    CHECK_THROWS_AS(fit_propensity(data), Separation);
}

TEST_CASE("clipped propensity evaluation stays inside [clip, 1-clip]") {
    PropensityModel model;
    model.beta = Vector::Ones(2) * 50.0;
    model.intercept = 0.0;
    model.clip = 0.01;
    RandomStream rng = derive_stream(3, 4);
    const Matrix X = rng.normal_matrix(500, 2);
    const Vector e1 = model.prob_treated(X);
    CHECK(e1.minCoeff() >= 0.01);
    CHECK(e1.maxCoeff() <= 0.99);
    for (int i = 0; i < 10; ++i) {
        const Vector x = rng.normal_vector(2);
        CHECK(model.prob(x, 0) + model.prob(x, 1) == 1.0);
    }
}
