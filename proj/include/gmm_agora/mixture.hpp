#pragma once

// Gaussian mixture kernel shared by the interaction engine and the chain:
// sampling, log-space densities and responsibilities, single EM M-steps for
// weights and covariances, and the closed-form update maps h_sigma / g_j_sigma.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gmm_agora/random.hpp"

namespace gmm_agora {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point on the probability simplex. Construction validates non-negativity
// and that the entries sum to one.
class WeightVector {
public:
    static constexpr double kSumTolerance = 1e-9;

    explicit WeightVector(Vector entries);

    const Vector& values() const { return entries_; }
    double operator[](std::size_t j) const { return entries_[static_cast<Eigen::Index>(j)]; }
    std::size_t size() const { return static_cast<std::size_t>(entries_.size()); }

    friend bool operator==(const WeightVector& a, const WeightVector& b) {
        return a.entries_.size() == b.entries_.size() && a.entries_ == b.entries_;
    }

private:
    Vector entries_;
};

// Means and covariances of an n-component mixture in R^d. Each covariance is
// factored once at construction; a failed factorization is a ParameterError.
class MixtureParams {
public:
    MixtureParams(std::vector<Vector> means, std::vector<Matrix> covariances);

    // Every component gets covariance sigma^2 * I.
    static MixtureParams isotropic(std::vector<Vector> means, double sigma);

    std::size_t dimension() const { return dimension_; }
    std::size_t components() const { return means_.size(); }
    const std::vector<Vector>& means() const { return means_; }
    const std::vector<Matrix>& covariances() const { return covariances_; }
    const Vector& mean(std::size_t j) const { return means_[j]; }
    const Matrix& covariance(std::size_t j) const { return covariances_[j]; }
    const Matrix& cholesky_lower(std::size_t j) const { return cholesky_[j]; }

    double log_density(std::size_t j, const Vector& point) const;

    // Same means, new covariances (re-validated).
    MixtureParams with_covariances(std::vector<Matrix> covariances) const;

private:
    std::size_t dimension_ = 0;
    std::vector<Vector> means_;
    std::vector<Matrix> covariances_;
    std::vector<Matrix> cholesky_;
    std::vector<double> log_normalizer_;
    // 1 / diag(covariance) for diagonal components, empty otherwise.
    std::vector<Vector> inverse_diagonal_;
};

// Fixed-capacity memory of r points. Points are replaced, never appended.
class RagSet {
public:
    explicit RagSet(std::vector<Vector> points);

    std::size_t capacity() const { return points_.size(); }
    const std::vector<Vector>& points() const { return points_; }
    const Vector& operator[](std::size_t slot) const { return points_[slot]; }
    void replace(std::size_t slot, Vector point);

    friend bool operator==(const RagSet& a, const RagSet& b);

private:
    std::vector<Vector> points_;
};

std::vector<Vector> sample_from_gmm(const WeightVector& weights, const MixtureParams& params,
                                    std::size_t count, RandomSource& rng);

double log_component_density(const Vector& point, const Vector& mean, const Matrix& covariance);

// Posterior component probabilities of one point, computed in log space with
// max-subtraction.
Vector responsibilities(const Vector& point, const WeightVector& weights,
                        const MixtureParams& params);

// w / (w + (1 - w) exp(2x / sigma^2)): the posterior weight of the N(-1, sigma^2)
// component of a two-component 1-d mixture with means -1 and +1.
double h_sigma(double w, double x, double sigma);

// logit(h_sigma(w, x, sigma)) expressed through logit(w); exact for every w in (0, 1).
inline double h_sigma_logit(double logit_w, double x, double sigma) {
    return logit_w - 2.0 * x / (sigma * sigma);
}

// Posterior weight of component j for means in {-1, 1}^d with shared covariance
// sigma^2 I. Rejects any other parameterization.
double g_j_sigma(const WeightVector& weights, const Vector& x, const MixtureParams& params,
                 std::size_t j);

// One EM M-step for the mixing weights with means and covariances held fixed.
// mass_offset is added to every component's total responsibility before
// renormalizing; 0 gives the plain M-step.
WeightVector update_weights(const RagSet& rag, const MixtureParams& params,
                            const WeightVector& prior, double mass_offset = 0.0);

struct CovarianceUpdateOptions {
    // Added to each component's total responsibility in the covariance
    // denominator. Components whose responsibility sits far below this offset
    // shrink toward zero scatter instead of averaging distant points.
    double denominator_offset = 0.0;
    // Added to the diagonal of every recomputed covariance.
    double regularization = 0.0;
    // Total responsibility below which a component keeps its previous covariance.
    double vanishing_responsibility = 1e-300;
    // Added to each component's total responsibility before the weights are renormalized.
    double weight_mass_offset = 0.0;
};

struct WeightCovarianceUpdate {
    WeightVector weights;
    std::vector<Matrix> covariances;
};

// One M-step for weights and covariances with the means held fixed.
WeightCovarianceUpdate update_weights_and_covariances(const RagSet& rag,
                                                      const MixtureParams& params,
                                                      const WeightVector& prior,
                                                      const CovarianceUpdateOptions& options = {});

// Scales a covariance so its determinant equals target_determinant.
Matrix volume_rescale(const Matrix& covariance, double target_determinant);

// log(sum(exp(values))) over the finite entries; -inf when all are -inf.
double log_sum_exp(const double* values, std::size_t count);

}  // namespace gmm_agora
