#include "gmm_agora/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gmm_agora/errors.hpp"

namespace gmm_agora {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // ln(2*pi)

bool all_finite(const Vector& v) { return v.allFinite(); }

// 1 / (1 + exp(z)) without overflow.
double logistic_of_negative(double z) {
    if (z > 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

Eigen::LLT<Matrix> factor_or_throw(const Matrix& covariance, std::size_t j) {
    if (covariance.rows() != covariance.cols())
        throw ParameterError("covariance " + std::to_string(j) + " is not square");
    if (!covariance.allFinite())
        throw ParameterError("covariance " + std::to_string(j) + " has non-finite entries");
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
        throw ParameterError("covariance " + std::to_string(j) + " is not symmetric");
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw ParameterError("covariance " + std::to_string(j) + " is not positive definite");
    const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite())
        throw ParameterError("covariance " + std::to_string(j) + " is not positive definite");
    return llt;
}

}  // namespace

WeightVector::WeightVector(Vector entries) : entries_(std::move(entries)) {
    require(entries_.size() > 0, "weight vector must be nonempty");
    require(all_finite(entries_), "weight vector has non-finite entries");
    require((entries_.array() >= 0.0).all(), "weight vector has negative entries");
    require(std::abs(entries_.sum() - 1.0) <= kSumTolerance, "weights must sum to one");
}

MixtureParams::MixtureParams(std::vector<Vector> means, std::vector<Matrix> covariances)
    : means_(std::move(means)), covariances_(std::move(covariances)) {
    require(!means_.empty(), "mixture needs at least one component");
    require(means_.size() == covariances_.size(), "need exactly one covariance per mean");
    dimension_ = static_cast<std::size_t>(means_.front().size());
    require(dimension_ > 0, "mixture dimension must be positive");

    cholesky_.reserve(means_.size());
    log_normalizer_.reserve(means_.size());
    const auto d = static_cast<Eigen::Index>(dimension_);
    for (std::size_t j = 0; j < means_.size(); ++j) {
        require(means_[j].size() == d, "mean " + std::to_string(j) + " has the wrong dimension");
        require(all_finite(means_[j]), "mean " + std::to_string(j) + " has non-finite entries");
        require(covariances_[j].rows() == d, "covariance " + std::to_string(j) + " has the wrong dimension");
        auto llt = factor_or_throw(covariances_[j], j);
        Matrix lower = llt.matrixL();
        const double log_det = 2.0 * lower.diagonal().array().log().sum();
        cholesky_.push_back(std::move(lower));
        log_normalizer_.push_back(-0.5 * (static_cast<double>(dimension_) * kLogTwoPi + log_det));
        const Matrix& cov = covariances_[j];
        const bool diagonal = (cov - Matrix(cov.diagonal().asDiagonal())).isZero(0.0);
        inverse_diagonal_.push_back(diagonal ? Vector(cov.diagonal().cwiseInverse()) : Vector());
    }
}

MixtureParams MixtureParams::isotropic(std::vector<Vector> means, double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(!means.empty(), "mixture needs at least one component");
    const auto d = means.front().size();
    std::vector<Matrix> covs(means.size(), Matrix::Identity(d, d) * (sigma * sigma));
    return MixtureParams(std::move(means), std::move(covs));
}

double MixtureParams::log_density(std::size_t j, const Vector& point) const {
    if (inverse_diagonal_[j].size() > 0) {
        return log_normalizer_[j] -
               0.5 * ((point - means_[j]).array().square() * inverse_diagonal_[j].array()).sum();
    }
    const Vector z = cholesky_[j].triangularView<Eigen::Lower>().solve(point - means_[j]);
    return log_normalizer_[j] - 0.5 * z.squaredNorm();
}

MixtureParams MixtureParams::with_covariances(std::vector<Matrix> covariances) const {
    return MixtureParams(means_, std::move(covariances));
}

RagSet::RagSet(std::vector<Vector> points) : points_(std::move(points)) {
    require(!points_.empty(), "RAG must hold at least one point");
    const auto d = points_.front().size();
    for (const auto& p : points_) require(p.size() == d, "RAG points must share one dimension");
}

void RagSet::replace(std::size_t slot, Vector point) {
    require(slot < points_.size(), "RAG slot out of range");
    require(point.size() == points_[slot].size(), "RAG point has the wrong dimension");
    points_[slot] = std::move(point);
}

bool operator==(const RagSet& a, const RagSet& b) {
    if (a.points_.size() != b.points_.size()) return false;
    for (std::size_t i = 0; i < a.points_.size(); ++i) {
        if (a.points_[i].size() != b.points_[i].size() || a.points_[i] != b.points_[i]) return false;
    }
    return true;
}

double log_sum_exp(const double* values, std::size_t count) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) peak = std::max(peak, values[i]);
    if (!std::isfinite(peak)) return peak;
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += std::exp(values[i] - peak);
    return peak + std::log(total);
}

std::vector<Vector> sample_from_gmm(const WeightVector& weights, const MixtureParams& params,
                                    std::size_t count, RandomSource& rng) {
    require(weights.size() == params.components(), "weights and mixture disagree on component count");
    const auto n = params.components();
    const auto d = static_cast<Eigen::Index>(params.dimension());
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (weights[j] > 0.0) last_positive = j;

    std::vector<Vector> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = rng.uniform();
        std::size_t component = last_positive;
        double cumulative = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cumulative += weights[j];
            if (u < cumulative && weights[j] > 0.0) {
                component = j;
                break;
            }
        }
        Vector z(d);
        for (Eigen::Index k = 0; k < d; ++k) z[k] = rng.standard_normal();
        out.push_back(params.mean(component) + params.cholesky_lower(component) * z);
    }
    return out;
}

double log_component_density(const Vector& point, const Vector& mean, const Matrix& covariance) {
    require(point.size() == mean.size() && covariance.rows() == mean.size(),
            "density arguments disagree on dimension");
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericError("covariance is singular or indefinite");
    const Matrix lower = llt.matrixL();
    if ((lower.diagonal().array() <= 0.0).any()) throw NumericError("covariance is singular");
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    const Vector z = lower.triangularView<Eigen::Lower>().solve(point - mean);
    return -0.5 * (static_cast<double>(mean.size()) * kLogTwoPi + log_det + z.squaredNorm());
}

Vector responsibilities(const Vector& point, const WeightVector& weights,
                        const MixtureParams& params) {
    require(weights.size() == params.components(), "weights and mixture disagree on component count");
    require(static_cast<std::size_t>(point.size()) == params.dimension(), "point has the wrong dimension");
    require(all_finite(point), "point has non-finite entries");
    const auto n = params.components();
    std::vector<double> log_terms(n);
    for (std::size_t j = 0; j < n; ++j) {
        log_terms[j] = weights[j] > 0.0
                           ? std::log(weights[j]) + params.log_density(j, point)
                           : -std::numeric_limits<double>::infinity();
    }
    const double peak = *std::max_element(log_terms.begin(), log_terms.end());
    Vector out(static_cast<Eigen::Index>(n));
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(log_terms[j] - peak);
        out[static_cast<Eigen::Index>(j)] = e;
        total += e;
    }
    return out / total;
}

double h_sigma(double w, double x, double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "h_sigma requires sigma > 0");
    require(!std::isnan(x) && !std::isnan(w), "h_sigma received NaN");
    constexpr double kSlack = 1e-9;
    require(w >= -kSlack && w <= 1.0 + kSlack, "h_sigma requires w in [0, 1]");
    w = std::clamp(w, 0.0, 1.0);
    if (w == 0.0) return 0.0;
    if (w == 1.0) return 1.0;
    const double z = std::log1p(-w) - std::log(w) + 2.0 * x / (sigma * sigma);
    return logistic_of_negative(z);
}

double g_j_sigma(const WeightVector& weights, const Vector& x, const MixtureParams& params,
                 std::size_t j) {
    const auto n = params.components();
    require(j < n, "component index out of range");
    require(weights.size() == n, "weights and mixture disagree on component count");
    require(static_cast<std::size_t>(x.size()) == params.dimension(), "point has the wrong dimension");
    for (const auto& mu : params.means()) {
        require((mu.array().abs() == 1.0).all(), "g_j_sigma requires means in {-1, 1}^d");
    }
    const auto d = static_cast<Eigen::Index>(params.dimension());
    const double variance = params.covariance(0)(0, 0);
    const Matrix isotropic = Matrix::Identity(d, d) * variance;
    for (const auto& cov : params.covariances()) {
        require(cov == isotropic, "g_j_sigma requires a shared covariance sigma^2 I");
    }
    if (weights[j] == 0.0) return 0.0;

    std::vector<double> log_terms;
    log_terms.reserve(n);
    for (std::size_t h = 0; h < n; ++h) {
        if (h == j || weights[h] == 0.0) continue;
        log_terms.push_back(std::log(weights[h]) + x.dot(params.mean(h) - params.mean(j)) / variance);
    }
    if (log_terms.empty()) return 1.0;
    const double others = log_sum_exp(log_terms.data(), log_terms.size());
    return logistic_of_negative(others - std::log(weights[j]));
}

WeightVector update_weights(const RagSet& rag, const MixtureParams& params,
                            const WeightVector& prior, double mass_offset) {
    require(rag.capacity() > 0, "cannot update from an empty RAG");
    require(mass_offset >= 0.0 && std::isfinite(mass_offset), "mass offset must be non-negative");
    Vector total = Vector::Zero(static_cast<Eigen::Index>(params.components()));
    for (const auto& point : rag.points()) total += responsibilities(point, prior, params);
    total.array() += mass_offset;
    total /= static_cast<double>(rag.capacity());
    total /= total.sum();
    return WeightVector(std::move(total));
}

WeightCovarianceUpdate update_weights_and_covariances(const RagSet& rag,
                                                      const MixtureParams& params,
                                                      const WeightVector& prior,
                                                      const CovarianceUpdateOptions& options) {
    require(rag.capacity() > 0, "cannot update from an empty RAG");
    const auto n = params.components();
    const auto d = static_cast<Eigen::Index>(params.dimension());
    const auto r = rag.capacity();

    Matrix gamma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < r; ++i)
        gamma.row(static_cast<Eigen::Index>(i)) = responsibilities(rag[i], prior, params).transpose();

    Vector weights = gamma.colwise().sum().transpose();
    weights.array() += options.weight_mass_offset;
    weights /= weights.sum();

    std::vector<Matrix> covariances;
    covariances.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const double mass = gamma.col(col).sum();
        if (mass < options.vanishing_responsibility || mass + options.denominator_offset <= 0.0) {
            covariances.push_back(params.covariance(j));
            continue;
        }
        Matrix scatter = Matrix::Zero(d, d);
        for (std::size_t i = 0; i < r; ++i) {
            const Vector diff = rag[i] - params.mean(j);
            scatter.noalias() += gamma(static_cast<Eigen::Index>(i), col) * diff * diff.transpose();
        }
        Matrix cov = scatter / (mass + options.denominator_offset);
        cov = 0.5 * (cov + cov.transpose());
        cov.diagonal().array() += options.regularization;
        covariances.push_back(std::move(cov));
    }
    return {WeightVector(std::move(weights)), std::move(covariances)};
}

Matrix volume_rescale(const Matrix& covariance, double target_determinant) {
    require(target_determinant > 0.0 && std::isfinite(target_determinant),
            "target determinant must be positive");
    require(covariance.rows() == covariance.cols() && covariance.rows() > 0,
            "covariance must be square");
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericError("covariance has non-positive determinant");
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    if ((diag.array() <= 0.0).any()) throw NumericError("covariance has non-positive determinant");
    const double log_det = 2.0 * diag.array().log().sum();
    const double d = static_cast<double>(covariance.rows());
    const double scale = std::exp((std::log(target_determinant) - log_det) / d);
    return covariance * scale;
}

}  // namespace gmm_agora
