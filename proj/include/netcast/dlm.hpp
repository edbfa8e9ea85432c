#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netcast/forecast.hpp"

namespace netcast {

inline constexpr double kDefaultPriorVariance = 1e7;
inline constexpr double kDefaultDiscount = 0.95;
inline constexpr double kDefaultObservationVariance = 1.0;

enum class BlockKind : std::uint8_t { trend = 1, seasonal = 2 };

/// One component of a superposed dynamic linear model.
///
/// F and G are fixed at construction. `m` and `C` hold the block's own state
/// moments: the prior when the block is built, or the marginal posterior when
/// obtained from DlmModel::block().
struct DlmBlock {
    BlockKind kind = BlockKind::trend;
    int period = 0; // seasonal blocks only
    Eigen::VectorXd F;
    Eigen::MatrixXd G;
    Eigen::VectorXd m;
    Eigen::MatrixXd C;
    double V = kDefaultObservationVariance;
    double delta = kDefaultDiscount;

    [[nodiscard]] Eigen::Index dim() const { return F.size(); }
};

/// Local linear trend: state (level, slope), F = [1 0], G = [[1 1] [0 1]],
/// diffuse prior N(0, diag(A, A)).
[[nodiscard]] DlmBlock make_trend_block(double prior_variance = kDefaultPriorVariance,
                                        double delta = kDefaultDiscount);

/// Seasonal-factor block with period s >= 3 and s - 1 free states. The prior
/// covariance has A on the diagonal and -A/(s-2) elsewhere so each row sums to
/// zero. Throws InputError for s < 3 or A <= 0.
[[nodiscard]] DlmBlock make_seasonal_block(int period, double prior_variance = kDefaultPriorVariance,
                                           double delta = kDefaultDiscount);

struct TrendState {
    double level = 0.0;
    double slope = 0.0;
};

/// Superposition of trend and seasonal blocks sharing one observation noise
/// term. The joint state is the concatenation of block states; G is block
/// diagonal. Discounting is applied per block (component discounting): the
/// diagonal blocks of G C G' are divided by that block's delta and the cross
/// blocks are left as they are.
///
/// Covariance filtering with re-symmetrisation after every step and a floor
/// of 1e-12 on the one-step variance.
class DlmModel {
public:
    DlmModel() = default;
    explicit DlmModel(std::vector<DlmBlock> blocks, double coverage = 0.95);

    /// One-step predictive for the next observation; does not modify the model.
    [[nodiscard]] Forecast one_step() const;

    /// Kalman step with the discounted prior. Returns the one-step forecast
    /// made before `x` was seen. Throws InputError if `x` is not finite.
    Forecast filter_update(double x);

    /// Missing observation: the prior for the next step becomes the posterior.
    void update_missing();

    /// Forecasts for horizons 1..k with variances from iterating the
    /// discounted evolution. Throws InputError for k < 1.
    [[nodiscard]] std::vector<Forecast> predict_k(int k) const;

    /// Point forecasts for horizons 1..k only (no variance propagation).
    [[nodiscard]] std::vector<double> predict_points(int k) const;

    [[nodiscard]] std::optional<TrendState> trend() const;

    /// Seasonal effects over one full period, aligned so that
    /// cycle[j % s] is the seasonal component of the j-step point forecast.
    /// The entries sum to zero.
    [[nodiscard]] std::optional<std::vector<double>> seasonal_cycle() const;

    [[nodiscard]] std::optional<int> seasonal_period() const;

    [[nodiscard]] const std::vector<DlmBlock>& blocks() const { return blocks_; }
    [[nodiscard]] DlmBlock block(std::size_t i) const;
    [[nodiscard]] Eigen::Index state_dim() const { return m_.size(); }
    [[nodiscard]] const Eigen::VectorXd& mean() const { return m_; }
    [[nodiscard]] const Eigen::MatrixXd& covariance() const { return C_; }
    [[nodiscard]] const Eigen::VectorXd& observation_vector() const { return F_; }
    [[nodiscard]] double observation_variance() const { return V_; }
    [[nodiscard]] double coverage() const { return coverage_; }
    [[nodiscard]] std::int64_t last_update_index() const { return last_update_index_; }

    void set_coverage(double coverage);

    /// Replaces the joint state moments (used when restoring snapshots and in
    /// tests). Throws InputError on dimension mismatch.
    void set_state(Eigen::VectorXd m, Eigen::MatrixXd C, std::int64_t last_update_index);

private:
    template <typename Real>
    using WorkMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

    // a = G m
    void evolve_mean(Eigen::VectorXd& state) const;
    // P = G P G' with per-block discounting of the diagonal blocks;
    // `evolutions` counts the evolutions P has then undergone since the prior.
    template <typename Real>
    void evolve_covariance(WorkMat<Real>& P, std::int64_t evolutions) const;
    template <typename Real>
    void enforce_null(WorkMat<Real>& P, std::int64_t evolutions) const;
    // F' R F + V, floored.
    template <typename Real>
    [[nodiscard]] double observed_variance(const WorkMat<Real>& R) const;
    template <typename Real>
    [[nodiscard]] double next_variance() const;
    template <typename Real>
    Forecast filter_step(double x);

    std::vector<DlmBlock> blocks_;
    std::vector<Eigen::Index> offsets_;
    Eigen::VectorXd F_;
    std::vector<Eigen::Index> observed_; // indices where F is 1
    Eigen::VectorXd m_;
    Eigen::MatrixXd C_;
    double V_ = kDefaultObservationVariance;
    double coverage_ = 0.95;
    double z_ = 0.0;
    std::int64_t last_update_index_ = 0;
    int null_block_ = -1; // seasonal block with a zero-sum prior
};

} // namespace netcast
