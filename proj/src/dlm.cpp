#include "netcast/dlm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>

#include "netcast/errors.hpp"

namespace netcast {

namespace {

constexpr double kMinOneStepVariance = 1e-12;

// While the prior still dominates, covariance entries near A cancel down to
// O(1) within one update; that arithmetic runs in extended precision.
constexpr double kDiffuseVariance = 1e3;

template <typename Real>
using WorkVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using WorkMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

bool is_diffuse(const Eigen::MatrixXd& C) {
    return C.diagonal().maxCoeff() > kDiffuseVariance;
}

void check_discount(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw InputError("discount factor must lie in (0, 1], got " + std::to_string(delta));
    }
}

template <typename M>
void symmetrize(M& P) {
    P = (0.5 * (P + P.transpose())).eval();
}

bool is_canonical(const DlmBlock& b) {
    const Eigen::Index d = b.dim();
    if (b.G.rows() != d || b.G.cols() != d || b.m.size() != d || b.C.rows() != d || b.C.cols() != d) {
        return false;
    }
    if (b.kind == BlockKind::trend) {
        return d == 2 && b.F == make_trend_block().F && b.G == make_trend_block().G;
    }
    if (d != b.period - 1 || b.period < 3) {
        return false;
    }
    Eigen::VectorXd F = Eigen::VectorXd::Zero(d);
    F(0) = 1.0;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
    G.row(0).setConstant(-1.0);
    for (Eigen::Index i = 1; i < d; ++i) {
        G(i, i - 1) = 1.0;
    }
    return b.F == F && b.G == G;
}

// Left multiplication by a block's G, applied to `rows` in place.
template <typename Rows>
void apply_g_rows(BlockKind kind, Rows&& rows) {
    if (kind == BlockKind::trend) {
        rows.row(0) += rows.row(1);
        return;
    }
    const Eigen::Index n = rows.rows();
    using Scalar = typename std::decay_t<Rows>::Scalar;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> head = -rows.colwise().sum();
    for (Eigen::Index i = n - 1; i > 0; --i) {
        rows.row(i) = rows.row(i - 1);
    }
    rows.row(0) = head;
}

// Right multiplication by a block's G', applied to `cols` in place.
template <typename Cols>
void apply_gt_cols(BlockKind kind, Cols&& cols) {
    if (kind == BlockKind::trend) {
        cols.col(0) += cols.col(1);
        return;
    }
    const Eigen::Index n = cols.cols();
    using Scalar = typename std::decay_t<Cols>::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> head = -cols.rowwise().sum();
    for (Eigen::Index i = n - 1; i > 0; --i) {
        cols.col(i) = cols.col(i - 1);
    }
    cols.col(0) = head;
}

bool rows_sum_to_zero(const Eigen::MatrixXd& C) {
    const double scale = C.cwiseAbs().maxCoeff();
    return (C.rowwise().sum().cwiseAbs().array() <= 1e-9 * scale).all();
}

} // namespace

DlmBlock make_trend_block(double prior_variance, double delta) {
    if (!(prior_variance > 0.0)) {
        throw InputError("trend prior variance must be positive");
    }
    check_discount(delta);
    DlmBlock b;
    b.kind = BlockKind::trend;
    b.F = Eigen::Vector2d(1.0, 0.0);
    b.G.resize(2, 2);
    b.G << 1.0, 1.0, 0.0, 1.0;
    b.m = Eigen::VectorXd::Zero(2);
    b.C = prior_variance * Eigen::MatrixXd::Identity(2, 2);
    b.V = kDefaultObservationVariance;
    b.delta = delta;
    return b;
}

DlmBlock make_seasonal_block(int period, double prior_variance, double delta) {
    if (period < 3) {
        throw InputError("seasonal period must be at least 3, got " + std::to_string(period));
    }
    if (!(prior_variance > 0.0)) {
        throw InputError("seasonal prior variance must be positive");
    }
    check_discount(delta);
    const Eigen::Index d = period - 1;
    DlmBlock b;
    b.kind = BlockKind::seasonal;
    b.period = period;
    b.F = Eigen::VectorXd::Zero(d);
    b.F(0) = 1.0;
    b.G = Eigen::MatrixXd::Zero(d, d);
    b.G.row(0).setConstant(-1.0);
    for (Eigen::Index i = 1; i < d; ++i) {
        b.G(i, i - 1) = 1.0;
    }
    b.m = Eigen::VectorXd::Zero(d);
    const double off = -prior_variance / static_cast<double>(period - 2);
    b.C = Eigen::MatrixXd::Constant(d, d, off);
    b.C.diagonal().setConstant(prior_variance);
    b.V = kDefaultObservationVariance;
    b.delta = delta;
    return b;
}

DlmModel::DlmModel(std::vector<DlmBlock> blocks, double coverage) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
        throw InputError("a DLM needs at least one block");
    }
    int trends = 0;
    int seasonals = 0;
    Eigen::Index d = 0;
    for (const auto& b : blocks_) {
        if (!is_canonical(b)) {
            throw InputError("block F/G do not match the block kind");
        }
        check_discount(b.delta);
        (b.kind == BlockKind::trend ? trends : seasonals) += 1;
        if (b.kind == BlockKind::seasonal && rows_sum_to_zero(b.C)) {
            null_block_ = static_cast<int>(offsets_.size());
        }
        offsets_.push_back(d);
        d += b.dim();
    }
    if (trends > 1 || seasonals > 1) {
        throw InputError("at most one trend and one seasonal block per model");
    }

    F_ = Eigen::VectorXd::Zero(d);
    m_ = Eigen::VectorXd::Zero(d);
    C_ = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        const Eigen::Index o = offsets_[i];
        F_.segment(o, b.dim()) = b.F;
        observed_.push_back(o);
        m_.segment(o, b.dim()) = b.m;
        C_.block(o, o, b.dim(), b.dim()) = b.C;
    }
    // Single noise term for the superposed observation.
    V_ = blocks_.front().V;
    if (!(V_ > 0.0)) {
        throw InputError("observation variance must be positive");
    }
    set_coverage(coverage);
}

void DlmModel::set_coverage(double coverage) {
    z_ = normal_half_width_quantile(coverage);
    coverage_ = coverage;
}

void DlmModel::set_state(Eigen::VectorXd m, Eigen::MatrixXd C, std::int64_t last_update_index) {
    if (m.size() != m_.size() || C.rows() != C_.rows() || C.cols() != C_.cols()) {
        throw InputError("state dimension does not match the model structure");
    }
    m_ = std::move(m);
    C_ = std::move(C);
    last_update_index_ = last_update_index;
}

void DlmModel::evolve_mean(Eigen::VectorXd& state) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        apply_g_rows(blocks_[i].kind, state.segment(offsets_[i], blocks_[i].dim()));
    }
}

template <typename Real>
void DlmModel::enforce_null(WorkMat<Real>& P, std::int64_t evolutions) const {
    if (null_block_ < 0) {
        return;
    }
    // A zero-sum seasonal prior fixes one seasonal effect exactly. After n
    // evolutions that effect is stored state (n mod s) - 1, or minus the sum
    // of all states when that index is -1. Rounding leaves a tiny indefinite
    // component there that discounting would inflate without bound.
    const auto& b = blocks_[static_cast<std::size_t>(null_block_)];
    const Eigen::Index o = offsets_[static_cast<std::size_t>(null_block_)];
    const Eigen::Index d = b.dim();
    const auto k = static_cast<Eigen::Index>(evolutions % b.period) - 1;
    if (k >= 0) {
        P.row(o + k).setZero();
        P.col(o + k).setZero();
        return;
    }
    const WorkVec<Real> w = P.middleCols(o, d).rowwise().sum();
    const Real c = w.segment(o, d).sum();
    const Real n = static_cast<Real>(d);
    P.middleRows(o, d).rowwise() -= w.transpose() / n;
    P.middleCols(o, d).colwise() -= w / n;
    P.block(o, o, d, d).array() += c / (n * n);
}

template <typename Real>
void DlmModel::evolve_covariance(WorkMat<Real>& P, std::int64_t evolutions) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        apply_g_rows(blocks_[i].kind, P.middleRows(offsets_[i], blocks_[i].dim()));
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        apply_gt_cols(blocks_[i].kind, P.middleCols(offsets_[i], blocks_[i].dim()));
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Eigen::Index n = blocks_[i].dim();
        P.block(offsets_[i], offsets_[i], n, n) /= static_cast<Real>(blocks_[i].delta);
    }
    symmetrize(P);
    enforce_null(P, evolutions);
}

template <typename Real>
double DlmModel::observed_variance(const WorkMat<Real>& R) const {
    Real q = 0;
    for (Eigen::Index o : observed_) {
        for (Eigen::Index p : observed_) {
            q += R(o, p);
        }
    }
    return std::max(static_cast<double>(q + static_cast<Real>(V_)), kMinOneStepVariance);
}

Forecast DlmModel::one_step() const {
    Eigen::VectorXd a = m_;
    evolve_mean(a);
    return normal_forecast(1, F_.dot(a), is_diffuse(C_) ? next_variance<long double>() : next_variance<double>(),
                           coverage_);
}

template <typename Real>
double DlmModel::next_variance() const {
    WorkMat<Real> R = C_.template cast<Real>();
    evolve_covariance(R, last_update_index_ + 1);
    return observed_variance(R);
}

Forecast DlmModel::filter_update(double x) {
    if (!std::isfinite(x)) {
        throw InputError("observation must be finite");
    }
    return is_diffuse(C_) ? filter_step<long double>(x) : filter_step<double>(x);
}

template <typename Real>
Forecast DlmModel::filter_step(double x) {
    Eigen::VectorXd a = m_;
    evolve_mean(a);
    WorkMat<Real> R = C_.template cast<Real>();
    evolve_covariance(R, last_update_index_ + 1);

    // F only selects states, so R F is a sum of columns.
    WorkVec<Real> RF = WorkVec<Real>::Zero(R.rows());
    for (Eigen::Index o : observed_) {
        RF += R.col(o);
    }
    const double f = F_.dot(a);
    Real Q = static_cast<Real>(V_);
    for (Eigen::Index o : observed_) {
        Q += RF(o);
    }
    if (!std::isfinite(static_cast<double>(Q)) || !std::isfinite(f)) {
        throw NumericalError("non-finite one-step predictive");
    }
    Q = std::max(Q, static_cast<Real>(kMinOneStepVariance));
    const Forecast fc = normal_forecast(1, f, static_cast<double>(Q), coverage_);

    const Real e = (static_cast<Real>(x) - static_cast<Real>(f)) / Q;
    m_ = (a.template cast<Real>() + RF * e).template cast<double>();
    R.noalias() -= (RF / Q) * RF.transpose();
    symmetrize(R);
    C_ = R.template cast<double>();
    ++last_update_index_;
    return fc;
}

void DlmModel::update_missing() {
    evolve_mean(m_);
    if (is_diffuse(C_)) {
        WorkMat<long double> R = C_.cast<long double>();
        evolve_covariance(R, last_update_index_ + 1);
        C_ = R.cast<double>();
    } else {
        evolve_covariance(C_, last_update_index_ + 1);
    }
    ++last_update_index_;
}

std::vector<Forecast> DlmModel::predict_k(int k) const {
    if (k < 1) {
        throw InputError("forecast horizon must be >= 1");
    }
    std::vector<Forecast> out;
    out.reserve(static_cast<std::size_t>(k));
    Eigen::VectorXd a = m_;
    WorkMat<long double> wide;
    Eigen::MatrixXd R = C_;
    const bool diffuse = is_diffuse(C_);
    if (diffuse) {
        wide = C_.cast<long double>();
    }
    for (int j = 1; j <= k; ++j) {
        evolve_mean(a);
        double Q = 0.0;
        if (diffuse) {
            evolve_covariance(wide, last_update_index_ + j);
            Q = observed_variance(wide);
        } else {
            evolve_covariance(R, last_update_index_ + j);
            Q = observed_variance(R);
        }
        out.push_back(normal_forecast(j, F_.dot(a), Q, coverage_));
    }
    return out;
}

std::vector<double> DlmModel::predict_points(int k) const {
    if (k < 1) {
        throw InputError("forecast horizon must be >= 1");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k));
    Eigen::VectorXd a = m_;
    for (int j = 1; j <= k; ++j) {
        evolve_mean(a);
        out.push_back(F_.dot(a));
    }
    return out;
}

std::optional<TrendState> DlmModel::trend() const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].kind == BlockKind::trend) {
            return TrendState{m_(offsets_[i]), m_(offsets_[i] + 1)};
        }
    }
    return std::nullopt;
}

std::optional<int> DlmModel::seasonal_period() const {
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::seasonal) {
            return b.period;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<double>> DlmModel::seasonal_cycle() const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].kind != BlockKind::seasonal) {
            continue;
        }
        // State holds the effects at n, n-1, ..., n-s+2; the effect at n+1
        // closes the cycle and the rest repeat with period s.
        const int s = blocks_[i].period;
        const auto theta = m_.segment(offsets_[i], s - 1);
        std::vector<double> cycle(static_cast<std::size_t>(s));
        cycle[1] = -theta.sum();
        for (int j = 2; j <= s; ++j) {
            cycle[static_cast<std::size_t>(j % s)] = theta(s - j);
        }
        return cycle;
    }
    return std::nullopt;
}

DlmBlock DlmModel::block(std::size_t i) const {
    DlmBlock b = blocks_.at(i);
    b.m = m_.segment(offsets_[i], b.dim());
    b.C = C_.block(offsets_[i], offsets_[i], b.dim(), b.dim());
    return b;
}

} // namespace netcast
