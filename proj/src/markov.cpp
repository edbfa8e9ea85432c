#include "netcast/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "netcast/errors.hpp"

namespace netcast {

namespace {

constexpr int kDirectSolveMaxStates = 512;
constexpr double kStationaryTolerance = 1e-10;
constexpr double kPowerTolerance = 1e-12;
constexpr int kPowerMaxIterations = 200000;

double residual_l1(const Eigen::RowVectorXd& pi, const Eigen::MatrixXd& P) {
    return (pi * P - pi).lpNorm<1>();
}

// Plain left-to-right sum so live and restored chains agree bit for bit.
double row_sum(const Eigen::MatrixXd& m, Eigen::Index row) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        s += m(row, j);
    }
    return s;
}

Eigen::VectorXd row_sums(const Eigen::MatrixXd& m) {
    Eigen::VectorXd out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out(i) = row_sum(m, i);
    }
    return out;
}

void normalise_nonnegative(Eigen::RowVectorXd& pi) {
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
}

Eigen::RowVectorXd power_iterate(Eigen::RowVectorXd pi, const Eigen::MatrixXd& P, double tol) {
    Eigen::RowVectorXd next(pi.size());
    for (int it = 0; it < kPowerMaxIterations; ++it) {
        next.noalias() = pi * P;
        next /= next.sum();
        const double change = (next - pi).lpNorm<1>();
        pi.swap(next);
        if (change <= tol) {
            break;
        }
    }
    return pi;
}

} // namespace

StateInterval expand_interval(std::span<const double> probs, int state, double coverage) {
    const int K = static_cast<int>(probs.size());
    if (state < 1 || state > K) {
        throw InputError("state " + std::to_string(state) + " outside 1.." + std::to_string(K));
    }
    double sum = probs[static_cast<std::size_t>(state - 1)];
    int lower = state;
    int upper = state;
    while (sum < coverage) {
        if (upper == K && lower == 1) {
            break;
        }
        if (upper != K) {
            ++upper;
            sum += probs[static_cast<std::size_t>(upper - 1)];
        }
        if (lower != 1) {
            --lower;
            sum += probs[static_cast<std::size_t>(lower - 1)];
        }
    }
    return {lower, upper};
}

std::vector<double> stationary_distribution(const Eigen::MatrixXd& P) {
    const Eigen::Index K = P.rows();
    if (K == 0 || P.cols() != K) {
        throw InputError("transition matrix must be square and non-empty");
    }
    Eigen::RowVectorXd pi;
    if (K <= kDirectSolveMaxStates) {
        Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(K, K);
        A.row(K - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
        b(K - 1) = 1.0;
        pi = A.partialPivLu().solve(b).transpose();
        normalise_nonnegative(pi);
        if (residual_l1(pi, P) > kStationaryTolerance) {
            pi = power_iterate(pi, P, kPowerTolerance);
        }
    } else {
        pi = power_iterate(Eigen::RowVectorXd::Constant(K, 1.0 / static_cast<double>(K)), P, kPowerTolerance);
    }
    normalise_nonnegative(pi);
    const double res = residual_l1(pi, P);
    if (!(res <= kStationaryTolerance)) {
        throw NumericalError("stationary solve did not converge, residual " + std::to_string(res));
    }
    return {pi.data(), pi.data() + K};
}

MarkovChain::MarkovChain(int states, MarkovPrior prior) : prior_(prior) {
    if (states < 2) {
        throw InputError("a Markov chain needs at least 2 states");
    }
    if (!(prior.alpha > prior.beta && prior.beta > prior.gamma && prior.gamma > 0.0)) {
        throw InputError("Dirichlet prior requires alpha > beta > gamma > 0");
    }
    conc_.resize(states, states);
    for (int i = 1; i <= states; ++i) {
        for (int j = 1; j <= states; ++j) {
            conc_(i - 1, j - 1) = prior_entry(i, j);
        }
    }
    row_sums_ = row_sums(conc_);
}

double MarkovChain::prior_entry(int i, int j) const {
    const int gap = std::abs(i - j);
    return gap == 0 ? prior_.alpha : gap == 1 ? prior_.beta : prior_.gamma;
}

void MarkovChain::update(int j) {
    if (j < 1 || j > states()) {
        throw InputError("state " + std::to_string(j) + " outside 1.." + std::to_string(states()));
    }
    if (last_) {
        const Eigen::Index row = *last_ - 1;
        conc_(row, j - 1) += 1.0;
        row_sums_(row) = row_sum(conc_, row);
    }
    last_ = j;
}

int MarkovChain::require_last() const {
    if (!last_) {
        throw InsufficientData("Markov chain has no observed state yet");
    }
    return *last_;
}

std::vector<double> MarkovChain::predict_next() const {
    const Eigen::Index row = require_last() - 1;
    std::vector<double> p(static_cast<std::size_t>(states()));
    for (Eigen::Index j = 0; j < conc_.cols(); ++j) {
        p[static_cast<std::size_t>(j)] = conc_(row, j) / row_sums_(row);
    }
    return p;
}

StateInterval MarkovChain::predict_interval(double coverage) const {
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw InputError("coverage must lie in (0, 1)");
    }
    return expand_interval(predict_next(), require_last(), coverage);
}

void MarkovChain::step_distribution(const std::vector<double>& in, std::vector<double>& out) const {
    const Eigen::Index K = conc_.rows();
    std::fill(out.begin(), out.end(), 0.0);
    for (Eigen::Index i = 0; i < K; ++i) {
        const double w = in[static_cast<std::size_t>(i)] / row_sums_(i);
        if (w == 0.0) {
            continue;
        }
        for (Eigen::Index j = 0; j < K; ++j) {
            out[static_cast<std::size_t>(j)] += w * conc_(i, j);
        }
    }
}

std::vector<std::vector<double>> MarkovChain::predict_path(int k) const {
    if (k < 1) {
        throw InputError("forecast horizon must be >= 1");
    }
    std::vector<std::vector<double>> path;
    path.reserve(static_cast<std::size_t>(k));
    path.push_back(predict_next());
    std::vector<double> next(path.back().size());
    for (int step = 2; step <= k; ++step) {
        step_distribution(path.back(), next);
        path.push_back(next);
    }
    return path;
}

std::vector<double> MarkovChain::predict_k(int k) const {
    if (k < 1) {
        throw InputError("forecast horizon must be >= 1");
    }
    std::vector<double> cur = predict_next();
    std::vector<double> next(cur.size());
    for (int step = 2; step <= k; ++step) {
        step_distribution(cur, next);
        cur.swap(next);
    }
    return cur;
}

Eigen::MatrixXd MarkovChain::transition_matrix() const {
    return row_sums_.cwiseInverse().asDiagonal() * conc_;
}

std::vector<double> MarkovChain::stationary() const {
    return stationary_distribution(transition_matrix());
}

void MarkovChain::restore(Eigen::MatrixXd conc, std::optional<int> last_state) {
    const int K = states();
    if (conc.rows() != K || conc.cols() != K) {
        throw InputError("concentration matrix has the wrong shape");
    }
    for (int i = 1; i <= K; ++i) {
        for (int j = 1; j <= K; ++j) {
            const double n = conc(i - 1, j - 1) - prior_entry(i, j);
            if (!(n > -1e-9) || std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, conc(i - 1, j - 1))) {
                throw InputError("concentration is not prior plus integer counts");
            }
        }
    }
    if (last_state && (*last_state < 1 || *last_state > K)) {
        throw InputError("last state out of range");
    }
    conc_ = std::move(conc);
    row_sums_ = row_sums(conc_);
    last_ = last_state;
}

double expected_state(std::span<const double> probs) {
    double s = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        s += static_cast<double>(j + 1) * probs[j];
    }
    return s;
}

double state_variance(std::span<const double> probs) {
    const double mu = expected_state(probs);
    double v = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double d = static_cast<double>(j + 1) - mu;
        v += d * d * probs[j];
    }
    return v;
}

} // namespace netcast
