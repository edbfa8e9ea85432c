#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace netcast {

struct MarkovPrior {
    double alpha = 10.0; // self transition
    double beta = 8.0;   // one-state moves
    double gamma = 2.0;  // everything else

    friend bool operator==(const MarkovPrior&, const MarkovPrior&) = default;
};

struct StateInterval {
    int lower = 1;
    int upper = 1;

    friend bool operator==(const StateInterval&, const StateInterval&) = default;
};

/// Expands a predictive interval around `state` (1-based) over the
/// distribution `probs`: start from the mass at `state`, then alternately
/// step the upper end up and the lower end down (each skipped once it hits
/// K or 1) until the accumulated mass reaches `coverage`.
[[nodiscard]] StateInterval expand_interval(std::span<const double> probs, int state, double coverage);

/// Stationary distribution of a row-stochastic matrix. Direct solve of
/// (P' - I) pi = 0 with one equation replaced by sum(pi) = 1 for K <= 512,
/// power iteration above that. Throws NumericalError if the residual
/// ||pi P - pi||_1 cannot be brought under 1e-10.
[[nodiscard]] std::vector<double> stationary_distribution(const Eigen::MatrixXd& P);

/// Time-homogeneous Markov chain on states 1..K with Dirichlet rows.
/// conc(i, j) = prior(i, j) + n_ij. State arguments are 1-based.
class MarkovChain {
public:
    MarkovChain() = default;
    MarkovChain(int states, MarkovPrior prior = {});

    [[nodiscard]] int states() const { return static_cast<int>(conc_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& concentration() const { return conc_; }
    [[nodiscard]] const MarkovPrior& prior() const { return prior_; }
    [[nodiscard]] std::optional<int> last_state() const { return last_; }
    [[nodiscard]] double prior_entry(int i, int j) const;

    /// Records the transition last_state -> j; the first call only sets the
    /// state. Throws InputError if j is outside 1..K.
    void update(int j);

    /// Row last_state of the posterior mean transition matrix.
    /// Throws InsufficientData before the first observation.
    [[nodiscard]] std::vector<double> predict_next() const;

    [[nodiscard]] StateInterval predict_interval(double coverage) const;

    /// Row last_state of P_hat^k, by k vector-matrix products.
    [[nodiscard]] std::vector<double> predict_k(int k) const;

    /// Distributions for horizons 1..k in one pass.
    [[nodiscard]] std::vector<std::vector<double>> predict_path(int k) const;

    [[nodiscard]] std::vector<double> stationary() const;

    /// Posterior mean transition matrix (rows of conc normalised).
    [[nodiscard]] Eigen::MatrixXd transition_matrix() const;

    /// Restores the counts part of a snapshot. Throws InputError if the
    /// matrix is not prior + nonnegative integer counts.
    void restore(Eigen::MatrixXd conc, std::optional<int> last_state);

private:
    [[nodiscard]] int require_last() const;
    void step_distribution(const std::vector<double>& in, std::vector<double>& out) const;

    MarkovPrior prior_;
    Eigen::MatrixXd conc_;
    Eigen::VectorXd row_sums_;
    std::optional<int> last_;
};

/// Expected state under `probs` (states numbered from 1).
[[nodiscard]] double expected_state(std::span<const double> probs);

/// Variance of the state under `probs`.
[[nodiscard]] double state_variance(std::span<const double> probs);

} // namespace netcast
