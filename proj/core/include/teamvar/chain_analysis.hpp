#pragma once

#include <vector>

#include <Eigen/Dense>

#include "teamvar/errors.hpp"
#include "teamvar/numeric.hpp"

namespace teamvar {

/// A row-stochastic matrix over a finite state space. Construction validates
/// that every row sums to one (within row_sum_tol) and every entry lies in
/// [0, 1].
class TransitionMatrix {
public:
    explicit TransitionMatrix(Eigen::MatrixXd rows, const NumericSettings& num = {});

    int n_states() const { return static_cast<int>(rows_.rows()); }
    const Eigen::MatrixXd& rows() const { return rows_; }
    double operator()(int from, int to) const { return rows_(from, to); }

private:
    Eigen::MatrixXd rows_;
};

enum class ChainClass { Unichain, Multichain };

/// Communication structure of the positive-probability graph of a chain.
struct ChainStructure {
    ChainClass kind = ChainClass::Unichain;
    /// Marks states belonging to closed communicating classes. For a unichain
    /// this is the unique recurrent class; transient states are false.
    std::vector<bool> recurrent_mask;
    /// Number of closed communicating classes (>= 1 for any finite chain).
    int n_closed_classes = 0;
};

/// Steady-state and bias analysis of one chain for one cost vector.
struct ChainAnalysis {
    /// Stationary distribution, zero on transient states.
    Eigen::RowVectorXd pi;
    /// Long-run average cost pi . c.
    double avg_cost = 0.0;
    /// Potential (bias) vector solving (I - P) g = c - avg_cost * 1 with the
    /// normalization pi . g = 0.
    Eigen::VectorXd potential;
    std::vector<bool> recurrent_mask;
};

/// Classifies a chain as unichain or multichain via strongly-connected
/// component analysis of the positive-probability graph. Total: never throws
/// for a valid TransitionMatrix.
ChainStructure classify_chain(const TransitionMatrix& P);

/// Unique stationary distribution of a unichain, computed by a direct solve
/// of the balance equations with one equation replaced by the normalization
/// row. Throws MultichainError or SingularError.
Eigen::RowVectorXd stationary_distribution(const TransitionMatrix& P,
                                           const NumericSettings& num = {});

/// Solves the Poisson equation for the pair (P, cost) via the
/// fundamental-matrix system (I - P + 1 pi) g = c - avg_cost * 1. The
/// returned potential satisfies pi . g = 0.
ChainAnalysis solve_poisson(const TransitionMatrix& P, const Eigen::VectorXd& cost,
                            const NumericSettings& num = {});

} // namespace teamvar
