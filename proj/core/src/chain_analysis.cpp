#include "teamvar/chain_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stack>

namespace teamvar {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd rows, const NumericSettings& num)
    : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.rows() != rows_.cols())
        throw InvalidModelError("transition matrix must be square and nonempty, got " +
                                std::to_string(rows_.rows()) + "x" + std::to_string(rows_.cols()));
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
            const double p = rows_(i, j);
            if (!std::isfinite(p) || p < -num.row_sum_tol || p > 1.0 + num.row_sum_tol)
                throw InvalidModelError("transition probability out of [0,1] at (" +
                                        std::to_string(i) + "," + std::to_string(j) +
                                        "): " + std::to_string(p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > num.row_sum_tol)
            throw InvalidModelError("transition row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum) + ", expected 1");
    }
}

namespace {

// Iterative Tarjan SCC over the positive-probability graph. Returns the
// component id of each state; ids are assigned in reverse topological order.
std::vector<int> strongly_connected_components(const Eigen::MatrixXd& P, int& n_components) {
    const int n = static_cast<int>(P.rows());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P(i, j) > 0.0) adj[i].push_back(j);

    std::vector<int> index(n, -1), lowlink(n, 0), component(n, -1);
    std::vector<bool> on_stack(n, false);
    std::stack<int> scc_stack;
    int next_index = 0;
    n_components = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::stack<Frame> call;
        call.push({root, 0});
        index[root] = lowlink[root] = next_index++;
        scc_stack.push(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& f = call.top();
            if (f.edge < adj[f.v].size()) {
                const int w = adj[f.v][f.edge++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    scc_stack.push(w);
                    on_stack[w] = true;
                    call.push({w, 0});
                } else if (on_stack[w]) {
                    lowlink[f.v] = std::min(lowlink[f.v], index[w]);
                }
            } else {
                if (lowlink[f.v] == index[f.v]) {
                    int w;
                    do {
                        w = scc_stack.top();
                        scc_stack.pop();
                        on_stack[w] = false;
                        component[w] = n_components;
                    } while (w != f.v);
                    ++n_components;
                }
                const int v = f.v;
                call.pop();
                if (!call.empty())
                    lowlink[call.top().v] = std::min(lowlink[call.top().v], lowlink[v]);
            }
        }
    }
    return component;
}

} // namespace

ChainStructure classify_chain(const TransitionMatrix& P) {
    const int n = P.n_states();
    int n_components = 0;
    const std::vector<int> component = strongly_connected_components(P.rows(), n_components);

    // A component is closed iff none of its states has positive probability
    // of leaving it.
    std::vector<bool> closed(n_components, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P(i, j) > 0.0 && component[i] != component[j]) closed[component[i]] = false;

    ChainStructure out;
    out.n_closed_classes = static_cast<int>(std::count(closed.begin(), closed.end(), true));
    out.kind = out.n_closed_classes == 1 ? ChainClass::Unichain : ChainClass::Multichain;
    out.recurrent_mask.assign(n, false);
    for (int i = 0; i < n; ++i) out.recurrent_mask[i] = closed[component[i]];
    return out;
}

namespace {

Eigen::RowVectorXd stationary_from_structure(const TransitionMatrix& P,
                                             const ChainStructure& structure,
                                             const NumericSettings& num) {
    const int n = P.n_states();
    // Balance equations pi (P - I) = 0 transposed, with the last equation
    // replaced by the normalization pi . 1 = 1. The rows of P^T - I always
    // sum to zero, so dropping any one of them keeps rank n-1 and the
    // replaced system is nonsingular for a unichain.
    Eigen::MatrixXd A = P.rows().transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(num.solve_tol);
    if (!lu.isInvertible())
        throw SingularError("stationary distribution solve is rank-deficient beyond tolerance " +
                            std::to_string(num.solve_tol));
    Eigen::VectorXd pi = lu.solve(b);

    // Exact zeros on transient states, clamp roundoff negatives, renormalize.
    for (int i = 0; i < n; ++i) {
        if (!structure.recurrent_mask[i])
            pi(i) = 0.0;
        else if (pi(i) < 0.0)
            pi(i) = 0.0;
    }
    const double total = pi.sum();
    if (!(total > 0.0))
        throw SingularError("stationary distribution solve produced a non-normalizable vector");
    pi /= total;
    return pi.transpose();
}

} // namespace

Eigen::RowVectorXd stationary_distribution(const TransitionMatrix& P, const NumericSettings& num) {
    const ChainStructure structure = classify_chain(P);
    if (structure.kind == ChainClass::Multichain)
        throw MultichainError("chain has " + std::to_string(structure.n_closed_classes) +
                              " closed classes; stationary distribution is not unique");
    return stationary_from_structure(P, structure, num);
}

ChainAnalysis solve_poisson(const TransitionMatrix& P, const Eigen::VectorXd& cost,
                            const NumericSettings& num) {
    const int n = P.n_states();
    if (cost.size() != n)
        throw AnalysisMismatchError("cost vector length " + std::to_string(cost.size()) +
                                    " does not match " + std::to_string(n) + " states");
    if (!cost.allFinite()) throw InvalidModelError("cost vector has non-finite entries");

    const ChainStructure structure = classify_chain(P);
    if (structure.kind == ChainClass::Multichain)
        throw MultichainError("chain has " + std::to_string(structure.n_closed_classes) +
                              " closed classes; Poisson equation is not well-posed");

    ChainAnalysis out;
    out.recurrent_mask = structure.recurrent_mask;
    out.pi = stationary_from_structure(P, structure, num);
    out.avg_cost = out.pi.dot(cost);

    // Fundamental-matrix system: (I - P + 1 pi) g = c - J 1. Left-multiplying
    // by pi shows any solution already satisfies pi . g = 0; the final
    // subtraction just removes numerical drift.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - P.rows() +
                        Eigen::VectorXd::Ones(n) * out.pi;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(num.solve_tol);
    if (!lu.isInvertible())
        throw SingularError("Poisson solve is rank-deficient beyond tolerance " +
                            std::to_string(num.solve_tol));
    out.potential = lu.solve(cost - out.avg_cost * Eigen::VectorXd::Ones(n));
    out.potential.array() -= out.pi.dot(out.potential);
    return out;
}

} // namespace teamvar
