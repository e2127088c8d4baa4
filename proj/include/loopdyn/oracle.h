// Copyright 2026 The loopdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOOPDYN_ORACLE_H
#define LOOPDYN_ORACLE_H

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "loopdyn/lattice.h"

namespace loopdyn::oracle {

/// Raised when a dense or iterative solve does not reach its tolerance.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A configuration of the whole 2d lattice as a bit mask; bit l is link l (1 = sigma^z -1).
using Config = uint32_t;

/// Exact Markov generator of the 2d model over all 2^num_links configurations.
///
/// Columns are source states: Gamma(m', m) is the rate m -> m'. Off-diagonal entries are
/// h + P^2(s_l(m)) for m' = m with link l flipped, and lambda for m' = A_v m.
template <typename Scalar>
struct GeneratorMatrix {
    using Sparse = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int32_t>;

    std::shared_ptr<const LatticeGeometry> geom;
    Scalar h{};
    Scalar lambda{};
    Sparse matrix;

    int64_t num_states() const { return matrix.cols(); }
    /// Largest |sum of a column|.
    Scalar max_column_sum() const;
    /// Smallest off-diagonal entry (must be >= 0).
    Scalar min_off_diagonal() const;
    /// Largest number of off-diagonal nonzeros in any column.
    int64_t max_off_diagonal_per_column() const;
};

/// Builds the full generator. Throws std::invalid_argument unless dim = 2 and L = 3, or if
/// h < 0 or lambda < 0.
template <typename Scalar = double>
GeneratorMatrix<Scalar> build_generator(std::shared_ptr<const LatticeGeometry> geom, Scalar h, Scalar lambda);

/// Number of defect plaquettes of configuration `m`.
int defect_count(const LatticeGeometry &geom, Config m);

/// Gauge orbits of configurations under the A_v group, labelled by a spanning-tree gauge fix.
///
/// Every orbit has 2^(num_vertices - 1) members. The generator commutes with every A_v, so the
/// chain lumps exactly onto orbits; for lambda > 0 all steady and left-steady vectors of the full
/// generator are constant on orbits.
class GaugeOrbits {
   public:
    explicit GaugeOrbits(const LatticeGeometry &geom);

    uint32_t num_orbits() const { return num_orbits_; }
    uint32_t orbit_size() const { return orbit_size_; }
    uint32_t orbit_of(Config m) const { return orbit_of_[m]; }
    /// Canonical (tree-gauge) member of an orbit.
    Config representative(uint32_t orbit) const { return reps_[orbit]; }
    /// Orbit label computed from scratch by gauge fixing, without the lookup table.
    uint32_t fix_gauge(Config m) const;

   private:
    std::vector<uint32_t> vertex_mask_;     // A_v as a link mask
    std::vector<std::pair<uint32_t, uint32_t>> tree_;  // (parent vertex, link) per BFS vertex
    std::vector<uint32_t> tree_order_;
    std::vector<uint32_t> cotree_links_;
    std::vector<uint16_t> orbit_of_;
    std::vector<Config> reps_;
    uint32_t num_orbits_ = 0;
    uint32_t orbit_size_ = 0;
};

/// Generator lumped onto gauge orbits (column = source orbit).
Eigen::SparseMatrix<double> lumped_generator(const GeneratorMatrix<double> &gen, const GaugeOrbits &orbits);

/// Number of closed communicating classes of the chain, by strongly connected components of the
/// transition graph. For a finite Markov generator this is the dimension of its null space.
int64_t count_closed_classes(const Eigen::SparseMatrix<double> &generator);
/// Members of each closed class.
std::vector<std::vector<int64_t>> closed_classes(const Eigen::SparseMatrix<double> &generator);

struct SteadyBasis {
    /// Right null vectors over full configurations, column k = steady distribution k
    /// (non-negative, mass 1).
    Eigen::MatrixXd right;
    /// Left null vectors, biorthonormal to `right`: left.col(a).dot(right.col(b)) = delta_ab.
    Eigen::MatrixXd left;
    int degeneracy = 0;
    /// Singular values of the lumped generator, ascending (first `degeneracy` below threshold).
    Eigen::VectorXd smallest_singular_values;
    double threshold = 0.0;
    double right_residual = 0.0;  // max_k ||Gamma v_k||_inf
    double left_residual = 0.0;   // max_k ||Gamma^T u_k||_inf
    double biorthogonality_error = 0.0;
    /// Closed-class count of the full generator (combinatorial cross-check).
    int64_t closed_class_count = 0;
};

/// Steady states of a generator with lambda > 0. The degeneracy is the number of singular values
/// of the lumped generator below tol * ||Gamma||_2; the basis vectors are the stationary
/// distributions of the closed classes, lifted uniformly over orbits, and the matching dual basis
/// of left null vectors. Throws NumericalError if the numeric null space and the closed classes
/// disagree or any residual exceeds `residual_tol`.
SteadyBasis steady_states(const GeneratorMatrix<double> &gen, double tol = 1e-10, double residual_tol = 1e-9);

/// Stationary weights (h/(1+h))^(defects/2), normalized to mass 1.
Eigen::VectorXd gibbs_distribution(const LatticeGeometry &geom, double h);

struct DetailedBalanceReport {
    /// max |Gamma(m,n) p(n) - Gamma(n,m) p(m)| over all pairs.
    double max_residual = 0.0;
    /// Same, divided by max over pairs of Gamma(m,n) p(n).
    double relative_residual = 0.0;
    /// max |S - S^T| for S = D^{-1/2} Gamma D^{1/2}, D = diag(p) (columns are sources).
    double symmetrized_asymmetry = 0.0;
};
/// Throws std::invalid_argument if p has a non-positive entry or the wrong size.
DetailedBalanceReport check_detailed_balance(const GeneratorMatrix<double> &gen, const Eigen::VectorXd &p);

/// T = 4 / ln((1+h)/h). `zero_limit` is set (and value = 0) for h = 0.
struct GibbsTemperature {
    double value = 0.0;
    bool zero_limit = false;
};
GibbsTemperature gibbs_temperature(double h);

struct SpectralGap {
    double gap = 0.0;
    /// Eigenvalues of the lumped generator with the largest real parts, descending.
    Eigen::VectorXcd leading_eigenvalues;
    int zero_eigenvalues = 0;
    double max_zero_eigenvalue = 0.0;
    /// ||Gamma x - mu x|| / ||x|| for the gap eigenpair, evaluated on the full generator.
    double residual = 0.0;
    /// True if the lumped gap exceeds 4*lambda; the full gap is then only bounded below by
    /// 4*lambda (non-invariant gauge sectors decay at least that fast).
    bool bounded_by_gauge_sectors = false;
};
/// Gap between the steady eigenvalues (|mu| < zero_tol) and the rest of the spectrum.
SpectralGap spectral_gap(const GeneratorMatrix<double> &gen, double zero_tol = 1e-10);

/// Generator of the noise term alone: h * sum_l (sigma^x_l - 1).
Eigen::SparseMatrix<double> noise_generator(std::shared_ptr<const LatticeGeometry> geom, double h);

struct PerturbationReport {
    /// M(a, b) = left_a^T dGamma right_b.
    Eigen::MatrixXd matrix;
    double max_off_diagonal = 0.0;
    double max_column_sum = 0.0;
    double max_row_sum = 0.0;
    /// Condition number of the left/right overlap matrix before biorthonormalization.
    double overlap_condition = 0.0;
};
/// First-order effective generator in the degenerate steady-state subspace.
PerturbationReport first_order_pt(const SteadyBasis &basis, const Eigen::SparseMatrix<double> &perturbation);

struct LeftLimitCheck {
    /// max_k || normalized(e^{Gamma^T t} v_k) - u_k ||_inf at the final time.
    double max_deviation = 0.0;
    int iterations = 0;
};
/// Evolves each right steady vector, read as a function on configurations, under Gamma^T until
/// convergence (uniformized power iteration on the lumped chain) and compares the limit with the
/// left steady basis.
LeftLimitCheck check_left_limit(const GeneratorMatrix<double> &gen, const SteadyBasis &basis, double tol = 1e-12,
                                int max_iterations = 200000);

}  // namespace loopdyn::oracle

#endif
