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

#include "loopdyn/oracle.h"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <string>

#include "loopdyn/dynamics.h"

namespace loopdyn::oracle {

namespace {

void require_small_2d(const LatticeGeometry &geom) {
    if (geom.dim() != 2) {
        throw std::invalid_argument("the exact generator is only built for 2d lattices");
    }
    if (geom.L() != 3) {
        throw std::invalid_argument("the exact generator is only built for L = 3 (2^18 states)");
    }
}

std::vector<Config> plaquette_masks(const LatticeGeometry &geom) {
    std::vector<Config> masks(geom.num_plaquettes(), 0);
    for (PlaquetteId p = 0; p < geom.num_plaquettes(); p++) {
        for (LinkId l : geom.links_of_plaquette(p)) {
            masks[p] |= Config{1} << l;
        }
    }
    return masks;
}

std::vector<Config> vertex_masks(const LatticeGeometry &geom) {
    std::vector<Config> masks(geom.num_vertices(), 0);
    for (VertexId v = 0; v < geom.num_vertices(); v++) {
        for (LinkId l : geom.links_of_vertex(v)) {
            masks[v] |= Config{1} << l;
        }
    }
    return masks;
}

// Iterative Tarjan SCC over the transition graph (edge m -> m' for each positive off-diagonal
// entry in column m). Returns the component id of every node and the component count.
std::pair<std::vector<int64_t>, int64_t> strongly_connected(const Eigen::SparseMatrix<double> &g) {
    using Index = Eigen::SparseMatrix<double>::StorageIndex;
    const int64_t n = g.cols();
    const Index *outer = g.outerIndexPtr();
    const Index *inner = g.innerIndexPtr();
    const double *val = g.valuePtr();
    std::vector<int64_t> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int64_t> stack;
    std::vector<std::pair<int64_t, int64_t>> work;  // (node, next edge position)
    int64_t counter = 0, n_comp = 0;
    for (int64_t root = 0; root < n; root++) {
        if (index[root] >= 0) {
            continue;
        }
        work.push_back({root, outer[root]});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!work.empty()) {
            auto &[v, pos] = work.back();
            bool descended = false;
            while (pos < outer[v + 1]) {
                int64_t w = inner[pos];
                double rate = val[pos];
                pos++;
                if (w == v || !(rate > 0)) {
                    continue;
                }
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    work.push_back({w, outer[w]});
                    descended = true;
                    break;
                }
                if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (descended) {
                continue;
            }
            int64_t node = v;
            if (low[node] == index[node]) {
                while (true) {
                    int64_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = n_comp;
                    if (w == node) {
                        break;
                    }
                }
                n_comp++;
            }
            work.pop_back();
            if (!work.empty()) {
                int64_t parent = work.back().first;
                low[parent] = std::min(low[parent], low[node]);
            }
        }
    }
    return {comp, n_comp};
}

Eigen::VectorXd lift_distribution(const Eigen::VectorXd &orbit_mass, const GaugeOrbits &orbits, int64_t n_states) {
    Eigen::VectorXd v(n_states);
    double scale = 1.0 / orbits.orbit_size();
    for (int64_t m = 0; m < n_states; m++) {
        v[m] = orbit_mass[orbits.orbit_of(static_cast<Config>(m))] * scale;
    }
    return v;
}

Eigen::VectorXd lift_function(const Eigen::VectorXd &orbit_value, const GaugeOrbits &orbits, int64_t n_states) {
    Eigen::VectorXd u(n_states);
    for (int64_t m = 0; m < n_states; m++) {
        u[m] = orbit_value[orbits.orbit_of(static_cast<Config>(m))];
    }
    return u;
}

}  // namespace

template <typename Scalar>
Scalar GeneratorMatrix<Scalar>::max_column_sum() const {
    Scalar worst{0};
    for (int64_t c = 0; c < matrix.outerSize(); c++) {
        Scalar sum{0};
        for (typename Sparse::InnerIterator it(matrix, c); it; ++it) {
            sum += it.value();
        }
        worst = std::max<Scalar>(worst, std::abs(sum));
    }
    return worst;
}

template <typename Scalar>
Scalar GeneratorMatrix<Scalar>::min_off_diagonal() const {
    Scalar lowest = std::numeric_limits<Scalar>::infinity();
    for (int64_t c = 0; c < matrix.outerSize(); c++) {
        for (typename Sparse::InnerIterator it(matrix, c); it; ++it) {
            if (it.row() != c) {
                lowest = std::min<Scalar>(lowest, it.value());
            }
        }
    }
    return lowest;
}

template <typename Scalar>
int64_t GeneratorMatrix<Scalar>::max_off_diagonal_per_column() const {
    int64_t worst = 0;
    for (int64_t c = 0; c < matrix.outerSize(); c++) {
        int64_t n = 0;
        for (typename Sparse::InnerIterator it(matrix, c); it; ++it) {
            n += it.row() != c && it.value() != Scalar{0};
        }
        worst = std::max(worst, n);
    }
    return worst;
}

template <typename Scalar>
GeneratorMatrix<Scalar> build_generator(std::shared_ptr<const LatticeGeometry> geom, Scalar h, Scalar lambda) {
    require_small_2d(*geom);
    if (!(h >= 0) || !(lambda >= 0)) {
        throw std::invalid_argument("h and lambda must be non-negative");
    }
    const uint32_t n_links = geom->num_links();
    const uint32_t n_vertices = geom->num_vertices();
    const int64_t n = int64_t{1} << n_links;
    auto pmask = plaquette_masks(*geom);
    auto vmask = vertex_masks(*geom);
    std::vector<uint32_t> link_pmask(n_links, 0);  // plaquette bitmask per link
    for (LinkId l = 0; l < n_links; l++) {
        for (PlaquetteId p : geom->plaquettes_of_link(l)) {
            link_pmask[l] |= 1u << p;
        }
    }

    GeneratorMatrix<Scalar> gen;
    gen.geom = geom;
    gen.h = h;
    gen.lambda = lambda;
    gen.matrix.resize(n, n);
    gen.matrix.reserve(Eigen::VectorXi::Constant(n, static_cast<int>(n_links + n_vertices + 1)));

    std::vector<std::pair<int64_t, Scalar>> column;
    for (int64_t m = 0; m < n; m++) {
        uint32_t defects = 0;
        for (PlaquetteId p = 0; p < pmask.size(); p++) {
            defects |= static_cast<uint32_t>(std::popcount(static_cast<Config>(m) & pmask[p]) & 1) << p;
        }
        column.clear();
        Scalar out{0};
        for (LinkId l = 0; l < n_links; l++) {
            int ndef = std::popcount(defects & link_pmask[l]);
            int s = geom->plaquettes_per_link() - 2 * ndef;
            Scalar rate = h + static_cast<Scalar>(glauber_weight(s));
            if (rate != Scalar{0}) {
                column.push_back({m ^ (int64_t{1} << l), rate});
                out += rate;
            }
        }
        if (lambda != Scalar{0}) {
            for (VertexId v = 0; v < n_vertices; v++) {
                column.push_back({m ^ static_cast<int64_t>(vmask[v]), lambda});
                out += lambda;
            }
        }
        column.push_back({m, -out});
        std::sort(column.begin(), column.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
        for (const auto &[row, value] : column) {
            gen.matrix.insert(row, m) = value;
        }
    }
    gen.matrix.makeCompressed();
    return gen;
}

template struct GeneratorMatrix<double>;
template struct GeneratorMatrix<long double>;
template GeneratorMatrix<double> build_generator<double>(std::shared_ptr<const LatticeGeometry>, double, double);
template GeneratorMatrix<long double> build_generator<long double>(std::shared_ptr<const LatticeGeometry>,
                                                                   long double, long double);

int defect_count(const LatticeGeometry &geom, Config m) {
    int n = 0;
    for (PlaquetteId p = 0; p < geom.num_plaquettes(); p++) {
        uint32_t parity = 0;
        for (LinkId l : geom.links_of_plaquette(p)) {
            parity ^= (m >> l) & 1;
        }
        n += static_cast<int>(parity);
    }
    return n;
}

GaugeOrbits::GaugeOrbits(const LatticeGeometry &geom) {
    require_small_2d(geom);
    const uint32_t n_links = geom.num_links();
    const uint32_t n_vertices = geom.num_vertices();
    vertex_mask_ = vertex_masks(geom);

    // BFS spanning tree from vertex 0.
    std::vector<char> seen(n_vertices, 0), tree_link(n_links, 0);
    tree_.assign(n_vertices, {0, 0});
    std::queue<uint32_t> queue;
    queue.push(0);
    seen[0] = 1;
    while (!queue.empty()) {
        uint32_t v = queue.front();
        queue.pop();
        tree_order_.push_back(v);
        for (LinkId l : geom.links_of_vertex(v)) {
            uint32_t a = geom.link_site(l);
            uint32_t b = geom.shifted(a, geom.link_direction(l), 1);
            uint32_t w = a == v ? b : a;
            if (!seen[w]) {
                seen[w] = 1;
                tree_[w] = {v, l};
                tree_link[l] = 1;
                queue.push(w);
            }
        }
    }
    for (LinkId l = 0; l < n_links; l++) {
        if (!tree_link[l]) {
            cotree_links_.push_back(l);
        }
    }
    num_orbits_ = 1u << cotree_links_.size();
    orbit_size_ = 1u << (n_vertices - 1);

    const uint64_t n = uint64_t{1} << n_links;
    orbit_of_.resize(n);
    reps_.assign(num_orbits_, 0);
    for (uint64_t m = 0; m < n; m++) {
        uint32_t o = fix_gauge(static_cast<Config>(m));
        orbit_of_[m] = static_cast<uint16_t>(o);
    }
    for (uint32_t o = 0; o < num_orbits_; o++) {
        Config rep = 0;
        for (size_t k = 0; k < cotree_links_.size(); k++) {
            if ((o >> k) & 1) {
                rep |= Config{1} << cotree_links_[k];
            }
        }
        reps_[o] = rep;
    }
}

uint32_t GaugeOrbits::fix_gauge(Config m) const {
    // Choose A_v bits so that every tree link becomes +1, then read the co-tree links.
    std::vector<uint8_t> g(vertex_mask_.size(), 0);
    Config fixed = m;
    for (size_t k = 1; k < tree_order_.size(); k++) {
        uint32_t w = tree_order_[k];
        auto [parent, l] = tree_[w];
        g[w] = static_cast<uint8_t>(((m >> l) & 1) ^ g[parent]);
    }
    for (size_t v = 0; v < g.size(); v++) {
        if (g[v]) {
            fixed ^= vertex_mask_[v];
        }
    }
    uint32_t o = 0;
    for (size_t k = 0; k < cotree_links_.size(); k++) {
        o |= ((fixed >> cotree_links_[k]) & 1) << k;
    }
    return o;
}

Eigen::SparseMatrix<double> lumped_generator(const GeneratorMatrix<double> &gen, const GaugeOrbits &orbits) {
    const uint32_t n = orbits.num_orbits();
    std::vector<Eigen::Triplet<double>> trips;
    for (uint32_t o = 0; o < n; o++) {
        Config rep = orbits.representative(o);
        for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, rep); it; ++it) {
            trips.emplace_back(static_cast<int>(orbits.orbit_of(static_cast<Config>(it.row()))), static_cast<int>(o),
                               it.value());
        }
    }
    Eigen::SparseMatrix<double> q(n, n);
    q.setFromTriplets(trips.begin(), trips.end());
    q.prune(0.0);
    return q;
}

std::vector<std::vector<int64_t>> closed_classes(const Eigen::SparseMatrix<double> &generator) {
    auto [comp, n_comp] = strongly_connected(generator);
    std::vector<char> leaks(n_comp, 0);
    for (int64_t c = 0; c < generator.outerSize(); c++) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(generator, c); it; ++it) {
            if (it.row() != c && it.value() > 0 && comp[it.row()] != comp[c]) {
                leaks[comp[c]] = 1;
            }
        }
    }
    std::vector<int64_t> slot(n_comp, -1);
    std::vector<std::vector<int64_t>> classes;
    for (int64_t v = 0; v < generator.cols(); v++) {
        int64_t k = comp[v];
        if (leaks[k]) {
            continue;
        }
        if (slot[k] < 0) {
            slot[k] = static_cast<int64_t>(classes.size());
            classes.emplace_back();
        }
        classes[slot[k]].push_back(v);
    }
    return classes;
}

int64_t count_closed_classes(const Eigen::SparseMatrix<double> &generator) {
    return static_cast<int64_t>(closed_classes(generator).size());
}

SteadyBasis steady_states(const GeneratorMatrix<double> &gen, double tol, double residual_tol) {
    if (!(gen.lambda > 0)) {
        throw std::invalid_argument("steady_states needs lambda > 0 to mix gauge orbits");
    }
    GaugeOrbits orbits(*gen.geom);
    Eigen::SparseMatrix<double> q = lumped_generator(gen, orbits);
    Eigen::MatrixXd qd(q);
    const int64_t n_states = gen.num_states();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(qd, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();  // descending
    const int n = static_cast<int>(sv.size());
    SteadyBasis out;
    out.threshold = tol * sv[0];
    int k = 0;
    while (k < n && sv[n - 1 - k] < out.threshold) {
        k++;
    }
    out.degeneracy = k;
    out.smallest_singular_values = sv.tail(std::min(n, k + 4)).reverse();

    auto classes = closed_classes(q);
    out.closed_class_count = count_closed_classes(gen.matrix);
    if (static_cast<int>(classes.size()) != k || out.closed_class_count != k) {
        throw NumericalError("null-space dimension " + std::to_string(k) + " disagrees with closed-class count " +
                             std::to_string(classes.size()) + " (lumped) / " +
                             std::to_string(out.closed_class_count) + " (full)");
    }

    // Stationary distribution of each closed class: Q_CC x = 0 with one row replaced by sum(x) = 1.
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, k);
    for (int c = 0; c < k; c++) {
        const auto &members = classes[c];
        const int sz = static_cast<int>(members.size());
        Eigen::MatrixXd block(sz, sz);
        for (int i = 0; i < sz; i++) {
            for (int j = 0; j < sz; j++) {
                block(i, j) = qd(members[i], members[j]);
            }
        }
        block.row(0).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sz);
        rhs[0] = 1.0;
        Eigen::VectorXd x = block.partialPivLu().solve(rhs);
        for (int i = 0; i < sz; i++) {
            mass(members[i], c) = x[i];
        }
    }

    // Left null space from the SVD, made dual to the class distributions.
    Eigen::MatrixXd left_null = svd.matrixU().rightCols(k);
    Eigen::MatrixXd overlap = left_null.transpose() * mass;
    Eigen::FullPivLU<Eigen::MatrixXd> olu(overlap);
    if (olu.rank() < k) {
        throw NumericalError("left and right null spaces are not dual (singular overlap)");
    }
    Eigen::MatrixXd left_orbit = left_null * overlap.inverse().transpose();

    out.right.resize(n_states, k);
    out.left.resize(n_states, k);
    for (int c = 0; c < k; c++) {
        out.right.col(c) = lift_distribution(mass.col(c), orbits, n_states);
        out.left.col(c) = lift_function(left_orbit.col(c), orbits, n_states);
    }
    Eigen::MatrixXd gv = gen.matrix * out.right;
    Eigen::MatrixXd gtu = gen.matrix.transpose() * out.left;
    out.right_residual = gv.cwiseAbs().maxCoeff();
    out.left_residual = gtu.cwiseAbs().maxCoeff();
    out.biorthogonality_error =
        (out.left.transpose() * out.right - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (out.right_residual > residual_tol || out.left_residual > residual_tol ||
        out.biorthogonality_error > residual_tol) {
        throw NumericalError("steady basis residuals too large: right " + std::to_string(out.right_residual) +
                             ", left " + std::to_string(out.left_residual) + ", biorthogonality " +
                             std::to_string(out.biorthogonality_error));
    }
    return out;
}

Eigen::VectorXd gibbs_distribution(const LatticeGeometry &geom, double h) {
    require_small_2d(geom);
    if (!(h > 0)) {
        throw std::invalid_argument("the Gibbs weights need h > 0");
    }
    const int64_t n = int64_t{1} << geom.num_links();
    const double w = h / (1.0 + h);
    auto pmask = plaquette_masks(geom);
    Eigen::VectorXd p(n);
    for (int64_t m = 0; m < n; m++) {
        int d = 0;
        for (Config mask : pmask) {
            d += std::popcount(static_cast<Config>(m) & mask) & 1;
        }
        p[m] = std::pow(w, d / 2);
    }
    return p / p.sum();
}

DetailedBalanceReport check_detailed_balance(const GeneratorMatrix<double> &gen, const Eigen::VectorXd &p) {
    if (p.size() != gen.num_states()) {
        throw std::invalid_argument("distribution size does not match the generator");
    }
    if (!(p.minCoeff() > 0)) {
        throw std::invalid_argument("detailed balance check needs a strictly positive distribution");
    }
    // Rows of the transpose are columns of the original; CSR view gives Gamma(n, m) lookups.
    Eigen::SparseMatrix<double, Eigen::RowMajor, int32_t> rows(gen.matrix);
    DetailedBalanceReport out;
    double scale = 0.0;
    for (int64_t n = 0; n < gen.matrix.outerSize(); n++) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, n); it; ++it) {
            int64_t m = it.row();
            if (m == n) {
                continue;
            }
            double forward = it.value();                 // Gamma(m, n)
            double backward = rows.coeff(n, m);          // Gamma(n, m)
            double flux = forward * p[n];
            scale = std::max(scale, flux);
            out.max_residual = std::max(out.max_residual, std::abs(flux - backward * p[m]));
            double s_mn = forward * std::sqrt(p[n] / p[m]);
            double s_nm = backward * std::sqrt(p[m] / p[n]);
            out.symmetrized_asymmetry = std::max(out.symmetrized_asymmetry, std::abs(s_mn - s_nm));
        }
    }
    out.relative_residual = scale > 0 ? out.max_residual / scale : 0.0;
    return out;
}

GibbsTemperature gibbs_temperature(double h) {
    if (!(h >= 0)) {
        throw std::invalid_argument("h must be non-negative");
    }
    if (h == 0) {
        return {0.0, true};
    }
    return {4.0 / std::log1p(1.0 / h), false};
}

SpectralGap spectral_gap(const GeneratorMatrix<double> &gen, double zero_tol) {
    GaugeOrbits orbits(*gen.geom);
    Eigen::MatrixXd qd(lumped_generator(gen, orbits));
    Eigen::EigenSolver<Eigen::MatrixXd> es(qd, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigen decomposition of the lumped generator did not converge");
    }
    Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<int> order(ev.size());
    for (int i = 0; i < ev.size(); i++) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev[a].real() > ev[b].real(); });

    SpectralGap out;
    int gap_index = -1;
    for (int i : order) {
        if (std::abs(ev[i]) < zero_tol) {
            out.zero_eigenvalues++;
            out.max_zero_eigenvalue = std::max(out.max_zero_eigenvalue, std::abs(ev[i]));
        } else if (gap_index < 0) {
            gap_index = i;
        }
    }
    if (gap_index < 0) {
        throw NumericalError("no non-steady eigenvalue found");
    }
    const int n_lead = std::min<int>(12, static_cast<int>(ev.size()));
    out.leading_eigenvalues.resize(n_lead);
    for (int i = 0; i < n_lead; i++) {
        out.leading_eigenvalues[i] = ev[order[i]];
    }
    std::complex<double> mu = ev[gap_index];
    out.gap = -mu.real();
    out.bounded_by_gauge_sectors = out.gap > 4.0 * gen.lambda;

    // Residual of the lifted eigenvector on the full generator.
    // Eigenvector by inverse iteration with a slightly shifted mu.
    const int n_orbits = static_cast<int>(qd.rows());
    std::complex<double> shift = mu + std::complex<double>(1e-10 * std::max(1.0, std::abs(mu)), 0.0);
    Eigen::MatrixXcd shifted = qd.cast<std::complex<double>>();
    shifted.diagonal().array() -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd x(n_orbits);
    for (int i = 0; i < n_orbits; i++) {
        x[i] = std::sin(0.7 * i + 0.3);  // generic start, no orbit symmetry
    }
    for (int it = 0; it < 3; it++) {
        x = lu.solve(x);
        x /= x.norm();
    }
    const int64_t n_states = gen.num_states();
    Eigen::VectorXd re(n_states), im(n_states);
    for (int64_t m = 0; m < n_states; m++) {
        auto value = x[orbits.orbit_of(static_cast<Config>(m))];
        re[m] = value.real();
        im[m] = value.imag();
    }
    Eigen::VectorXd gre = gen.matrix * re;
    Eigen::VectorXd gim = gen.matrix * im;
    // (G - mu)(re + i im) = (G re - a re + b im) + i (G im - a im - b re), mu = a + ib.
    Eigen::VectorXd r1 = gre - mu.real() * re + mu.imag() * im;
    Eigen::VectorXd r2 = gim - mu.real() * im - mu.imag() * re;
    double norm = std::sqrt(re.squaredNorm() + im.squaredNorm());
    out.residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / norm;
    return out;
}

Eigen::SparseMatrix<double> noise_generator(std::shared_ptr<const LatticeGeometry> geom, double h) {
    require_small_2d(*geom);
    const uint32_t n_links = geom->num_links();
    const int64_t n = int64_t{1} << n_links;
    Eigen::SparseMatrix<double> g(n, n);
    g.reserve(Eigen::VectorXi::Constant(n, static_cast<int>(n_links + 1)));
    std::vector<std::pair<int64_t, double>> column;
    for (int64_t m = 0; m < n; m++) {
        column.clear();
        for (LinkId l = 0; l < n_links; l++) {
            column.push_back({m ^ (int64_t{1} << l), h});
        }
        column.push_back({m, -h * n_links});
        std::sort(column.begin(), column.end());
        for (const auto &[row, value] : column) {
            g.insert(row, m) = value;
        }
    }
    g.makeCompressed();
    return g;
}

PerturbationReport first_order_pt(const SteadyBasis &basis, const Eigen::SparseMatrix<double> &perturbation) {
    PerturbationReport out;
    const int k = basis.degeneracy;
    Eigen::MatrixXd overlap = basis.left.transpose() * basis.right;
    Eigen::JacobiSVD<Eigen::MatrixXd> osvd(overlap);
    out.overlap_condition = osvd.singularValues()[0] / osvd.singularValues()[k - 1];
    if (!(out.overlap_condition < 1e8)) {
        throw NumericalError("left/right steady bases are ill-conditioned for perturbation theory");
    }
    Eigen::MatrixXd moved = perturbation * basis.right;
    out.matrix = basis.left.transpose() * moved;
    for (int a = 0; a < k; a++) {
        for (int b = 0; b < k; b++) {
            if (a != b) {
                out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(out.matrix(a, b)));
            }
        }
    }
    out.max_column_sum = out.matrix.colwise().sum().cwiseAbs().maxCoeff();
    out.max_row_sum = out.matrix.rowwise().sum().cwiseAbs().maxCoeff();
    return out;
}

LeftLimitCheck check_left_limit(const GeneratorMatrix<double> &gen, const SteadyBasis &basis, double tol,
                                int max_iterations) {
    GaugeOrbits orbits(*gen.geom);
    Eigen::SparseMatrix<double> qt = lumped_generator(gen, orbits).transpose();
    const double rate = 1.02 * qt.diagonal().cwiseAbs().maxCoeff();
    const uint32_t n = orbits.num_orbits();
    LeftLimitCheck out;
    for (int c = 0; c < basis.degeneracy; c++) {
        Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
        for (int64_t m = 0; m < gen.num_states(); m++) {
            uint32_t o = orbits.orbit_of(static_cast<Config>(m));
            mass[o] += basis.right(m, c);
            target[o] = basis.left(m, c);
        }
        Eigen::VectorXd f = mass;
        int it = 0;
        for (; it < max_iterations; it++) {
            Eigen::VectorXd df = qt * f;
            f += df / rate;
            if (df.cwiseAbs().maxCoeff() < tol * rate * f.cwiseAbs().maxCoeff()) {
                break;
            }
        }
        if (it == max_iterations) {
            throw NumericalError("adjoint evolution did not converge");
        }
        f /= f.dot(mass);
        out.max_deviation = std::max(out.max_deviation, (f - target).cwiseAbs().maxCoeff());
        out.iterations = std::max(out.iterations, it);
    }
    return out;
}

}  // namespace loopdyn::oracle
