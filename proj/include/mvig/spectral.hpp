#pragma once

#include <vector>

#include "mvig/mvig_graph.hpp"

namespace mvig {

struct SpectralSignature {
    std::vector<double> eigenvalues_w;  // sorted descending
    double lambda2_l = 0.0;
    double c_flow = 0.0;
    double f_frag = 0.0;
    double epsilon = 1e-6;
};

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, sorted
/// descending. matrix is n*n row-major. Requires n <= 64 and symmetry
/// within 1e-10; iterates until the off-diagonal Frobenius norm drops
/// below 1e-12.
std::vector<double> eigen_sym(const std::vector<double>& matrix, int n);

/// Graph Laplacian L = D - W of the weight matrix, n*n row-major.
std::vector<double> laplacian(const MutualViewGraph& graph);

/// lambda_1(W) / (n - 1). Requires n >= 2.
double flow_capacity(const MutualViewGraph& graph);

/// 1 / (lambda_2(L) + epsilon). Requires n >= 2 and epsilon > 0.
double consensus_fragility(const MutualViewGraph& graph, double epsilon = 1e-6);

/// 1 - exp(-alpha * f_frag * (1 - c_flow)). c_flow outside [0,1] is clamped
/// with a warning on stderr.
double success_probability(double c_flow, double f_frag, double alpha = 1.0);

/// Strict conjunction c_flow < tau1 and f_frag > tau2.
bool is_system_vulnerable(const SpectralSignature& signature,
                          double tau1 = 0.5, double tau2 = 1.0);

SpectralSignature spectral_signature(const MutualViewGraph& graph,
                                     double epsilon = 1e-6);

}  // namespace mvig
