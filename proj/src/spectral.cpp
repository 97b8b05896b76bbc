#include "mvig/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mvig {

namespace {

double off_diagonal_norm(const std::vector<double>& a, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = a[static_cast<std::size_t>(i) * n + j];
            sum += 2.0 * v * v;
        }
    return std::sqrt(sum);
}

}  // namespace

std::vector<double> eigen_sym(const std::vector<double>& matrix, int n) {
    if (n <= 0 || n > 64) throw std::invalid_argument("eigen_sym: n must be in [1, 64]");
    if (matrix.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("eigen_sym: size mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(matrix[static_cast<std::size_t>(i) * n + j] -
                          matrix[static_cast<std::size_t>(j) * n + i]) > 1e-10)
                throw std::invalid_argument("eigen_sym: matrix not symmetric");

    std::vector<double> a = matrix;
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * n + j];
    };

    // Cyclic Jacobi: sweep all (p, q) pairs, each rotation annihilating one
    // off-diagonal entry. Quadratic convergence makes the 1e-12 target a
    // handful of sweeps for n <= 64.
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_diagonal_norm(a, n) < 1e-12) break;
        if (sweep == 99) throw std::runtime_error("eigen_sym: no convergence");
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p), aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }

    std::vector<double> eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = at(i, i);
    std::sort(eigs.begin(), eigs.end(), std::greater<double>());
    return eigs;
}

std::vector<double> laplacian(const MutualViewGraph& graph) {
    const int n = graph.n;
    std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double degree = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = graph.weight(i, j);
            degree += w;
            l[static_cast<std::size_t>(i) * n + j] = -w;
        }
        l[static_cast<std::size_t>(i) * n + i] = degree;
    }
    return l;
}

double flow_capacity(const MutualViewGraph& graph) {
    if (graph.n < 2) throw std::invalid_argument("flow_capacity: need n >= 2");
    const std::vector<double> eigs = eigen_sym(graph.weights, graph.n);
    return eigs.front() / (graph.n - 1);
}

double consensus_fragility(const MutualViewGraph& graph, double epsilon) {
    if (graph.n < 2) throw std::invalid_argument("consensus_fragility: need n >= 2");
    if (epsilon <= 0.0) throw std::invalid_argument("consensus_fragility: epsilon must be > 0");
    const std::vector<double> eigs = eigen_sym(laplacian(graph), graph.n);
    // eigs is descending; lambda_2 is the second smallest.
    const double lambda2 = eigs[graph.n - 2];
    return 1.0 / (lambda2 + epsilon);
}

double success_probability(double c_flow, double f_frag, double alpha) {
    if (f_frag < 0.0) throw std::invalid_argument("success_probability: f_frag must be >= 0");
    if (alpha <= 0.0) throw std::invalid_argument("success_probability: alpha must be > 0");
    if (c_flow < 0.0 || c_flow > 1.0) {
        std::cerr << "success_probability: clamping c_flow " << c_flow
                  << " into [0,1]\n";
        c_flow = std::min(1.0, std::max(0.0, c_flow));
    }
    return 1.0 - std::exp(-alpha * f_frag * (1.0 - c_flow));
}

bool is_system_vulnerable(const SpectralSignature& signature, double tau1,
                          double tau2) {
    if (tau1 <= 0.0 || tau2 <= 0.0)
        throw std::invalid_argument("is_system_vulnerable: thresholds must be > 0");
    return signature.c_flow < tau1 && signature.f_frag > tau2;
}

SpectralSignature spectral_signature(const MutualViewGraph& graph,
                                     double epsilon) {
    SpectralSignature sig;
    sig.epsilon = epsilon;
    sig.eigenvalues_w = eigen_sym(graph.weights, graph.n);
    if (graph.n >= 2) {
        const std::vector<double> leigs = eigen_sym(laplacian(graph), graph.n);
        sig.lambda2_l = leigs[graph.n - 2];
        sig.c_flow = sig.eigenvalues_w.front() / (graph.n - 1);
        sig.f_frag = 1.0 / (sig.lambda2_l + epsilon);
    }
    return sig;
}

}  // namespace mvig
