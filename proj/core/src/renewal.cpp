#include "structpop/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "structpop/errors.hpp"

namespace structpop {

namespace {

void check_history(const AgeKernelSet& kernels, const BirthHistory& phi) {
    if (phi.n_time != kernels.n_ages ||
        std::abs(phi.dt - kernels.dt) > 1e-12 * std::max(1.0, kernels.dt))
        throw Error(ErrorCode::StepMismatch,
                    "history step " + std::to_string(phi.dt) + " x " +
                        std::to_string(phi.n_time) + " does not match Gamma/M = " +
                        std::to_string(kernels.dt) + " x " + std::to_string(kernels.n_ages));
}

}  // namespace

BirthTrajectory solve_renewal(const AgeKernelSet& kernels, const Grid& grid,
                              const BirthHistory& phi, double T) {
    check_history(kernels, phi);
    const int m_ages = kernels.n_ages;
    const double dt = kernels.dt;
    const std::size_t size = grid.size();
    BirthTrajectory traj;
    traj.dt = dt;
    traj.n_size = grid.order();
    traj.hist_len = m_ages;
    traj.n_steps = std::max(1, static_cast<int>(std::lround(T / dt)));
    traj.values.assign(static_cast<std::size_t>(m_ages + traj.n_steps + 1) * size, 0.0);
    traj.phi_final.assign(phi.col(m_ages).begin(), phi.col(m_ages).end());
    for (int k = -m_ages; k < 0; ++k) {
        auto src = phi.col(k + m_ages);
        std::copy(src.begin(), src.end(), traj.col(k).begin());
    }

    std::vector<double> acc(size), shifted(size);
    for (int k = 0; k <= traj.n_steps; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int m = 1; m <= m_ages; ++m) {
            kernels.recipe(m).apply(traj.col(k - m), shifted);
            for (std::size_t i = 0; i < size; ++i) acc[i] += dt * shifted[i];
        }
        kernels.recruitment.apply(acc, traj.col(k));
    }
    return traj;
}

Density forcing_function(const AgeKernelSet& kernels, const Grid& grid,
                         const BirthHistory& phi, double t) {
    check_history(kernels, phi);
    if (t < 0)
        throw Error(ErrorCode::OutOfWindow, "forcing_function needs t >= 0");
    const std::size_t size = grid.size();
    Density out(size, 0.0);
    if (t >= kernels.gamma_horizon) return out;  // exactly zero beyond the window
    std::vector<double> slice(size), shifted(size), acc(size, 0.0);
    for (int m = 1; m <= kernels.n_ages; ++m) {
        double age = m * kernels.dt;
        if (age <= t) continue;
        for (std::size_t i = 0; i < size; ++i)
            slice[i] = phi.interpolate(grid, grid.nodes[i], t - age);
        kernels.recipe(m).apply(slice, shifted);
        for (std::size_t i = 0; i < size; ++i) acc[i] += kernels.dt * shifted[i];
    }
    kernels.recruitment.apply(acc, out.values);
    return out;
}

std::vector<Density> forcing_sequence(const AgeKernelSet& kernels, const Grid& grid,
                                      const BirthHistory& phi, int n_steps) {
    check_history(kernels, phi);
    const std::size_t size = grid.size();
    std::vector<Density> f(n_steps + 1, Density(size, 0.0));
    std::vector<double> shifted(size), acc(size);
    for (int k = 0; k <= n_steps && k < kernels.n_ages; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int m = k + 1; m <= kernels.n_ages; ++m) {
            kernels.recipe(m).apply(phi.col(k - m + kernels.n_ages), shifted);
            for (std::size_t i = 0; i < size; ++i) acc[i] += kernels.dt * shifted[i];
        }
        kernels.recruitment.apply(acc, f[k].values);
    }
    return f;
}

ResolventKernel::ResolventKernel(const AgeKernelSet& kernels, const Grid& grid, double T)
    : kernels_(&kernels), grid_(&grid) {
    if (T > 8.0 * kernels.gamma_horizon + 1e-12)
        throw Error(ErrorCode::HorizonTooLong, "resolvent horizon " + std::to_string(T) +
                                                   " exceeds 8 Gamma = " +
                                                   std::to_string(8.0 * kernels.gamma_horizon));
    n_steps_ = std::max(1, static_cast<int>(std::lround(T / kernels.dt)));
}

std::vector<Density> ResolventKernel::actions(const Density& psi) const {
    const std::size_t size = grid_->size();
    const int m_ages = kernels_->n_ages;
    const double dt = kernels_->dt;
    std::vector<Density> ell(n_steps_ + 1, Density(size, 0.0));
    std::vector<double> acc(size), shifted(size);
    // ell_0 = C psi
    kernels_->recruitment.apply(psi.values, ell[0].values);
    for (int k = 1; k <= n_steps_; ++k) {
        if (k <= m_ages)
            kernels_->recipe(k).apply(psi.values, acc);
        else
            std::fill(acc.begin(), acc.end(), 0.0);
        for (int m = 1; m <= std::min(k, m_ages); ++m) {
            kernels_->recipe(m).apply(ell[k - m].values, shifted);
            for (std::size_t i = 0; i < size; ++i) acc[i] += dt * shifted[i];
        }
        kernels_->recruitment.apply(acc, ell[k].values);
    }
    return ell;
}

std::vector<Density> ResolventKernel::convolve(const std::vector<Density>& f) const {
    const std::size_t size = grid_->size();
    const int m_ages = kernels_->n_ages;
    const double dt = kernels_->dt;
    // g_j = f_j + dt C f_j (the boundary term of the discrete convolution
    // algebra; see header).
    std::vector<Density> g(f.size(), Density(size, 0.0));
    std::vector<double> tmp(size);
    for (std::size_t j = 0; j < f.size(); ++j) {
        kernels_->recruitment.apply(f[j].values, tmp);
        for (std::size_t i = 0; i < size; ++i) g[j][i] = f[j][i] + dt * tmp[i];
    }
    std::vector<Density> c(n_steps_ + 1, Density(size, 0.0));
    std::vector<double> acc(size), shifted(size), mix(size);
    for (int k = 1; k <= n_steps_; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int m = 1; m <= std::min(k, m_ages); ++m) {
            int j = k - m;
            for (std::size_t i = 0; i < size; ++i)
                mix[i] = (j < static_cast<int>(g.size()) ? g[j][i] : 0.0) + c[j][i];
            kernels_->recipe(m).apply(mix, shifted);
            for (std::size_t i = 0; i < size; ++i) acc[i] += dt * shifted[i];
        }
        kernels_->recruitment.apply(acc, c[k].values);
    }
    return c;
}

ResolventKernel build_resolvent_kernel(const AgeKernelSet& kernels, const Grid& grid,
                                       double T) {
    return ResolventKernel(kernels, grid, T);
}

BirthHistory shift_segment(const BirthTrajectory& traj, double t) {
    const int m_ages = traj.hist_len;
    const std::size_t size = static_cast<std::size_t>(traj.n_size) + 1;
    double steps = t / traj.dt;
    int k0 = static_cast<int>(std::lround(steps));
    if (std::abs(steps - k0) > 1e-9 || k0 < 0 || k0 > traj.n_steps)
        throw Error(ErrorCode::OutOfWindow,
                    "t = " + std::to_string(t) + " not on the trajectory time grid");
    BirthHistory segment;
    segment.n_size = traj.n_size;
    segment.n_time = m_ages;
    segment.dt = traj.dt;
    segment.values.resize(size * (m_ages + 1));
    for (int c = 0; c <= m_ages; ++c) {
        int j = k0 - m_ages + c;
        std::span<const double> src;
        if (k0 == 0 && c == m_ages)
            src = {traj.phi_final.data(), size};  // S(0) is the identity
        else
            src = traj.col(j);
        std::copy(src.begin(), src.end(), segment.col(c).begin());
    }
    return segment;
}

}  // namespace structpop
