#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "cdmd/snapshot.hpp"

namespace cdmd {

/// Decomposition backend for the history matrix.
struct ExactSvdBackend {};
struct RandomizedSvdBackend {
    std::uint64_t seed = 0;
    std::size_t oversample = 10;
    std::size_t power_iters = 2;
};
using FitBackend = std::variant<ExactSvdBackend, RandomizedSvdBackend>;

/// Fit byproducts kept for inspection: the projected operator, the retained
/// spectrum, and the relative Frobenius misfit of the propagated history.
struct FitDetails {
    Matrix a_tilde;                   // r x r
    std::vector<double> sigma;        // retained singular values
    double training_residual = 0.0;   // ||Y'' - U A~ U^T Y'||_F / ||Y''||_F
    std::size_t dropped_rank = 0;     // requested rank minus retained rank
};

/// Fitted modal model: spatial modes, discrete and continuous spectrum,
/// amplitudes projected from the first snapshot.
struct DmdModel {
    ComplexMatrix psi;                         // state_dim x r modes
    std::vector<std::complex<double>> lambda;  // r discrete eigenvalues
    std::vector<std::complex<double>> omega;   // r continuous eigenvalues
    std::vector<std::complex<double>> b;       // r amplitudes
    std::size_t rank = 0;
    double dt = 0.0;
    CompartmentLayout layout;
    double cell_weight = 1.0;       // carried from the training snapshots
    double train_end = 0.0;         // time of the last training column
    FitDetails fit_details;
};

/// State evaluation of a model; imag_residual is the max-abs imaginary part
/// discarded when projecting back to real values, branch_warning marks a
/// continuous-time evaluation whose spectrum touches the closed negative
/// real axis (principal log branch caveat).
struct Reconstruction {
    std::vector<double> values;
    double imag_residual = 0.0;
    bool branch_warning = false;
};

/// Fits the model on a history of at least rank+1 columns.
DmdModel fit(const SnapshotMatrix& y, std::size_t rank, const FitBackend& backend = ExactSvdBackend{});

/// Independent per-compartment fits, order preserving; errors are tagged
/// with the compartment name.
std::vector<DmdModel> fit_uncoupled(const std::vector<SnapshotMatrix>& parts, std::size_t rank,
                                    const FitBackend& backend = ExactSvdBackend{});

/// Re(psi lambda^k b).
Reconstruction reconstruct_discrete(const DmdModel& model, std::size_t k);

/// Re(psi exp(omega t) b); matches the discrete form at t = k dt whenever no
/// eigenvalue lies on the closed negative real axis.
Reconstruction reconstruct_continuous(const DmdModel& model, double t);

/// Principal-branch log of the discrete spectrum over the output step:
/// omega = ln(lambda) / dt, with Im(omega) dt in (-pi, pi]. lambda = 0 maps
/// to a decayed-mode sentinel with real part -infinity.
std::vector<std::complex<double>> continuous_eigenvalues(
    std::span<const std::complex<double>> lambda, double dt);

bool is_decayed_mode(std::complex<double> omega);

/// Model file format (UTF-8 text): `DMDMODEL v1`, `rank=`, `dt=`, `layout=`,
/// optional `cell_weight=` / `train_end=` lines, then sections LAMBDA, OMEGA,
/// B (one `re,im` per line) and PSI (rank pairs per line, state_dim lines),
/// all at 17 significant digits.
void write_model_file(const std::string& path, const DmdModel& model);
DmdModel read_model_file(const std::string& path);

} // namespace cdmd
