#include "cdmd/dmd.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cdmd/eig.hpp"
#include "cdmd/lstsq.hpp"
#include "cdmd/svd.hpp"

namespace cdmd {

namespace {

using cd = std::complex<double>;

// Integer power by repeated squaring; 0^0 = 1 by convention.
cd cpow_int(cd base, std::size_t k) {
    if (k == 0) return cd(1.0, 0.0);
    if (base == cd(0.0, 0.0)) return cd(0.0, 0.0);
    cd result(1.0, 0.0);
    cd acc = base;
    while (k > 0) {
        if (k & 1u) result *= acc;
        acc *= acc;
        k >>= 1u;
    }
    return result;
}

Reconstruction evaluate_modes(const DmdModel& model, const std::vector<cd>& weights,
                              bool branch_warning) {
    const std::size_t n = model.psi.rows();
    std::vector<cd> coeff(model.rank);
    for (std::size_t j = 0; j < model.rank; ++j) coeff[j] = weights[j] * model.b[j];

    Reconstruction rec;
    rec.values.assign(n, 0.0);
    rec.branch_warning = branch_warning;
    for (std::size_t i = 0; i < n; ++i) {
        cd s = 0.0;
        for (std::size_t j = 0; j < model.rank; ++j) s += model.psi(i, j) * coeff[j];
        rec.values[i] = s.real();
        rec.imag_residual = std::max(rec.imag_residual, std::fabs(s.imag()));
    }
    return rec;
}

bool on_closed_negative_real_axis(cd lambda) {
    return lambda.imag() == 0.0 && lambda.real() <= 0.0;
}

void write_complex_line(std::ofstream& out, cd v) {
    out << format_full(v.real()) << ',' << format_full(v.imag()) << "\n";
}

cd parse_complex_pair(const std::string& token) {
    const auto comma = token.find(',');
    if (comma == std::string::npos) throw InputError("expected 're,im' pair: '" + token + "'");
    return cd(parse_double(token.substr(0, comma)), parse_double(token.substr(comma + 1)));
}

} // namespace

std::vector<cd> continuous_eigenvalues(std::span<const cd> lambda, double dt) {
    if (!(dt > 0.0)) throw InputError("continuous_eigenvalues: dt must be positive");
    std::vector<cd> omega(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] == cd(0.0, 0.0)) {
            omega[i] = cd(-std::numeric_limits<double>::infinity(), 0.0);
        } else {
            omega[i] = std::log(lambda[i]) / dt; // principal branch
        }
    }
    return omega;
}

bool is_decayed_mode(cd omega) { return std::isinf(omega.real()) && omega.real() < 0.0; }

DmdModel fit(const SnapshotMatrix& y, std::size_t rank, const FitBackend& backend) {
    y.validate();
    const std::size_t n = y.data.rows();
    const std::size_t m = y.columns() - 1;
    if (y.columns() < 2) throw InputError("fit: needs at least two snapshot columns");
    if (rank < 1 || rank > std::min(n, m)) throw InputError("fit: rank out of range");
    if (y.columns() < rank + 1) throw InputError("fit: needs at least rank+1 columns");

    auto [first, second] = split_pair(y);

    SvdFactors f = std::visit(
        [&](const auto& be) -> SvdFactors {
            using T = std::decay_t<decltype(be)>;
            if constexpr (std::is_same_v<T, ExactSvdBackend>) {
                return truncated_svd(first, rank);
            } else {
                return randomized_svd(first, rank, be.oversample, be.power_iters, be.seed);
            }
        },
        backend);

    const std::size_t r = f.rank_used;
    if (r == 0) throw NumericError("fit: history matrix carries no dynamics (zero data)");

    // a_tilde = U_r^T Y'' V_r Sigma_r^-1
    Matrix ut_second(r, m);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += f.u(k, i) * second(k, j);
            ut_second(i, j) = s;
        }
    Matrix a_tilde(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += ut_second(i, k) * f.v(k, j);
            a_tilde(i, j) = s / f.sigma[j];
        }

    EigPair eig = eig_real(a_tilde);

    // psi = Y'' V_r Sigma_r^-1 W
    Matrix second_v(n, r);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += second(i, k) * f.v(k, j);
            second_v(i, j) = s / f.sigma[j];
        }
    ComplexMatrix psi = multiply(second_v, eig.vectors);

    DmdModel model;
    model.psi = std::move(psi);
    model.lambda = eig.values;
    model.omega = continuous_eigenvalues(model.lambda, y.dt);
    model.rank = r;
    model.dt = y.dt;
    model.layout = y.layout;
    model.cell_weight = y.cell_weight;
    model.train_end = y.dt * static_cast<double>(m);

    const std::vector<double> u0 = y.data.column(0);
    ComplexLstsq ls = complex_least_squares(model.psi, u0);
    model.b = std::move(ls.solution);

    model.fit_details.a_tilde = a_tilde;
    model.fit_details.sigma.assign(f.sigma.begin(), f.sigma.begin() + r);
    model.fit_details.dropped_rank = rank - r;

    // Training misfit of the projected propagation U A~ U^T Y' vs Y''.
    Matrix ut_first(r, m);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += f.u(k, i) * first(k, j);
            ut_first(i, j) = s;
        }
    const Matrix propagated_proj = multiply(a_tilde, ut_first);
    double mis = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            double pred = 0.0;
            for (std::size_t i = 0; i < r; ++i) pred += f.u(k, i) * propagated_proj(i, j);
            const double diff = second(k, j) - pred;
            mis += diff * diff;
            ref += second(k, j) * second(k, j);
        }
    }
    model.fit_details.training_residual = ref > 0.0 ? std::sqrt(mis / ref) : std::sqrt(mis);
    return model;
}

std::vector<DmdModel> fit_uncoupled(const std::vector<SnapshotMatrix>& parts, std::size_t rank,
                                    const FitBackend& backend) {
    std::vector<DmdModel> models;
    models.reserve(parts.size());
    for (const auto& part : parts) {
        if (part.layout.compartments() != 1)
            throw InputError("fit_uncoupled: every part must hold a single compartment");
        try {
            models.push_back(fit(part, rank, backend));
        } catch (const InputError& e) {
            throw InputError("compartment '" + part.layout.names[0] + "': " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("compartment '" + part.layout.names[0] + "': " + e.what());
        }
    }
    return models;
}

Reconstruction reconstruct_discrete(const DmdModel& model, std::size_t k) {
    std::vector<cd> weights(model.rank);
    for (std::size_t j = 0; j < model.rank; ++j) weights[j] = cpow_int(model.lambda[j], k);
    return evaluate_modes(model, weights, false);
}

Reconstruction reconstruct_continuous(const DmdModel& model, double t) {
    if (t < 0.0) throw InputError("reconstruct_continuous: t must be non-negative");
    bool warn = false;
    std::vector<cd> weights(model.rank);
    for (std::size_t j = 0; j < model.rank; ++j) {
        const cd lambda = model.lambda[j];
        if (on_closed_negative_real_axis(lambda)) warn = true;
        if (lambda == cd(0.0, 0.0)) {
            weights[j] = (t == 0.0) ? cd(1.0, 0.0) : cd(0.0, 0.0);
        } else {
            weights[j] = std::exp(model.omega[j] * t);
        }
    }
    return evaluate_modes(model, weights, warn);
}

void write_model_file(const std::string& path, const DmdModel& model) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << "DMDMODEL v1\n";
    out << "rank=" << model.rank << "\n";
    out << "dt=" << format_full(model.dt) << "\n";
    out << "layout=" << model.layout.to_string() << "\n";
    out << "cell_weight=" << format_full(model.cell_weight) << "\n";
    out << "train_end=" << format_full(model.train_end) << "\n";
    out << "LAMBDA\n";
    for (const auto& v : model.lambda) write_complex_line(out, v);
    out << "OMEGA\n";
    for (const auto& v : model.omega) write_complex_line(out, v);
    out << "B\n";
    for (const auto& v : model.b) write_complex_line(out, v);
    out << "PSI\n";
    for (std::size_t i = 0; i < model.psi.rows(); ++i) {
        for (std::size_t j = 0; j < model.psi.cols(); ++j) {
            if (j) out << ' ';
            out << format_full(model.psi(i, j).real()) << ',' << format_full(model.psi(i, j).imag());
        }
        out << "\n";
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

DmdModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "DMDMODEL v1")
        throw InputError(path + ": missing 'DMDMODEL v1' header");

    DmdModel model;
    auto expect = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key, 0) != 0)
            throw InputError(path + ": expected '" + key + "...'");
        return line.substr(key.size());
    };
    model.rank = static_cast<std::size_t>(std::stoull(expect("rank=")));
    model.dt = parse_double(expect("dt="));
    model.layout = CompartmentLayout::parse(expect("layout="));

    // Optional metadata before the LAMBDA section.
    if (!std::getline(in, line)) throw InputError(path + ": truncated model file");
    while (line != "LAMBDA") {
        if (line.rfind("cell_weight=", 0) == 0) {
            model.cell_weight = parse_double(line.substr(12));
        } else if (line.rfind("train_end=", 0) == 0) {
            model.train_end = parse_double(line.substr(10));
        } else {
            throw InputError(path + ": unexpected header line '" + line + "'");
        }
        if (!std::getline(in, line)) throw InputError(path + ": truncated model file");
    }

    auto read_section = [&](const std::string& name, std::vector<cd>& dest, bool header_consumed) {
        if (!header_consumed) {
            if (!std::getline(in, line) || line != name)
                throw InputError(path + ": expected section '" + name + "'");
        }
        dest.resize(model.rank);
        for (std::size_t i = 0; i < model.rank; ++i) {
            if (!std::getline(in, line)) throw InputError(path + ": truncated section " + name);
            dest[i] = parse_complex_pair(line);
        }
    };
    read_section("LAMBDA", model.lambda, true);
    read_section("OMEGA", model.omega, false);
    read_section("B", model.b, false);

    if (!std::getline(in, line) || line != "PSI")
        throw InputError(path + ": expected section 'PSI'");
    const std::size_t n = model.layout.state_dim();
    model.psi = ComplexMatrix(n, model.rank);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw InputError(path + ": truncated PSI section");
        std::stringstream ss(line);
        std::string token;
        std::size_t j = 0;
        while (ss >> token) {
            if (j >= model.rank) throw InputError(path + ": too many PSI pairs on a line");
            model.psi(i, j++) = parse_complex_pair(token);
        }
        if (j != model.rank) throw InputError(path + ": PSI line with missing pairs");
    }
    return model;
}

} // namespace cdmd
