#include "rabi/approx.hpp"

#include <cmath>
#include <string>

#include "rabi/metrics.hpp"

namespace rabi {

namespace {

double envelope_denom(double delta_db) {
    return std::pow(10.0, delta_db / 10.0) - 1.0;  // Delta^{-2} - 1
}

// Number of retained lattice sites with s >= 0 (mirrored to s < 0).
int retained_sites(const LatticeSpec& spec) {
    double denom = envelope_denom(spec.delta_db);
    double off0 = 0.5 * spec.d_alpha;
    int n = 1;
    for (;; ++n) {
        double off = spec.d_alpha * (n + 0.5);
        if (std::exp(-(off * off - off0 * off0) / denom) < spec.trunc_tol) break;
    }
    return n;
}

}  // namespace

void LatticeSpec::validate() const {
    if (!(d_alpha > 0.0)) throw ConfigError("lattice spacing d_alpha must be positive");
    if (!(delta_db > 0.0))
        throw ConfigError("target delta_db must be positive (envelope needs Delta < 1)");
    if (!(trunc_tol > 0.0 && trunc_tol < 1.0))
        throw ConfigError("trunc_tol must lie in (0,1)");
}

OscillatorState lattice_superposition(const LatticeSpec& spec, const FockConfig& cfg) {
    spec.validate();
    cfg.validate();

    double denom = envelope_denom(spec.delta_db);
    double off0 = 0.5 * spec.d_alpha;
    int sites = retained_sites(spec);

    Vector acc = Vector::Zero(cfg.osc_dim());
    for (int s = 0; s < sites; ++s) {
        double off = spec.d_alpha * (s + 0.5);
        double c = std::exp(-(off * off - off0 * off0) / denom);
        acc += c * (coherent(Complex(off, 0), cfg).amps() +
                    coherent(Complex(-off, 0), cfg).amps());
    }
    acc /= acc.norm();

    double tail = 0.0;
    for (int n = std::max(0, cfg.osc_dim() - 5); n < cfg.osc_dim(); ++n)
        tail += std::norm(acc[n]);
    if (tail > cfg.leak_tol)
        throw LeakError("lattice state puts " + std::to_string(tail) +
                        " in the top Fock levels (leak_tol " +
                        std::to_string(cfg.leak_tol) + ")");
    return OscillatorState::pure(cfg.cutoff, std::move(acc));
}

int suggested_cutoff(const LatticeSpec& spec) {
    spec.validate();
    int sites = retained_sites(spec);
    double alpha_max = spec.d_alpha * (sites - 0.5);
    double nbar = alpha_max * alpha_max;
    return static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar) + 20.0));
}

std::vector<ApproxRow> approx_scan(const std::vector<double>& d_alpha_grid,
                                   const std::vector<double>& delta_db_grid,
                                   const FockConfig& cfg) {
    cfg.validate();
    std::vector<ApproxRow> rows;
    rows.reserve(d_alpha_grid.size() * delta_db_grid.size());
    for (double da : d_alpha_grid)
        for (double db : delta_db_grid) {
            LatticeSpec spec{da, db, 1e-10};
            FockConfig working{std::max(cfg.cutoff, suggested_cutoff(spec)),
                               cfg.leak_tol};
            OscillatorState state = lattice_superposition(spec, working);
            auto [sq, anti] = squeezing_db(state);
            double fid = fidelity(state, squeezed_vacuum(db, working));
            rows.push_back({da, db, sq, anti, fid});
        }
    return rows;
}

}  // namespace rabi
