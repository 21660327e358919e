#include "rabi/metrics.hpp"

#include <cmath>
#include <string>

namespace rabi {

namespace {

constexpr double kIntegralTol = 1e-4;
constexpr double kEndpointTol = 1e-10;

// Orthonormal Hermite functions h_n(x) = pi^{-1/4}(2^n n!)^{-1/2} H_n(x) e^{-x^2/2}
// by the stable normalized recurrence; one grid row per Fock level.
RealMatrix hermite_functions(const RealVector& xs, int dim) {
    int np = static_cast<int>(xs.size());
    RealMatrix h(np, dim);
    const double pi4 = std::pow(M_PI, -0.25);
    for (int i = 0; i < np; ++i) {
        double x = xs[i];
        h(i, 0) = pi4 * std::exp(-0.5 * x * x);
        if (dim > 1) h(i, 1) = std::sqrt(2.0) * x * h(i, 0);
        for (int n = 2; n < dim; ++n)
            h(i, n) = x * std::sqrt(2.0 / n) * h(i, n - 1) -
                      std::sqrt((n - 1.0) / n) * h(i, n - 2);
    }
    return h;
}

QuadratureGrid density_impl(const OscillatorState& s, double lo, double hi,
                            int n_points, bool momentum, const char* what) {
    if (n_points < 3 || n_points % 2 == 0)
        throw ConfigError("grid needs an odd point count >= 3");
    if (!(hi > lo)) throw ConfigError("grid bounds must satisfy max > min");
    int dim = s.dim();
    RealVector xs(n_points);
    double dx = (hi - lo) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) xs[i] = lo + i * dx;

    RealMatrix h = hermite_functions(xs, dim);
    Matrix basis = h.cast<Complex>();
    if (momentum) {
        // phi_n(p) = (-i)^n h_n(p)
        Complex phase(1, 0);
        const Complex mi(0, -1);
        for (int n = 0; n < dim; ++n) {
            basis.col(n) *= phase;
            phase *= mi;
        }
    }

    RealVector q(n_points);
    if (s.is_pure()) {
        Vector psi = basis * s.amps();
        q = psi.cwiseAbs2();
    } else {
        Matrix br = basis * s.rho();
        Vector rows = (br.array() * basis.array().conjugate()).rowwise().sum().matrix();
        q = rows.real();
    }

    double qmin = q.minCoeff();
    if (qmin < -1e-12)
        throw NonPositiveError(std::string(what) + ": density dips to " +
                               std::to_string(qmin));
    q = q.cwiseMax(0.0);

    if (q[0] > kEndpointTol || q[n_points - 1] > kEndpointTol)
        throw GridTooSmallError(std::string(what) + ": endpoint density " +
                                std::to_string(std::max(q[0], q[n_points - 1])));

    QuadratureGrid grid{lo, hi, n_points, std::move(q)};
    double integral = grid.trapezoid();
    if (std::abs(integral - 1.0) > kIntegralTol)
        throw GridTooSmallError(std::string(what) + ": density integrates to " +
                                std::to_string(integral));
    return grid;
}

double fisher_on(const RealVector& q, double dx) {
    int np = static_cast<int>(q.size());
    double floor = 1e-12 * q.maxCoeff();
    double acc = 0.0;
    for (int i = 1; i + 1 < np; ++i) {
        if (q[i] < floor) continue;
        double dq = (q[i + 1] - q[i - 1]) / (2.0 * dx);
        acc += dq * dq / q[i];
    }
    return 2.0 * acc * dx;
}

}  // namespace

double QuadratureGrid::trapezoid() const {
    double s = values.sum() - 0.5 * (values[0] + values[n_points - 1]);
    return s * spacing();
}

Vector apply_x(const Vector& v) {
    int d = static_cast<int>(v.size());
    Vector w = Vector::Zero(d);
    const double inv = 1.0 / std::sqrt(2.0);
    for (int n = 0; n < d; ++n) {
        Complex acc = 0.0;
        if (n > 0) acc += std::sqrt(double(n)) * v[n - 1];
        if (n + 1 < d) acc += std::sqrt(double(n + 1)) * v[n + 1];
        w[n] = acc * inv;
    }
    return w;
}

Vector apply_p(const Vector& v) {
    int d = static_cast<int>(v.size());
    Vector w = Vector::Zero(d);
    const Complex c = Complex(0, 1) / std::sqrt(2.0);
    for (int n = 0; n < d; ++n) {
        Complex acc = 0.0;
        if (n > 0) acc += std::sqrt(double(n)) * v[n - 1];
        if (n + 1 < d) acc -= std::sqrt(double(n + 1)) * v[n + 1];
        w[n] = acc * c;
    }
    return w;
}

Moments moments(const OscillatorState& s) {
    if (s.is_pure()) {
        const Vector& v = s.amps();
        Vector xv = apply_x(v), pv = apply_p(v);
        double mx = v.dot(xv).real(), mp = v.dot(pv).real();
        double x2 = xv.squaredNorm(), p2 = pv.squaredNorm();
        return {mx, mp, x2 - mx * mx, p2 - mp * mp};
    }
    const Matrix& rho = s.rho();
    int d = s.dim();
    Matrix xr(d, d), pr(d, d);
    for (int j = 0; j < d; ++j) {
        xr.col(j) = apply_x(rho.col(j));
        pr.col(j) = apply_p(rho.col(j));
    }
    double mx = xr.trace().real(), mp = pr.trace().real();
    double x2 = 0.0, p2 = 0.0;
    for (int j = 0; j < d; ++j) {
        x2 += apply_x(xr.col(j))[j].real();
        p2 += apply_p(pr.col(j))[j].real();
    }
    return {mx, mp, x2 - mx * mx, p2 - mp * mp};
}

std::pair<double, double> squeezing_db(const OscillatorState& s) {
    Moments m = moments(s);
    return {-10.0 * std::log10(2.0 * m.var_p), -10.0 * std::log10(2.0 * m.var_x)};
}

double fidelity(const OscillatorState& s, const OscillatorState& target) {
    if (!target.is_pure()) throw ConfigError("fidelity target must be pure");
    if (target.cutoff() != s.cutoff()) throw DimensionError("fidelity cutoff mismatch");
    double f;
    if (s.is_pure()) {
        f = std::norm(target.amps().dot(s.amps()));
    } else {
        f = (target.amps().adjoint() * s.rho() * target.amps())(0).real();
    }
    if (f < 0.0 && f > -1e-12) f = 0.0;
    if (f < 0.0 || f > 1.0 + 1e-9)
        throw NonPositiveError("fidelity " + std::to_string(f) + " out of range");
    return std::min(f, 1.0);
}

QuadratureGrid p_density(const OscillatorState& s, double p_min, double p_max,
                         int n_points) {
    return density_impl(s, p_min, p_max, n_points, true, "p_density");
}

QuadratureGrid x_density(const OscillatorState& s, double x_min, double x_max,
                         int n_points) {
    return density_impl(s, x_min, x_max, n_points, false, "x_density");
}

QuadratureGrid p_density_auto(const OscillatorState& s, int n_points) {
    Moments m = moments(s);
    double sigma = std::sqrt(m.var_p);
    // var_p wildly understates the support here: fringe-squeezed
    // superpositions keep vacuum-width envelopes, and the disentangling
    // gates leave residue displaced along P by a few units. Keep the
    // window at least +-9 and only adapt the resolution (and the width for
    // genuinely broad states).
    double half_width = std::max(9.0, 8.0 * sigma);
    int needed = (static_cast<int>(std::ceil(80.0 * half_width / sigma)) + 1) | 1;
    n_points = std::clamp(needed, n_points, 20001);
    return p_density(s, m.mean_p - half_width, m.mean_p + half_width, n_points);
}

double fisher_information(const QuadratureGrid& grid) {
    if (grid.n_points < 9) throw ConfigError("grid too coarse for fisher estimate");
    double full = fisher_on(grid.values, grid.spacing());

    // Half-resolution stability check: recompute on every other point.
    int nh = (grid.n_points + 1) / 2;
    RealVector half(nh);
    for (int i = 0; i < nh; ++i) half[i] = grid.values[2 * i];
    double coarse = fisher_on(half, 2.0 * grid.spacing());

    if (!(full > 0.0)) throw NonPositiveError("fisher estimate non-positive");
    if (std::abs(full - coarse) / full >= 5e-3)
        throw UnstableEstimateError("fisher shifts by " +
                                    std::to_string(std::abs(full - coarse) / full) +
                                    " under grid refinement");
    return full;
}

double gaussian_equiv_db(double fisher) {
    if (!(fisher > 0.0)) throw NonPositiveError("fisher must be positive");
    return 10.0 * std::log10(fisher / 4.0);
}

std::pair<double, double> best_fit_squeezed_fidelity(const OscillatorState& s) {
    FockConfig cfg{s.cutoff(), 0.999999};  // leak handled by the caller's state
    auto f_at = [&](double db) { return fidelity(s, squeezed_vacuum(db, cfg)); };

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 20.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f_at(c), fd = f_at(d);
    while (b - a > 1e-4) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f_at(d);
        }
    }
    double mid = 0.5 * (a + b);
    return {f_at(mid), mid};
}

}  // namespace rabi
