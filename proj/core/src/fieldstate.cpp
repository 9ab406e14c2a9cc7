#include "gjcm/fieldstate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gjcm/errors.hpp"
#include "gjcm/parallel.hpp"

namespace gjcm {

namespace {

// Beyond this exp(-|alpha|^2/2) underflows while the Laguerre factor overflows.
constexpr double kMaxDisplacementNorm = 1400.0;
constexpr double kMaxCharExponent = 700.0;

}  // namespace

double FieldDensityMatrix::purity() const { return (rho * rho).trace().real(); }

double FieldDensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double FieldDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

FieldDensityMatrix reduced_density(const EvolvedState& state, std::uint64_t params_hash) {
  const int dim = state.n_max() + 1;
  FieldDensityMatrix out;
  out.rho = Eigen::MatrixXcd::Zero(dim, dim);
  out.time = state.time;
  out.params_hash = params_hash;
  // Fixed node order keeps the sum reproducible.
  for (int i = 0; i < state.node_count(); ++i) {
    const auto e = state.psi1.col(i);
    const auto g = state.psi2.col(i);
    out.rho.noalias() += state.weights[i] * (e * e.adjoint() + g * g.adjoint());
  }
  return out;
}

Eigen::MatrixXcd displacement_matrix(complex alpha, int dim) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  const double x = std::norm(alpha);
  if (x == 0.0) {
    d.setIdentity();
    return d;
  }
  if (x > kMaxDisplacementNorm) {
    std::ostringstream msg;
    msg << "displacement |alpha| = " << std::sqrt(x) << " out of range";
    throw RangeError(msg.str());
  }
  const double log_mod = 0.5 * std::log(x);
  const complex unit = alpha / std::sqrt(x);
  const complex unit_lower = -std::conj(unit);
  std::vector<double> log_fact(dim);
  for (int j = 0; j < dim; ++j) log_fact[j] = std::lgamma(j + 1.0);

  std::vector<double> lag(dim);
  complex phase_upper = 1.0;
  complex phase_lower = 1.0;
  for (int k = 0; k < dim; ++k) {
    const int len = dim - k;
    // L_j^(k)(x) by the three-term recurrence in j.
    lag[0] = 1.0;
    if (len > 1) lag[1] = 1.0 + k - x;
    for (int j = 1; j + 1 < len; ++j) {
      lag[j + 1] = ((2.0 * j + 1.0 + k - x) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
    }
    for (int j = 0; j < len; ++j) {
      const double mag =
          std::exp(0.5 * (log_fact[j] - log_fact[j + k]) + k * log_mod - 0.5 * x) * lag[j];
      d(j + k, j) = mag * phase_upper;
      if (k > 0) d(j, j + k) = mag * phase_lower;
    }
    phase_upper *= unit;
    phase_lower *= unit_lower;
  }
  return d;
}

complex symmetric_char_function(const Eigen::MatrixXcd& rho, complex gamma) {
  const Eigen::MatrixXcd d = displacement_matrix(gamma, static_cast<int>(rho.rows()));
  // Tr[rho D] = sum_{n,m} rho(n,m) D(m,n)
  return (rho.array() * d.transpose().array()).sum();
}

complex char_function(const FieldDensityMatrix& rho, complex gamma) {
  const double exponent = 0.5 * std::norm(gamma);
  if (exponent > kMaxCharExponent) {
    std::ostringstream msg;
    msg << "normally ordered characteristic function overflows at |gamma| = " << std::abs(gamma);
    throw RangeError(msg.str());
  }
  const complex value = std::exp(exponent) * symmetric_char_function(rho.rho, gamma);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    std::ostringstream msg;
    msg << "normally ordered characteristic function overflows at |gamma| = " << std::abs(gamma);
    throw RangeError(msg.str());
  }
  return value;
}

double wigner_series(const Eigen::MatrixXcd& rho, complex beta) {
  const int dim = static_cast<int>(rho.rows());
  const Eigen::MatrixXcd d = displacement_matrix(2.0 * beta, dim);
  double sum = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    double row = 0.0;
    for (int m = 0; m < dim; ++m) row += (rho(n, m) * d(m, n)).real();
    sum += parity * row;
  }
  return 2.0 / kPi * sum;
}

double wigner_series(const FieldDensityMatrix& rho, complex beta) {
  return wigner_series(rho.rho, beta);
}

WignerQuadrature::WignerQuadrature(const Eigen::MatrixXcd& rho, const WignerQuadratureSpec& spec)
    : spec_(spec) {
  if (!(spec.step > 0.0)) throw DomainError("Wigner quadrature step must be > 0");
  if (!(spec.guard > 1.0)) throw DomainError("Wigner quadrature guard must exceed 1");
  const int cutoff = static_cast<int>(rho.rows()) - 1;
  radius_ = spec.radius > 0.0 ? spec.radius : std::sqrt(4.0 * cutoff + 60.0);
  const double outer = spec.guard * radius_;
  const int half = static_cast<int>(std::ceil(outer / spec.step));
  const std::size_t side = 2 * static_cast<std::size_t>(half) + 1;
  nodes_.reserve(side * side);
  inner_.reserve(side * side);
  for (int iy = -half; iy <= half; ++iy) {
    for (int ix = -half; ix <= half; ++ix) {
      const double gx = ix * spec.step;
      const double gy = iy * spec.step;
      nodes_.emplace_back(gx, gy);
      inner_.push_back(std::abs(gx) <= radius_ && std::abs(gy) <= radius_);
    }
  }
  // exp(-|gamma|^2/2) C_N(gamma) is the symmetric characteristic function; it
  // stays bounded by one, which the normally ordered form alone does not.
  char_values_.resize(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    char_values_[k] = symmetric_char_function(rho, nodes_[k]);
  }
}

WignerQuadratureResult WignerQuadrature::evaluate(complex beta) const {
  complex total = 0.0;
  complex inner = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const complex gamma = nodes_[k];
    // exp(beta gamma* - beta* gamma) = exp(2 i Im(beta gamma*))
    const complex kernel = std::polar(1.0, 2.0 * std::imag(beta * std::conj(gamma)));
    const complex term = char_values_[k] * kernel;
    total += term;
    if (inner_[k]) inner += term;
  }
  const double scale = spec_.step * spec_.step / (kPi * kPi);
  total *= scale;
  inner *= scale;
  const double edge = std::abs(total - inner);
  if (edge > spec_.tolerance) {
    std::ostringstream msg;
    msg << "Wigner quadrature not converged at radius " << radius_ << ": guard band changes W by "
        << edge;
    throw ConvergenceError(msg.str());
  }
  return {total.real(), total.imag(), edge};
}

WignerQuadratureResult wigner_quadrature(const FieldDensityMatrix& rho, complex beta,
                                         const WignerQuadratureSpec& spec) {
  return WignerQuadrature(rho.rho, spec).evaluate(beta);
}

double WignerGrid::integral() const {
  auto trapezoid_weight = [](const std::vector<double>& axis, std::size_t i) {
    if (axis.size() < 2) return 0.0;
    const double h = (axis.back() - axis.front()) / (axis.size() - 1);
    return (i == 0 || i + 1 == axis.size()) ? 0.5 * h : h;
  };
  double total = 0.0;
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    const double wy = trapezoid_weight(ys, iy);
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      total += wy * trapezoid_weight(xs, ix) * values[iy * xs.size() + ix];
    }
  }
  return total;
}

WignerGrid wigner_map(const FieldDensityMatrix& rho, const GridSpec& spec, int threads) {
  WignerGrid grid;
  grid.xs = spec.xs();
  grid.ys = spec.ys();
  const int nx = static_cast<int>(grid.xs.size());
  const int ny = static_cast<int>(grid.ys.size());
  grid.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  parallel_for(ny, threads, [&](int iy) {
    for (int ix = 0; ix < nx; ++ix) {
      grid.values[static_cast<std::size_t>(iy) * nx + ix] =
          wigner_series(rho.rho, complex(grid.xs[ix], grid.ys[iy]));
    }
  });
  // First occurrence in row-major order wins ties.
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  const auto lo_idx = static_cast<std::size_t>(lo - grid.values.begin());
  const auto hi_idx = static_cast<std::size_t>(hi - grid.values.begin());
  grid.min_value = *lo;
  grid.min_x = grid.xs[lo_idx % nx];
  grid.min_y = grid.ys[lo_idx / nx];
  grid.max_value = *hi;
  grid.max_x = grid.xs[hi_idx % nx];
  grid.max_y = grid.ys[hi_idx / nx];
  return grid;
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string wigner_csv(const WignerGrid& grid, const std::vector<std::string>& comment) {
  std::string out;
  for (const auto& line : comment) out += "# " + line + "\n";
  out += "X,Y,W\n";
  const std::size_t nx = grid.xs.size();
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      out += format_real(grid.xs[ix]);
      out += ',';
      out += format_real(grid.ys[iy]);
      out += ',';
      out += format_real(grid.values[iy * nx + ix]);
      out += '\n';
    }
  }
  return out;
}

std::string wigner_pgm(const WignerGrid& grid, const std::vector<std::string>& comment) {
  const std::size_t nx = grid.xs.size();
  const std::size_t ny = grid.ys.size();
  std::string out = "P5\n";
  out += "# min=" + format_real(grid.min_value) + " max=" + format_real(grid.max_value) + "\n";
  for (const auto& line : comment) out += "# " + line + "\n";
  out += std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  const double span = grid.max_value - grid.min_value;
  for (std::size_t row = 0; row < ny; ++row) {
    const std::size_t iy = ny - 1 - row;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = grid.values[iy * nx + ix];
      const double scaled = span > 0.0 ? (v - grid.min_value) / span * 255.0 : 0.0;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 255.0))));
    }
  }
  return out;
}

}  // namespace gjcm
