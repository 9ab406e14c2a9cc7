#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gjcm/evolution.hpp"
#include "gjcm/params.hpp"

namespace gjcm {

// Reduced state of the cavity mode in the Fock basis 0..cutoff.
struct FieldDensityMatrix {
  Eigen::MatrixXcd rho;
  double time = 0.0;
  std::uint64_t params_hash = 0;

  int cutoff() const { return static_cast<int>(rho.rows()) - 1; }
  double trace() const { return rho.trace().real(); }
  double purity() const;
  // max |rho(n,m) - conj(rho(m,n))|
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

// Traces the atom and the momentum nodes out of the joint state.
FieldDensityMatrix reduced_density(const EvolvedState& state, std::uint64_t params_hash = 0);

// <m|D(alpha)|n> for m, n < dim, via associated Laguerre polynomials with
// log-factorial prefactors. Throws RangeError when |alpha|^2 is too large for
// double precision.
Eigen::MatrixXcd displacement_matrix(complex alpha, int dim);

// Tr[rho D(gamma)], the symmetric characteristic function.
complex symmetric_char_function(const Eigen::MatrixXcd& rho, complex gamma);

// Normally ordered characteristic function Tr[rho exp(gamma a+) exp(-gamma* a)].
// Throws RangeError when exp(|gamma|^2 / 2) would overflow.
complex char_function(const FieldDensityMatrix& rho, complex gamma);

// W(beta) = (2/pi) sum_{n,m} rho(n,m) (-1)^n <m|D(2 beta)|n>, the
// displaced-parity expectation evaluated in closed form.
double wigner_series(const FieldDensityMatrix& rho, complex beta);
double wigner_series(const Eigen::MatrixXcd& rho, complex beta);

// Direct Fourier-integral evaluation of the Wigner function,
//   W(beta) = pi^-2 int exp(-|gamma|^2/2) C_N(gamma) exp(beta gamma* - beta* gamma) d^2 gamma,
// with the trapezoidal rule on a square grid. The integrand is sampled out to
// guard * radius; if the band between radius and guard * radius changes the
// result by more than tolerance a ConvergenceError is raised.
struct WignerQuadratureSpec {
  double radius = 0.0;  // 0 selects sqrt(4 cutoff + 60)
  double step = 0.08;
  double guard = 1.25;
  double tolerance = 1e-6;
};

struct WignerQuadratureResult {
  double value;
  double imaginary;    // residual imaginary part of the integral
  double edge_change;  // contribution of the guard band
};

// Samples the characteristic function once and reuses it for every beta.
class WignerQuadrature {
 public:
  WignerQuadrature(const Eigen::MatrixXcd& rho, const WignerQuadratureSpec& spec = {});

  WignerQuadratureResult evaluate(complex beta) const;

  double radius() const noexcept { return radius_; }
  std::size_t node_count() const noexcept { return char_values_.size(); }

 private:
  WignerQuadratureSpec spec_;
  double radius_;
  std::vector<complex> nodes_;
  std::vector<complex> char_values_;
  std::vector<unsigned char> inner_;
};

WignerQuadratureResult wigner_quadrature(const FieldDensityMatrix& rho, complex beta,
                                         const WignerQuadratureSpec& spec = {});

// Row-major samples: values[iy * xs.size() + ix] = W(xs[ix] + i ys[iy]).
struct WignerGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;
  double min_value = 0.0;
  double min_x = 0.0;
  double min_y = 0.0;
  double max_value = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * xs.size() + ix]; }
  // Trapezoidal integral over the grid rectangle.
  double integral() const;
};

WignerGrid wigner_map(const FieldDensityMatrix& rho, const GridSpec& grid, int threads = 1);

// "X,Y,W" rows with 17 significant digits, LF endings. `comment` lines are
// emitted first, each prefixed with "# ".
std::string wigner_csv(const WignerGrid& grid, const std::vector<std::string>& comment = {});

// Binary 8-bit PGM (P5), [min, max] mapped linearly onto [0, 255], first row is
// the largest Y. Carries a "# min=... max=..." line plus any extra comments.
std::string wigner_pgm(const WignerGrid& grid, const std::vector<std::string>& comment = {});

// Locale-independent shortest form with 17 significant digits.
std::string format_real(double value);

}  // namespace gjcm
