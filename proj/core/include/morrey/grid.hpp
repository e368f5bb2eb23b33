// Log-polar discretisation of the closed upper half-plane and the regularised
// p-Dirichlet energy on it.
//
// Nodes sit at (s_i, phi_j) with s = ln r uniform on [ln r_min, ln r_max] and
// phi uniform on [0, pi]. Cells are the rectangles between neighbouring
// nodes. In each cell the energy density
//
//   (1/p) ((u_s^2 + u_phi^2) e^{-2s} + eps^2)^{p/2} e^{2s}
//
// is integrated with the bilinear (Q1) interpolant of the four corner values,
// sampled at the 2x2 Gauss points of the cell. The weight e^{2s} is integrated
// exactly over the cell, while e^{-2s} inside the density is taken at the
// cell centre.

#ifndef MORREY_GRID_HPP_
#define MORREY_GRID_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace morrey {

struct GridSpec {
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t n_s = 0;
  std::size_t n_phi = 0;

  /// Spec with `cells_per_octave` cells per doubling of r. r_min and r_max
  /// must be integer powers of two.
  static GridSpec per_octave(double r_min, double r_max, std::size_t cells_per_octave,
                             std::size_t n_phi);

  bool operator==(const GridSpec&) const = default;
};

class LogPolarGrid {
 public:
  /// Throws std::invalid_argument unless r_min < 1 < r_max, n_s, n_phi >= 3,
  /// n_phi is odd and s = 0 falls on a node.
  explicit LogPolarGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t n_s() const { return spec_.n_s; }
  std::size_t n_phi() const { return spec_.n_phi; }
  std::size_t size() const { return spec_.n_s * spec_.n_phi; }
  double ds() const { return ds_; }
  double dphi() const { return dphi_; }

  double s(std::size_t i) const { return s_[i]; }
  double r(std::size_t i) const { return r_[i]; }
  double phi(std::size_t j) const { return static_cast<double>(j) * dphi_; }
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }

  /// Row-major in s: index(i, j) = i * n_phi + j.
  std::size_t index(std::size_t i, std::size_t j) const { return i * spec_.n_phi + j; }

  /// Node at s = 0 and phi = pi/2, i.e. the point e_2.
  std::size_t unit_row() const { return unit_row_; }
  std::size_t axis_column() const { return (spec_.n_phi - 1) / 2; }

  bool on_boundary(std::size_t i, std::size_t j) const {
    return i == 0 || j == 0 || i + 1 == spec_.n_s || j + 1 == spec_.n_phi;
  }

  /// Integral of e^{2s} ds dphi over any cell in row i (between s_i and s_{i+1}).
  double cell_weight(std::size_t i) const { return weight_[i]; }
  /// e^{-2 s} at the centre of cell row i.
  double cell_metric(std::size_t i) const { return metric_[i]; }
  double cell_s(std::size_t i) const { return 0.5 * (s_[i] + s_[i + 1]); }

  /// Physical area of the half annulus, sum of cell weights.
  double area() const;

  /// Continuous node coordinates of (r, phi). Throws std::domain_error when
  /// the point is outside the grid rectangle.
  std::pair<double, double> locate(double r, double phi) const;

 private:
  GridSpec spec_;
  double ds_ = 0.0;
  double dphi_ = 0.0;
  std::size_t unit_row_ = 0;
  std::vector<double> s_;
  std::vector<double> r_;
  std::vector<double> weight_;
  std::vector<double> metric_;
};

struct PinnedNode {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 1.0;
};

class ScalarField {
 public:
  explicit ScalarField(LogPolarGrid grid);
  ScalarField(LogPolarGrid grid, std::vector<double> values);

  const LogPolarGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }

  const std::optional<PinnedNode>& pin() const { return pin_; }
  void set_pin(std::optional<PinnedNode> pin);

  /// True for nodes whose value is fixed: the boundary and the pin.
  bool constrained(std::size_t i, std::size_t j) const;

  /// Writes zero Dirichlet data on the boundary and the pin value.
  void apply_constraints();

 private:
  LogPolarGrid grid_;
  std::vector<double> values_;
  std::optional<PinnedNode> pin_;
};

struct EnergyParams {
  double p = 4.0;
  double eps = 0.0;
};

/// Throws std::invalid_argument unless p > 2 and eps >= 0.
void validate(const EnergyParams& params);

double energy(const ScalarField& field, const EnergyParams& params);

/// E(u + du) - E(u), computed cell by cell so each contribution keeps its
/// relative accuracy even when it is far below the total energy.
double energy_change(const ScalarField& field, std::span<const double> du,
                     const EnergyParams& params);

/// Gradient of the discrete energy with respect to nodal values; zero at
/// constrained nodes.
ScalarField energy_gradient(const ScalarField& field, const EnergyParams& params);

/// Second derivative of the discrete energy as a nine-point stencil per node:
/// stencil[index(i,j)][(di+1)*3 + (dj+1)] = d^2 E / du(i,j) du(i+di, j+dj).
/// Rows and columns belonging to constrained nodes are left zero.
using Stencil = std::array<double, 9>;
std::vector<Stencil> energy_hessian(const ScalarField& field, const EnergyParams& params);

/// Gradient together with the diagonal of the Hessian; cheaper than the full
/// stencil and used for scaled convergence tests.
struct GradientAndDiagonal {
  std::vector<double> gradient;
  std::vector<double> diagonal;
};
GradientAndDiagonal energy_gradient_and_diagonal(const ScalarField& field,
                                                 const EnergyParams& params);

/// Integral of |grad u|^p over the half annulus (the eps = 0 energy times p).
double gradient_lp_integral(const ScalarField& field, double p);

/// Physical |grad u| at cell centres, averaged edge differences;
/// (n_s - 1) x (n_phi - 1) row-major.
std::vector<double> cell_gradient_magnitude(const ScalarField& field);

/// Bilinear interpolation in (s, phi). Exact at nodes and on fields that are
/// bilinear in (s, phi). Throws std::domain_error outside the grid.
double interpolate(const ScalarField& field, double r, double phi);

}  // namespace morrey

#endif  // MORREY_GRID_HPP_
