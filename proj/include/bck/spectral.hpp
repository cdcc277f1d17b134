#pragma once

// Dirichlet-Laplacian sine eigenbasis on a box (0,L_0) x (0,L_1).
//
// A field is u = sum_k c_k prod_i sin(k_i pi x_i / L_i) with 1 <= k_i <= N, so
// u = Delta u = 0 on the boundary holds by construction and every power of
// A = -Delta is diagonal.
//
// Two point sets with M >= ceil(3N/2) points per axis are used:
//  * the sample grid x_j = j L/(M+1), j = 1..M (DST-I nodes). to_grid and
//    to_spectral live here; the pair is exact for fields with up to M modes.
//  * the dealiasing grid x_j = (L/pi) arccos(y_j) with y_j the Gauss-Legendre
//    nodes. Galerkin projections of products of two fields (values or
//    gradients) are exact here: the projection integrand sin*sin*sin or
//    cos*cos*sin is sin(theta) times a polynomial of degree <= 3N-1 in
//    cos(theta), which an M-point Gauss rule integrates exactly when 2M >= 3N.

#include <array>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "bck/kernels.hpp"

namespace bck {

struct DomainSpec {
  int dimension = 1;
  std::array<double, 2> lengths{std::numbers::pi, std::numbers::pi};
  int modes = 16;
  /// 0 selects the minimum ceil(3N/2).
  int quadrature_points = 0;
  /// Permit fewer than ceil(3N/2) points (aliasing diagnostics only).
  bool allow_aliasing = false;

  /// Throws std::invalid_argument on a malformed domain.
  void validate() const;
  int effective_quadrature_points() const;
  static int min_quadrature_points(int modes) { return (3 * modes + 1) / 2; }
};

enum class GridKind { sample, dealiasing };

class Basis {
 public:
  struct AxisTables {
    double length = 0.0;
    std::vector<double> sample_nodes;
    std::vector<double> dealias_nodes;
    std::vector<double> dealias_weights;  // quadrature weights for int_0^L F dx, F odd-type
    std::vector<double> sample_eval;      // M x N: sin(k pi x_j / L)
    std::vector<double> sample_proj;      // N x M: DST-I inverse
    std::vector<double> dealias_eval;     // M x N
    std::vector<double> dealias_deriv;    // M x N: (k pi / L) cos(k pi x_j / L)
    std::vector<double> dealias_proj;     // N x M: Galerkin projection
  };

  static std::shared_ptr<const Basis> create(const DomainSpec& domain, Exec exec = Exec::parallel);

  const DomainSpec& domain() const { return domain_; }
  int dimension() const { return domain_.dimension; }
  int modes() const { return domain_.modes; }
  int quad_points() const { return quad_points_; }
  Exec exec() const { return exec_; }

  /// Number of modes, N^d.
  std::size_t size() const { return mode_ext_.size(); }
  /// Number of grid points, M^d.
  std::size_t grid_size() const { return grid_ext_.size(); }
  Extents mode_extents() const { return mode_ext_; }
  Extents grid_extents() const { return grid_ext_; }

  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double lambda0() const { return lambda0_; }
  double max_eigenvalue() const { return lambda_max_; }

  /// 1-based multi-index (k_0, k_1) of flat mode index i (k_1 = 1 in 1D).
  std::array<int, 2> mode_index(std::size_t i) const;
  std::size_t flat_index(int k0, int k1 = 1) const;

  /// ||phi_k||^2_{L2} = prod_i L_i / 2, the same for every mode.
  double mode_norm_sq() const { return mode_norm_sq_; }

  const AxisTables& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }

  /// Tensor evaluation of coefficients on a grid. With derivative_axis >= 0 the
  /// partial derivative along that axis is evaluated (dealiasing grid only).
  std::vector<double> synthesize(std::span<const double> coeffs, GridKind kind,
                                 int derivative_axis = -1) const;
  /// Inverse DST on the sample grid, Galerkin quadrature on the dealiasing grid.
  std::vector<double> analyze(std::span<const double> samples, GridKind kind) const;

  /// Node coordinates of one axis of a grid.
  std::vector<double> grid_nodes(GridKind kind, int axis) const;

 private:
  Basis() = default;

  DomainSpec domain_;
  Exec exec_ = Exec::parallel;
  int quad_points_ = 0;
  Extents mode_ext_;
  Extents grid_ext_;
  std::vector<double> eigenvalues_;
  double lambda0_ = 0.0;
  double lambda_max_ = 0.0;
  double mode_norm_sq_ = 0.0;
  std::array<AxisTables, 2> axes_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Modal coefficients of a scalar field. Value type; the basis is shared and
/// immutable.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(BasisPtr basis);
  SpectralField(BasisPtr basis, std::vector<double> coeffs);

  static SpectralField single_mode(BasisPtr basis, double amplitude, int k0, int k1 = 1);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  bool empty() const { return basis_ == nullptr; }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  bool is_finite() const;
  bool same_basis(const SpectralField& other) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);

 private:
  BasisPtr basis_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a);
SpectralField operator*(double s, SpectralField a);
SpectralField operator*(SpectralField a, double s);

/// Point values of a field on one of the two grids.
struct GridField {
  BasisPtr basis;
  GridKind kind = GridKind::sample;
  std::vector<double> samples;
};

// -- operations ---------------------------------------------------------------

/// One eigenvalue per mode in flat order, lambda_k = sum_i (k_i pi / L_i)^2.
std::vector<double> eigenvalues(const DomainSpec& domain);

/// c_k -> lambda_k^theta c_k. Negative theta acts as the inverse power, which is
/// defined since every lambda_k > 0.
SpectralField fractional_power(const SpectralField& field, double theta);

/// ||A^{s/2} u||_{L2}.
double sobolev_norm(const SpectralField& field, double s);

/// L2 inner product.
double l2_inner(const SpectralField& f, const SpectralField& g);

GridField to_grid(const SpectralField& field);
/// Throws std::invalid_argument when the sample count does not match the basis.
SpectralField to_spectral(const GridField& grid);

/// Values (derivative_axis < 0) or one partial derivative on the dealiasing grid.
GridField dealiased_samples(const SpectralField& field, int derivative_axis = -1);
/// Galerkin projection of dealiasing-grid values onto the N-mode basis.
SpectralField project_dealiased(const GridField& grid);

/// Galerkin projection of f*g; exact for M >= ceil(3N/2).
SpectralField product_dealiased(const SpectralField& f, const SpectralField& g);
/// Galerkin projection of grad f . grad g; exact for M >= ceil(3N/2).
SpectralField gradient_dot(const SpectralField& f, const SpectralField& g);

/// max |u| over the nodes of a grid.
double grid_max_abs(const GridField& grid);

/// Largest observed ||v||_inf / ||v||_{H^s} (dealiasing grid sup) over random
/// fields with decaying spectra. Reporting only; the true embedding constant is
/// a supremum over the whole space.
double empirical_embedding_constant(const BasisPtr& basis, double s, int samples,
                                    std::uint64_t seed);

namespace detail {
/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace detail

}  // namespace bck
