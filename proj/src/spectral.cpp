#include "bck/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace bck {

using std::numbers::pi;

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("domain: dimension must be 1 or 2, got " +
                                std::to_string(dimension));
  for (int i = 0; i < dimension; ++i)
    if (!(lengths[static_cast<std::size_t>(i)] > 0.0) ||
        !std::isfinite(lengths[static_cast<std::size_t>(i)]))
      throw std::invalid_argument("domain: lengths must be positive and finite");
  if (modes < 1) throw std::invalid_argument("domain: modes must be >= 1");
  if (quadrature_points != 0 && quadrature_points < 1)
    throw std::invalid_argument("domain: quadrature_points must be >= 1");
  if (quadrature_points != 0 && !allow_aliasing &&
      quadrature_points < min_quadrature_points(modes))
    throw std::invalid_argument("domain: quadrature_points must be >= ceil(3N/2) = " +
                                std::to_string(min_quadrature_points(modes)));
}

int DomainSpec::effective_quadrature_points() const {
  return quadrature_points == 0 ? min_quadrature_points(modes) : quadrature_points;
}

namespace detail {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n from the Tricomi estimate of the i-th root from the top.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const std::size_t hi = static_cast<std::size_t>(n - 1 - i);
    const std::size_t lo = static_cast<std::size_t>(i);
    nodes[hi] = x;
    nodes[lo] = -x;
    weights[hi] = w;
    weights[lo] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

}  // namespace detail

namespace {

Basis::AxisTables build_axis(double length, int n_modes, int n_quad) {
  Basis::AxisTables t;
  t.length = length;
  const std::size_t N = static_cast<std::size_t>(n_modes);
  const std::size_t M = static_cast<std::size_t>(n_quad);

  t.sample_nodes.resize(M);
  t.sample_eval.resize(M * N);
  t.sample_proj.resize(N * M);
  for (std::size_t j = 0; j < M; ++j) {
    const double theta = pi * static_cast<double>(j + 1) / static_cast<double>(M + 1);
    t.sample_nodes[j] = length * theta / pi;
    for (std::size_t k = 0; k < N; ++k) {
      const double s = std::sin(static_cast<double>(k + 1) * theta);
      t.sample_eval[j * N + k] = s;
      // DST-I is its own inverse up to 2/(M+1); modes beyond M alias, below are exact
      t.sample_proj[k * M + j] = (k < M ? 2.0 / static_cast<double>(M + 1) : 0.0) * s;
    }
  }

  std::vector<double> y;
  std::vector<double> w;
  detail::gauss_legendre(n_quad, y, w);
  t.dealias_nodes.resize(M);
  t.dealias_weights.resize(M);
  t.dealias_eval.resize(M * N);
  t.dealias_deriv.resize(M * N);
  t.dealias_proj.resize(N * M);
  for (std::size_t j = 0; j < M; ++j) {
    // descending y gives ascending x
    const double yj = y[M - 1 - j];
    const double theta = std::acos(yj);
    const double sin_theta = std::sin(theta);
    t.dealias_nodes[j] = length * theta / pi;
    // int_0^L F dx = (L/pi) int_0^pi F dtheta = (L/pi) int_{-1}^{1} F / sin(theta) dy
    t.dealias_weights[j] = (length / pi) * w[M - 1 - j] / sin_theta;
    for (std::size_t k = 0; k < N; ++k) {
      const double kk = static_cast<double>(k + 1);
      const double s = std::sin(kk * theta);
      t.dealias_eval[j * N + k] = s;
      t.dealias_deriv[j * N + k] = (kk * pi / length) * std::cos(kk * theta);
      t.dealias_proj[k * M + j] = (2.0 / length) * t.dealias_weights[j] * s;
    }
  }
  return t;
}

// Applies per-axis matrices to a tensor: axis 0 first, then axis 1.
std::vector<double> apply_separable(Exec exec, int dim, std::span<const double> in, Extents in_ext,
                                    const std::array<MatrixView, 2>& mats) {
  Extents ext0{mats[0].rows, in_ext.n1};
  std::vector<double> tmp(ext0.size());
  kernels::contract_axis(exec, mats[0], in, in_ext, 0, tmp);
  if (dim == 1) return tmp;
  Extents ext1{ext0.n0, mats[1].rows};
  std::vector<double> out(ext1.size());
  kernels::contract_axis(exec, mats[1], tmp, ext0, 1, out);
  return out;
}

void require_same_basis(const SpectralField& a, const SpectralField& b) {
  if (!a.same_basis(b)) throw std::invalid_argument("spectral fields live on different bases");
}

}  // namespace

std::shared_ptr<const Basis> Basis::create(const DomainSpec& domain, Exec exec) {
  domain.validate();
  std::shared_ptr<Basis> b(new Basis());
  b->domain_ = domain;
  b->exec_ = exec;
  b->quad_points_ = domain.effective_quadrature_points();
  const std::size_t N = static_cast<std::size_t>(domain.modes);
  const std::size_t M = static_cast<std::size_t>(b->quad_points_);
  if (domain.dimension == 1) {
    b->mode_ext_ = {N, 1};
    b->grid_ext_ = {M, 1};
  } else {
    b->mode_ext_ = {N, N};
    b->grid_ext_ = {M, M};
  }
  b->mode_norm_sq_ = 1.0;
  for (int i = 0; i < domain.dimension; ++i) {
    const double L = domain.lengths[static_cast<std::size_t>(i)];
    b->axes_[static_cast<std::size_t>(i)] = build_axis(L, domain.modes, b->quad_points_);
    b->mode_norm_sq_ *= L / 2.0;
  }
  b->eigenvalues_ = bck::eigenvalues(domain);
  b->lambda0_ = *std::min_element(b->eigenvalues_.begin(), b->eigenvalues_.end());
  b->lambda_max_ = *std::max_element(b->eigenvalues_.begin(), b->eigenvalues_.end());
  return b;
}

std::array<int, 2> Basis::mode_index(std::size_t i) const {
  const std::size_t N = static_cast<std::size_t>(domain_.modes);
  return {static_cast<int>(i % N) + 1, static_cast<int>(i / N) + 1};
}

std::size_t Basis::flat_index(int k0, int k1) const {
  return static_cast<std::size_t>(k0 - 1) +
         static_cast<std::size_t>(domain_.modes) * static_cast<std::size_t>(k1 - 1);
}

std::vector<double> Basis::synthesize(std::span<const double> coeffs, GridKind kind,
                                      int derivative_axis) const {
  const std::size_t N = static_cast<std::size_t>(domain_.modes);
  const std::size_t M = static_cast<std::size_t>(quad_points_);
  std::array<MatrixView, 2> mats{};
  for (int i = 0; i < dimension(); ++i) {
    const AxisTables& t = axes_[static_cast<std::size_t>(i)];
    const std::vector<double>* m = nullptr;
    if (kind == GridKind::sample) {
      if (derivative_axis >= 0)
        throw std::invalid_argument("derivatives are only sampled on the dealiasing grid");
      m = &t.sample_eval;
    } else {
      m = (i == derivative_axis) ? &t.dealias_deriv : &t.dealias_eval;
    }
    mats[static_cast<std::size_t>(i)] = MatrixView{m->data(), M, N};
  }
  return apply_separable(exec_, dimension(), coeffs, mode_ext_, mats);
}

std::vector<double> Basis::analyze(std::span<const double> samples, GridKind kind) const {
  const std::size_t N = static_cast<std::size_t>(domain_.modes);
  const std::size_t M = static_cast<std::size_t>(quad_points_);
  std::array<MatrixView, 2> mats{};
  for (int i = 0; i < dimension(); ++i) {
    const AxisTables& t = axes_[static_cast<std::size_t>(i)];
    const auto& m = kind == GridKind::sample ? t.sample_proj : t.dealias_proj;
    mats[static_cast<std::size_t>(i)] = MatrixView{m.data(), N, M};
  }
  return apply_separable(exec_, dimension(), samples, grid_ext_, mats);
}

std::vector<double> Basis::grid_nodes(GridKind kind, int axis) const {
  const AxisTables& t = axes_[static_cast<std::size_t>(axis)];
  return kind == GridKind::sample ? t.sample_nodes : t.dealias_nodes;
}

// -- SpectralField --------------------------------------------------------------

SpectralField::SpectralField(BasisPtr basis)
    : basis_(std::move(basis)), coeffs_(basis_->size(), 0.0) {}

SpectralField::SpectralField(BasisPtr basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_->size())
    throw std::invalid_argument("coefficient count does not match the basis");
}

SpectralField SpectralField::single_mode(BasisPtr basis, double amplitude, int k0, int k1) {
  SpectralField f(basis);
  f.coeffs_[basis->flat_index(k0, k1)] = amplitude;
  return f;
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

bool SpectralField::same_basis(const SpectralField& other) const {
  return basis_ == other.basis_ && basis_ != nullptr;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_basis(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_basis(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  require_same_basis(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }
SpectralField operator*(SpectralField a, double s) { return a *= s; }

// -- operations -------------------------------------------------------------------

std::vector<double> eigenvalues(const DomainSpec& domain) {
  domain.validate();
  const std::size_t N = static_cast<std::size_t>(domain.modes);
  const std::size_t count = domain.dimension == 1 ? N : N * N;
  std::vector<double> lam(count);
  for (std::size_t i = 0; i < count; ++i) {
    double sum = 0.0;
    std::size_t rest = i;
    for (int ax = 0; ax < domain.dimension; ++ax) {
      const double k = static_cast<double>(rest % N + 1);
      rest /= N;
      const double w = k * pi / domain.lengths[static_cast<std::size_t>(ax)];
      sum += w * w;
    }
    lam[i] = sum;
  }
  return lam;
}

SpectralField fractional_power(const SpectralField& field, double theta) {
  SpectralField out = field;
  if (theta == 0.0) return out;
  const auto lam = field.basis().eigenvalues();
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::pow(lam[i], theta);
  return out;
}

double sobolev_norm(const SpectralField& field, double s) {
  const auto lam = field.basis().eigenvalues();
  const auto c = field.coeffs();
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = (s == 0.0) ? 1.0 : std::pow(lam[i], s);
    sum += w * c[i] * c[i];
  }
  return std::sqrt(sum * field.basis().mode_norm_sq());
}

double l2_inner(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return sum * f.basis().mode_norm_sq();
}

GridField to_grid(const SpectralField& field) {
  return GridField{field.basis_ptr(), GridKind::sample,
                   field.basis().synthesize(field.coeffs(), GridKind::sample)};
}

SpectralField to_spectral(const GridField& grid) {
  if (!grid.basis) throw std::invalid_argument("grid field has no basis");
  if (grid.samples.size() != grid.basis->grid_size())
    throw std::invalid_argument("grid sample count " + std::to_string(grid.samples.size()) +
                                " does not match the basis grid size " +
                                std::to_string(grid.basis->grid_size()));
  return SpectralField(grid.basis, grid.basis->analyze(grid.samples, grid.kind));
}

GridField dealiased_samples(const SpectralField& field, int derivative_axis) {
  return GridField{field.basis_ptr(), GridKind::dealiasing,
                   field.basis().synthesize(field.coeffs(), GridKind::dealiasing, derivative_axis)};
}

SpectralField project_dealiased(const GridField& grid) {
  if (grid.kind != GridKind::dealiasing)
    throw std::invalid_argument("project_dealiased expects dealiasing-grid values");
  return to_spectral(grid);
}

SpectralField product_dealiased(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g);
  GridField a = dealiased_samples(f);
  const GridField b = dealiased_samples(g);
  kernels::multiply(f.basis().exec(), a.samples, b.samples, a.samples);
  return project_dealiased(a);
}

SpectralField gradient_dot(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g);
  const Basis& basis = f.basis();
  GridField acc{f.basis_ptr(), GridKind::dealiasing, std::vector<double>(basis.grid_size(), 0.0)};
  for (int ax = 0; ax < basis.dimension(); ++ax) {
    const GridField df = dealiased_samples(f, ax);
    const GridField dg = dealiased_samples(g, ax);
    kernels::multiply_add(basis.exec(), 1.0, df.samples, dg.samples, acc.samples);
  }
  return project_dealiased(acc);
}

double grid_max_abs(const GridField& grid) {
  return kernels::max_abs(grid.basis ? grid.basis->exec() : Exec::serial, grid.samples);
}

double empirical_embedding_constant(const BasisPtr& basis, double s, int samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto lam = basis->eigenvalues();
  double best = 0.0;
  for (int n = 0; n < samples; ++n) {
    SpectralField v(basis);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = normal(rng) / std::pow(lam[i], 0.5 * s + 0.5);
    const double hs = sobolev_norm(v, s);
    if (hs > 0.0) best = std::max(best, grid_max_abs(dealiased_samples(v)) / hs);
  }
  return best;
}

}  // namespace bck
