#include "ssbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ssbm {

namespace {

constexpr double kIdentifiabilityTol = 1e-12;
constexpr double kProbabilitySlack = 1e-12;

}  // namespace

std::vector<int> order_by_magnitude(const Vector& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    return values[a] > values[b];
  });
  return order;
}

// ---------------------------------------------------------------------------
// MembershipMatrix

MembershipMatrix::MembershipMatrix(std::vector<int> communities, int K, bool require_nonempty)
    : communities_(std::move(communities)), K_(K), sizes_(K > 0 ? K : 0, 0) {
  if (K < 1) throw std::invalid_argument("membership: K must be >= 1");
  for (int g : communities_) {
    if (g < 0 || g >= K) throw std::invalid_argument("membership: label out of range");
    ++sizes_[g];
  }
  if (require_nonempty) {
    for (int k = 0; k < K; ++k)
      if (sizes_[k] == 0)
        throw std::invalid_argument("membership: community " + std::to_string(k + 1) + " is empty");
  }
}

MembershipMatrix MembershipMatrix::from_labels(std::span<const int> one_based, int K,
                                               bool require_nonempty) {
  std::vector<int> c(one_based.size());
  std::transform(one_based.begin(), one_based.end(), c.begin(), [](int g) { return g - 1; });
  return MembershipMatrix(std::move(c), K, require_nonempty);
}

MembershipMatrix MembershipMatrix::from_sizes(std::span<const int> sizes) {
  std::vector<int> c;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < 0) throw std::invalid_argument("membership: negative community size");
    c.insert(c.end(), sizes[k], static_cast<int>(k));
  }
  return MembershipMatrix(std::move(c), static_cast<int>(sizes.size()));
}

std::vector<int> MembershipMatrix::labels() const {
  std::vector<int> out(communities_.size());
  std::transform(communities_.begin(), communities_.end(), out.begin(), [](int g) { return g + 1; });
  return out;
}

int MembershipMatrix::n_min() const { return *std::min_element(sizes_.begin(), sizes_.end()); }
int MembershipMatrix::n_max() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

int MembershipMatrix::n_max_second() const {
  if (K_ == 1) return sizes_[0];
  std::vector<int> s = sizes_;
  std::nth_element(s.begin(), s.begin() + 1, s.end(), std::greater<>());
  return s[1];
}

std::vector<int> MembershipMatrix::members(int k) const {
  std::vector<int> out;
  out.reserve(sizes_[k]);
  for (int i = 0; i < n(); ++i)
    if (communities_[i] == k) out.push_back(i);
  return out;
}

Matrix MembershipMatrix::dense() const {
  Matrix theta = Matrix::Zero(n(), K_);
  for (int i = 0; i < n(); ++i) theta(i, communities_[i]) = 1.0;
  return theta;
}

// ---------------------------------------------------------------------------
// ConnectivityMatrix / DegreeParams / ModelSpec

ConnectivityMatrix::ConnectivityMatrix(Matrix B) : B_(std::move(B)) {
  if (B_.rows() == 0 || B_.rows() != B_.cols())
    throw std::invalid_argument("connectivity: B must be square and nonempty");
  for (int k = 0; k < B_.rows(); ++k) {
    for (int l = 0; l < B_.cols(); ++l) {
      if (!(B_(k, l) >= 0.0 && B_(k, l) <= 1.0))
        throw std::invalid_argument("connectivity: entries must lie in [0, 1]");
      if (B_(k, l) != B_(l, k)) throw std::invalid_argument("connectivity: B must be symmetric");
    }
  }
}

DegreeParams::DegreeParams(std::vector<double> psi, const MembershipMatrix& membership)
    : psi_(std::move(psi)) {
  if (static_cast<int>(psi_.size()) != membership.n())
    throw std::invalid_argument("degrees: psi length must equal n");
  std::vector<double> peak(membership.K(), 0.0);
  for (int i = 0; i < membership.n(); ++i) {
    if (!(psi_[i] > 0.0) || !std::isfinite(psi_[i]))
      throw std::invalid_argument("degrees: psi entries must be positive and finite");
    peak[membership[i]] = std::max(peak[membership[i]], psi_[i]);
  }
  for (int k = 0; k < membership.K(); ++k) {
    if (membership.size(k) > 0 && std::abs(peak[k] - 1.0) > kIdentifiabilityTol)
      throw std::invalid_argument("degrees: max psi over community " + std::to_string(k + 1) +
                                  " must equal 1");
  }
}

DegreeParams DegreeParams::normalized(std::vector<double> raw, const MembershipMatrix& membership) {
  if (static_cast<int>(raw.size()) != membership.n())
    throw std::invalid_argument("degrees: psi length must equal n");
  std::vector<double> peak(membership.K(), 0.0);
  for (int i = 0; i < membership.n(); ++i) {
    if (!(raw[i] > 0.0)) throw std::invalid_argument("degrees: psi entries must be positive");
    peak[membership[i]] = std::max(peak[membership[i]], raw[i]);
  }
  for (int i = 0; i < membership.n(); ++i) raw[i] /= peak[membership[i]];
  return DegreeParams(std::move(raw), membership);
}

ModelSpec::ModelSpec(MembershipMatrix membership, ConnectivityMatrix connectivity,
                     std::optional<DegreeParams> degrees, std::optional<PresetInfo> preset)
    : membership_(std::move(membership)),
      connectivity_(std::move(connectivity)),
      degrees_(std::move(degrees)),
      preset_(std::move(preset)) {
  if (membership_.K() != connectivity_.K())
    throw std::invalid_argument("model: membership K and connectivity K differ");
  for (int k = 0; k < membership_.K(); ++k)
    if (membership_.size(k) == 0) throw std::invalid_argument("model: empty community");
  if (degrees_) DegreeParams(degrees_->values(), membership_);  // revalidate against this Theta
  alpha_ = connectivity_.max_entry();
}

// ---------------------------------------------------------------------------
// Population quantities

Matrix build_probability_matrix(const ModelSpec& spec) {
  const int n = spec.n();
  Matrix P(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double p = spec.probability(i, j);
      if (p > 1.0 + kProbabilitySlack)
        throw std::domain_error("model: probability entry exceeds 1");
      P(i, j) = p;
    }
  }
  return P;
}

HeterogeneityStats heterogeneity_stats(const ModelSpec& spec) {
  const auto& theta = spec.membership();
  const int K = spec.K();
  HeterogeneityStats s;
  s.phi_norms.assign(K, 0.0);
  for (int i = 0; i < spec.n(); ++i) {
    const double p = spec.psi(i);
    if (!(p > 0.0)) throw std::domain_error("heterogeneity: psi must be positive");
    s.phi_norms[theta[i]] += p * p;
  }
  s.n_tilde = s.phi_norms;
  for (double& v : s.phi_norms) v = std::sqrt(v);

  s.psi_tilde.resize(spec.n());
  s.nu.assign(K, 0.0);
  for (int i = 0; i < spec.n(); ++i) {
    const int k = theta[i];
    s.psi_tilde[i] = spec.psi(i) / s.phi_norms[k];
    s.nu[k] += 1.0 / (s.psi_tilde[i] * s.psi_tilde[i]);
  }
  for (int k = 0; k < K; ++k) {
    const double nk = theta.size(k);
    s.nu[k] /= nk * nk;
  }
  s.n_tilde_min = *std::min_element(s.n_tilde.begin(), s.n_tilde.end());
  s.n_tilde_max = *std::max_element(s.n_tilde.begin(), s.n_tilde.end());
  return s;
}

double HeterogeneityStats::weighted_heterogeneity(const MembershipMatrix& membership) const {
  double total = 0.0;
  for (int k = 0; k < membership.K(); ++k) {
    const double nk = membership.size(k);
    total += nk * nk * nu[k];
  }
  return total;
}

PopulationEigen population_eigen(const ModelSpec& spec) {
  const auto& theta = spec.membership();
  const int K = spec.K();
  const HeterogeneityStats stats = heterogeneity_stats(spec);

  // Psi B Psi with Psi = diag(||phi_k||); for an SBM this is Delta B Delta.
  Matrix core = spec.connectivity().matrix();
  for (int k = 0; k < K; ++k) {
    core.row(k) *= stats.phi_norms[k];
    core.col(k) *= stats.phi_norms[k];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(core);
  const std::vector<int> order = order_by_magnitude(es.eigenvalues());

  PopulationEigen pe;
  pe.degree_corrected = spec.degree_corrected();
  pe.D.resize(K);
  Matrix H(K, K);
  for (int c = 0; c < K; ++c) {
    pe.D[c] = es.eigenvalues()[order[c]];
    H.col(c) = es.eigenvectors().col(order[c]);
  }

  pe.U.resize(spec.n(), K);
  for (int i = 0; i < spec.n(); ++i) pe.U.row(i) = stats.psi_tilde[i] * H.row(theta[i]);

  if (pe.degree_corrected) {
    pe.core = H;
  } else {
    pe.core = H;
    for (int k = 0; k < K; ++k) pe.core.row(k) /= std::sqrt(static_cast<double>(theta.size(k)));
  }

  const double scale = pe.D.cwiseAbs().maxCoeff();
  const double zero_tol = 1e-12 * scale;
  pe.rank = 0;
  pe.gamma = 0.0;
  for (int c = 0; c < K; ++c) {
    if (std::abs(pe.D[c]) > zero_tol && scale > 0.0) {
      ++pe.rank;
      pe.gamma = std::abs(pe.D[c]);  // D is ordered by decreasing magnitude
    }
  }
  pe.rank_deficient = pe.rank < K;

  const double group_tol = 1e-9 * std::max(scale, 1e-300);
  for (int c = 0; c < K;) {
    int m = 1;
    while (c + m < K && std::abs(pe.D[c + m] - pe.D[c]) <= group_tol) ++m;
    pe.multiplicities.push_back(m);
    c += m;
  }
  return pe;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<int> balanced_sizes(int n, int K) {
  if (K < 1 || n < K) throw std::invalid_argument("balanced_sizes: need 1 <= K <= n");
  std::vector<int> sizes(K, n / K);
  for (int k = 0; k < n % K; ++k) ++sizes[k];
  return sizes;
}

ModelSpec preset_planted_partition(int n, int K, double alpha, double lambda,
                                   std::span<const int> sizes) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("planted partition: lambda must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("planted partition: alpha must lie in (0, 1]");
  if (static_cast<int>(sizes.size()) != K) throw std::invalid_argument("planted partition: sizes must have K entries");
  if (std::accumulate(sizes.begin(), sizes.end(), 0) != n)
    throw std::invalid_argument("planted partition: sizes must sum to n");
  Matrix B0 = Matrix::Constant(K, K, 1.0 - lambda);
  B0.diagonal().setOnes();
  PresetInfo info{"planted_partition", lambda, alpha, std::nullopt};
  return ModelSpec(MembershipMatrix::from_sizes(sizes), ConnectivityMatrix(alpha * B0), std::nullopt,
                   std::move(info));
}

ModelSpec preset_planted_clique(int n, int clique_size) {
  if (clique_size < 2 || clique_size > n - 1)
    throw std::invalid_argument("planted clique: need 2 <= clique_size <= n - 1");
  Matrix B(2, 2);
  B << 1.0, 0.5, 0.5, 0.5;
  const int sizes[] = {clique_size, n - clique_size};
  // Smallest |eigenvalue| of B is (3 - sqrt 5) / 4.
  PresetInfo info{"planted_clique", (3.0 - std::sqrt(5.0)) / 4.0, 1.0, clique_size};
  return ModelSpec(MembershipMatrix::from_sizes(sizes), ConnectivityMatrix(B), std::nullopt,
                   std::move(info));
}

ModelSpec with_degrees(const ModelSpec& spec, DegreeParams degrees) {
  return ModelSpec(spec.membership(), spec.connectivity(), std::move(degrees), spec.preset());
}

}  // namespace ssbm
