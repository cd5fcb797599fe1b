#include "donor/matrix_elements.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "donor/sampling.hpp"

namespace donor {

namespace {

/// Runs `work(shard)` for every shard index on up to `threads` workers.
template <typename Work>
void run_shards(std::size_t shards, unsigned threads, Work&& work) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(shards)));
  if (workers == 1) {
    for (std::size_t k = 0; k < shards; ++k) work(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < shards; k = next++) work(k);
    });
  }
}

std::uint64_t shard_size(std::uint64_t n, std::size_t shards, std::size_t k) {
  return n / shards + (k < n % shards ? 1 : 0);
}

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
  }
};

struct Estimate {
  double mean;
  double std_error;
};

Estimate estimate(const Moments& m, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double mean = m.sum / nn;
  const double var = std::max(0.0, m.sumsq / nn - mean * mean) * nn / (nn - 1.0);
  return {mean, std::sqrt(var / nn)};
}

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

void check_overlap(const Eigen::Matrix3d& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw NumericalError("overlap matrix is not positive definite (smallest eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()) +
                         "); increase n_samples to reduce Monte-Carlo noise");
  }
}

nlohmann::json matrix_json(const Eigen::Matrix3d& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

Eigen::Matrix3d matrix_from_json(const nlohmann::json& j) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const MatrixElementSet& me) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : me.params) params.push_back({{"alpha", p.alpha}, {"beta", p.beta}, {"lambda", p.lambda}});
  j = nlohmann::json{{"basis", {"LL", "LR", "RR"}},
                     {"R_aB", me.R},
                     {"n_samples", me.n_samples},
                     {"seed", me.seed},
                     {"shards", me.shards},
                     {"rejected", me.rejected},
                     {"params", params},
                     {"norm_constants", me.norm_constants},
                     {"S", matrix_json(me.S)},
                     {"H0", matrix_json(me.H0)},
                     {"X", matrix_json(me.X)},
                     {"stderr_S", matrix_json(me.stderr_S)},
                     {"stderr_H0", matrix_json(me.stderr_H0)},
                     {"stderr_X", matrix_json(me.stderr_X)}};
}

void from_json(const nlohmann::json& j, MatrixElementSet& me) {
  me.R = j.at("R_aB").get<double>();
  me.n_samples = j.at("n_samples").get<std::uint64_t>();
  me.seed = j.at("seed").get<std::uint64_t>();
  me.shards = j.at("shards").get<std::size_t>();
  me.rejected = j.at("rejected").get<std::uint64_t>();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& p = j.at("params").at(k);
    me.params[k] = {p.at("alpha").get<double>(), p.at("beta").get<double>(), p.at("lambda").get<double>()};
    me.norm_constants[k] = j.at("norm_constants").at(k).get<double>();
  }
  me.S = matrix_from_json(j.at("S"));
  me.H0 = matrix_from_json(j.at("H0"));
  me.X = matrix_from_json(j.at("X"));
  me.stderr_S = matrix_from_json(j.at("stderr_S"));
  me.stderr_H0 = matrix_from_json(j.at("stderr_H0"));
  me.stderr_X = matrix_from_json(j.at("stderr_X"));
}

MatrixElementSet compute_matrix_elements(const std::array<TrialWavefunction, 3>& states, std::uint64_t n_samples,
                                         std::uint64_t seed, const McOptions& options) {
  const double R = states[0].separation();
  if (states[0].kind() != TrialKind::kLL || states[1].kind() != TrialKind::kLR ||
      states[2].kind() != TrialKind::kRR) {
    throw std::invalid_argument("matrix elements need states ordered LL, LR, RR");
  }
  for (const auto& st : states) {
    if (st.separation() != R) throw std::invalid_argument("all basis states must share the donor separation");
  }
  if (!std::isfinite(R)) throw std::invalid_argument("matrix elements need a finite donor separation");
  if (n_samples < kMinimumSamples) {
    throw std::invalid_argument("n_samples must be >= " + std::to_string(kMinimumSamples));
  }
  if (options.shards == 0) throw std::invalid_argument("shard count must be >= 1");

  double s = std::numeric_limits<double>::infinity();
  for (const auto& st : states) s = std::min({s, st.params().alpha, st.params().beta});
  const DonorCloudDensity density({0.0, R}, s);

  struct ShardResult {
    std::array<Moments, 9> S, H, X;
    std::uint64_t rejected = 0;
  };
  std::vector<ShardResult> results(options.shards);

  run_shards(options.shards, options.threads, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    ShardResult& out = results[k];
    const std::uint64_t count = shard_size(n_samples, options.shards, k);
    std::array<TrialWavefunction::Amplitude, 3> amp;
    for (std::uint64_t n = 0; n < count; ++n) {
      ElectronPair pair{density.sample(rng), density.sample(rng)};
      while (near_singularity(pair, R, kRejectionShell)) {
        ++out.rejected;
        pair = {density.sample(rng), density.sample(rng)};
      }
      const double weight = 1.0 / (density.density(pair.r1) * density.density(pair.r2));
      const double potential = two_donor_potential(pair, R);
      const double dipole = pair.r1.x() + pair.r2.x();
      for (int i = 0; i < 3; ++i) amp[i] = states[i].amplitude(pair);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double overlap = amp[i].value * amp[j].value * weight;
          out.S[3 * i + j].add(overlap);
          out.X[3 * i + j].add(overlap * dipole);
          out.H[3 * i + j].add(amp[i].value * (amp[j].kinetic + potential * amp[j].value) * weight);
        }
      }
    }
  });

  ShardResult total;
  for (const auto& r : results) {
    for (int e = 0; e < 9; ++e) {
      total.S[e].sum += r.S[e].sum;
      total.S[e].sumsq += r.S[e].sumsq;
      total.H[e].sum += r.H[e].sum;
      total.H[e].sumsq += r.H[e].sumsq;
      total.X[e].sum += r.X[e].sum;
      total.X[e].sumsq += r.X[e].sumsq;
    }
    total.rejected += r.rejected;
  }

  MatrixElementSet me;
  me.R = R;
  me.n_samples = n_samples;
  me.seed = seed;
  me.shards = options.shards;
  me.rejected = total.rejected;
  Eigen::Matrix3d S, H, X, eS, eH, eX;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Estimate es = estimate(total.S[3 * i + j], n_samples);
      const Estimate eh = estimate(total.H[3 * i + j], n_samples);
      const Estimate ex = estimate(total.X[3 * i + j], n_samples);
      S(i, j) = es.mean;
      H(i, j) = eh.mean;
      X(i, j) = ex.mean;
      eS(i, j) = es.std_error;
      eH(i, j) = eh.std_error;
      eX(i, j) = ex.std_error;
    }
  }
  Eigen::Vector3d scale;
  for (int i = 0; i < 3; ++i) {
    if (!(S(i, i) > 0.0)) throw NumericalError("basis state has vanishing Monte-Carlo norm");
    scale(i) = 1.0 / std::sqrt(S(i, i));
    me.params[i] = states[i].params();
    me.norm_constants[i] = states[i].norm_constant() * scale(i);
  }
  const Eigen::Matrix3d outer = scale * scale.transpose();
  me.S = symmetrized(S.cwiseProduct(outer));
  me.H0 = symmetrized(H.cwiseProduct(outer));
  me.X = symmetrized(X.cwiseProduct(outer));
  for (int i = 0; i < 3; ++i) me.S(i, i) = 1.0;
  me.stderr_S = symmetrized(eS.cwiseProduct(outer));
  me.stderr_H0 = symmetrized(eH.cwiseProduct(outer));
  me.stderr_X = symmetrized(eX.cwiseProduct(outer));
  return me;
}

OneElectronElements compute_one_electron_elements(std::span<const SlaterOrbital> orbitals,
                                                  std::span<const double> donors_x, std::uint64_t n_samples,
                                                  std::uint64_t seed, double density_decay,
                                                  const McOptions& options) {
  if (orbitals.empty()) throw std::invalid_argument("need at least one orbital");
  if (donors_x.empty()) throw std::invalid_argument("need at least one donor");
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  if (options.shards == 0) throw std::invalid_argument("shard count must be >= 1");
  const std::size_t m = orbitals.size();
  const DonorCloudDensity density(std::vector<double>(donors_x.begin(), donors_x.end()), density_decay);

  struct ShardResult {
    std::vector<Moments> S, H, X;
    std::uint64_t rejected = 0;
  };
  std::vector<ShardResult> results(options.shards);

  run_shards(options.shards, options.threads, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    ShardResult& out = results[k];
    out.S.assign(m * m, {});
    out.H.assign(m * m, {});
    out.X.assign(m * m, {});
    std::vector<OrbitalAmplitude> amp(m);
    auto singular = [&](const Eigen::Vector3d& r) {
      for (double d : donors_x) {
        if ((r - Eigen::Vector3d(d, 0.0, 0.0)).norm() < kRejectionShell) return true;
      }
      return false;
    };
    const std::uint64_t count = shard_size(n_samples, options.shards, k);
    for (std::uint64_t n = 0; n < count; ++n) {
      Eigen::Vector3d r = density.sample(rng);
      while (singular(r)) {
        ++out.rejected;
        r = density.sample(rng);
      }
      const double weight = 1.0 / density.density(r);
      const double potential = one_electron_potential(r, donors_x);
      for (std::size_t i = 0; i < m; ++i) amp[i] = orbital_amplitude(orbitals[i], r);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double overlap = amp[i].value * amp[j].value * weight;
          out.S[m * i + j].add(overlap);
          out.X[m * i + j].add(overlap * r.x());
          out.H[m * i + j].add(amp[i].value * (amp[j].kinetic + potential * amp[j].value) * weight);
        }
      }
    }
  });

  OneElectronElements out;
  out.n_samples = n_samples;
  out.S.resize(m, m);
  out.H.resize(m, m);
  out.X.resize(m, m);
  out.stderr_S.resize(m, m);
  out.stderr_H.resize(m, m);
  out.stderr_X.resize(m, m);
  for (std::size_t e = 0; e < m * m; ++e) {
    Moments s, h, x;
    for (const auto& r : results) {
      s.sum += r.S[e].sum;
      s.sumsq += r.S[e].sumsq;
      h.sum += r.H[e].sum;
      h.sumsq += r.H[e].sumsq;
      x.sum += r.X[e].sum;
      x.sumsq += r.X[e].sumsq;
    }
    const auto i = static_cast<Eigen::Index>(e / m);
    const auto j = static_cast<Eigen::Index>(e % m);
    const Estimate es = estimate(s, n_samples), eh = estimate(h, n_samples), ex = estimate(x, n_samples);
    out.S(i, j) = es.mean;
    out.H(i, j) = eh.mean;
    out.X(i, j) = ex.mean;
    out.stderr_S(i, j) = es.std_error;
    out.stderr_H(i, j) = eh.std_error;
    out.stderr_X(i, j) = ex.std_error;
  }
  for (const auto& r : results) out.rejected += r.rejected;
  out.H = 0.5 * (out.H + out.H.transpose()).eval();
  return out;
}

EigenSolution generalized_eigen(const Eigen::Matrix3d& H, const Eigen::Matrix3d& S) {
  check_overlap(S);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> solver(symmetrized(H), symmetrized(S));
  if (solver.info() != Eigen::Success) throw NumericalError("generalized eigensolver failed");
  EigenSolution out;
  out.energies = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  for (int k = 0; k < 3; ++k) {
    Eigen::Index imax = 0;
    out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, k) < 0.0) out.vectors.col(k) *= -1.0;
  }
  return out;
}

EigenSolution generalized_eigen(const MatrixElementSet& me) { return generalized_eigen(me.H0, me.S); }

LowdinFrame lowdin_orthogonalize(const MatrixElementSet& me) {
  const Eigen::Matrix3d S = symmetrized(me.S);
  check_overlap(S);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
  const Eigen::Matrix3d map =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  LowdinFrame out;
  out.basis_map = symmetrized(map);
  out.H0 = symmetrized(out.basis_map * symmetrized(me.H0) * out.basis_map);
  out.X = symmetrized(out.basis_map * symmetrized(me.X) * out.basis_map);
  return out;
}

std::string_view to_string(BasisTreatment treatment) {
  return treatment == BasisTreatment::kOrthogonal ? "orthogonal" : "lowdin";
}

BasisTreatment parse_basis_treatment(std::string_view text) {
  if (text == "orthogonal") return BasisTreatment::kOrthogonal;
  if (text == "lowdin") return BasisTreatment::kLowdin;
  throw std::invalid_argument("unknown basis treatment '" + std::string(text) + "' (orthogonal|lowdin)");
}

ChargeHamiltonian make_charge_hamiltonian(const MatrixElementSet& me, BasisTreatment treatment) {
  ChargeHamiltonian out;
  out.treatment = treatment;
  if (treatment == BasisTreatment::kOrthogonal) {
    out.h0 = symmetrized(me.H0);
    out.x = symmetrized(me.X);
  } else {
    const LowdinFrame frame = lowdin_orthogonalize(me);
    out.h0 = frame.H0;
    out.x = frame.X;
  }
  return out;
}

}  // namespace donor
