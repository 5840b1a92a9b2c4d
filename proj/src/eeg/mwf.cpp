#include <Eigen/Dense>
#include <string>

#include "mmdec/common/error.hpp"
#include "mmdec/common/log.hpp"
#include "mmdec/eeg/preprocess.hpp"

namespace mmdec::eeg {
namespace {

constexpr double kRegularization = 1e-9;
constexpr Eigen::Index kChunk = 4096;

// Second-moment matrix over the samples whose flag equals `wanted`.
Eigen::MatrixXd covariance(const SignalMatrix& data, const std::vector<bool>& flags, bool wanted,
                           std::size_t count) {
  const Eigen::Index channels = data.rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(channels, channels);
  Eigen::MatrixXd block(channels, kChunk);
  Eigen::Index filled = 0;
  const auto flush = [&] {
    if (filled == 0) return;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(filled));
    filled = 0;
  };
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    if (flags[static_cast<std::size_t>(t)] != wanted) continue;
    block.col(filled++) = data.col(t);
    if (filled == kChunk) flush();
  }
  flush();
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(count);
}

}  // namespace

EegRecording mwf_suppress(const EegRecording& x, const ArtifactMask& mask) {
  if (mask.global_flags.size() != x.samples()) {
    throw Error("mwf_suppress: mask covers " + std::to_string(mask.global_flags.size()) +
                " samples, recording has " + std::to_string(x.samples()));
  }
  const std::size_t channels = x.channels();
  const std::size_t flagged = mask.flagged_samples();
  const std::size_t clean = x.samples() - flagged;
  if (flagged < 2 * channels || clean < 2 * channels) {
    if (flagged > 0) {
      log_warning("mwf_suppress: " + std::to_string(flagged) + " flagged / " + std::to_string(clean) +
                  " clean samples is too few to fit a " + std::to_string(channels) +
                  "-channel filter; trial " + x.trial_id + " left unchanged");
    }
    return x;
  }

  const Eigen::MatrixXd clean_cov = covariance(x.data, mask.global_flags, false, clean);
  const Eigen::MatrixXd dirty_cov = covariance(x.data, mask.global_flags, true, flagged);

  // Artifact covariance, projected onto the PSD cone.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dirty_cov - clean_cov);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd artifact_cov = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  if (lambda.maxCoeff() == 0.0) return x;

  const double reg = kRegularization * clean_cov.trace() / static_cast<double>(channels);
  Eigen::MatrixXd total = clean_cov + artifact_cov;
  total.diagonal().array() += reg;
  const Eigen::MatrixXd w = total.ldlt().solve(artifact_cov);

  // out = x - W^T x
  Eigen::MatrixXd keep = -w.transpose();
  keep.diagonal().array() += 1.0;

  EegRecording out = x;
  for (Eigen::Index t0 = 0; t0 < x.data.cols(); t0 += kChunk) {
    const Eigen::Index len = std::min(kChunk, x.data.cols() - t0);
    out.data.middleCols(t0, len) = keep * x.data.middleCols(t0, len);
  }
  return out;
}

}  // namespace mmdec::eeg
