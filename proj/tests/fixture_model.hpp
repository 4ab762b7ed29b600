#pragma once

#include "biocrypt/detector.hpp"
#include "biocrypt/synthetic.hpp"

namespace fixtures {

inline const std::vector<biocrypt::TrainingSample>& training_samples() {
  static const auto samples = biocrypt::synthetic::to_samples(biocrypt::synthetic::training_set());
  return samples;
}

inline const biocrypt::LinearSvmModel& model() {
  static const auto m = biocrypt::train_svm(training_samples(), biocrypt::kDefaultLambda, biocrypt::kDefaultEpochs,
                                            biocrypt::kDefaultTrainSeed);
  return m;
}

}  // namespace fixtures
