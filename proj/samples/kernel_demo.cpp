// Copyright 2026 The rffdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Walks through the library on a 2-qubit ring encoding: frequency support,
// Fourier transform, concentration measures, kernel approximation by each
// factorization, and a small random-feature SVM against the kernel SVM.

#include <cmath>
#include <cstdio>
#include <memory>

#include "rffdq/rffdq.hpp"

using namespace rffdq;

int main() {
    const auto circuit = qsim::ring_encoding(2, 1, 2);
    const auto ft = spectrum::kernel_fourier_transform(circuit);
    const auto q = spectrum::diagonal_distribution(ft);
    std::printf("kernel ring:2,1,2 has %zu frequencies, trace(F) = %.12f\n", ft.size(), ft.trace());
    std::printf("sum sqrt(q) = %.6f  (uniform would give %.6f)\n", dequant::sqrt_sum_concentration(q),
                std::sqrt(static_cast<double>(ft.size())));

    const qsim::FidelityKernel kernel{circuit};
    Rng rng = make_rng(2026);
    const auto pairs = rff::random_pairs(ft.support, 20, rng);
    for (std::size_t D : {10, 100, 1000}) {
        const auto chol = rff::pointwise_error(kernel, rff::approx_kernel_cholesky(ft, D, rng), pairs);
        const auto eig = rff::pointwise_error(kernel, rff::approx_kernel_eigen(ft, D, rng), pairs);
        std::printf("D = %4zu  max error: cholesky %.4f  eigen %.4f\n", D, chol.max, eig.max);
    }

    harness::ExperimentConfig c;
    c.dim = 2;
    c.n_train = 200;
    c.n_test = 200;
    const auto data = harness::prepare_data(c, 2);
    const auto dist = rff::make_distribution(rff::Strategy::TruncatedConvolutional, ft.support, {});
    const std::size_t D = 200;
    const auto map = rff::trig_feature_map(rff::sample_frequencies(dist, D, rng), ft.support.base());
    const double scale = std::sqrt(static_cast<double>(D));
    learners::SvmOptions opts;
    opts.seed = 7;
    const auto svm = learners::train_rff_svm(map.transform(data.train.X, scale), data.train.y, 0.0, 10.0, D, opts);
    const double rff_risk = learners::empirical_risk(svm.decision_on_features(map.transform(data.test.X, scale)), data.test.y,
                                                     learners::Loss::ZeroOne);

    const auto K = qsim::gram_matrix(circuit, data.train.X);
    const auto qsvm = learners::train_kernel_svm_dual(learners::repair_psd(K), data.train.y, 1e-3);
    const double q_risk = learners::empirical_risk(qsvm.decision_from_gram(qsim::cross_gram(circuit, data.test.X, data.train.X)),
                                                   data.test.y, learners::Loss::ZeroOne);
    std::printf("test zero-one risk: random-feature SVM (D = %zu) %.3f, kernel SVM %.3f\n", D, rff_risk, q_risk);
    return 0;
}
