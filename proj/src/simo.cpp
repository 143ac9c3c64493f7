#include "blindchan/simo.hpp"

#include <string>

#include <Eigen/Eigenvalues>

namespace blindchan {

namespace {

void check_dims(const SimoInstance& inst) {
    if (inst.outputs < 1 || inst.order < 0 || inst.window < 1) {
        throw DomainError("SimoInstance: need P >= 1, L >= 0, q >= 1");
    }
    if (inst.stacked_dim() <= inst.input_dim()) {
        throw DomainError("simo: qP = " + std::to_string(inst.stacked_dim()) +
                          " must exceed q + L = " + std::to_string(inst.input_dim()) +
                          " for a noise subspace to exist");
    }
}

}  // namespace

CMatrix filtering_matrix(const SimoInstance& inst) {
    require_size(inst.taps.rows(), inst.outputs, "filtering_matrix rows");
    require_size(inst.taps.cols(), inst.order + 1, "filtering_matrix cols");
    CMatrix F = CMatrix::Zero(inst.stacked_dim(), inst.input_dim());
    for (int i = 0; i < inst.window; ++i) {
        for (int l = 0; l <= inst.order; ++l) {
            F.block(i * inst.outputs, i + l, inst.outputs, 1) = inst.taps.col(l);
        }
    }
    return F;
}

CMatrix simo_subspace_estimate(const SimoInstance& inst, const CMatrix& stats) {
    check_dims(inst);
    const int P = inst.outputs;
    const int L = inst.order;
    const int q = inst.window;
    require_size(stats.rows(), inst.stacked_dim(), "simo stats");
    require_size(stats.cols(), inst.stacked_dim(), "simo stats");

    Eigen::SelfAdjointEigenSolver<CMatrix> es(stats);
    if (es.info() != Eigen::Success) throw NumericError("simo: eigensolver failed");
    const int noise_dim = inst.stacked_dim() - inst.input_dim();
    const CMatrix noise = es.eigenvectors().leftCols(noise_dim);

    // Unknowns ordered theta[l*P + p] = h_l[p]. For each noise vector g the
    // image img satisfies g^H F(h) = theta^T img.
    const int n = P * (L + 1);
    CMatrix Q = CMatrix::Zero(n, n);
    for (int j = 0; j < noise_dim; ++j) {
        CMatrix img = CMatrix::Zero(n, inst.input_dim());
        for (int i = 0; i < q; ++i) {
            for (int l = 0; l <= L; ++l) {
                for (int p = 0; p < P; ++p) img(l * P + p, i + l) += std::conj(noise(i * P + p, j));
            }
        }
        Q.noalias() += img.conjugate() * img.transpose();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> form(0.5 * (Q + Q.adjoint()));
    if (form.info() != Eigen::Success) throw NumericError("simo: form eigensolver failed");
    const CVector theta = form.eigenvectors().col(0);
    return Eigen::Map<const CMatrix>(theta.data(), P, L + 1);
}

}  // namespace blindchan
