#pragma once

#include "blindchan/common.hpp"

namespace blindchan {

/// Single-input, P-output FIR system of order L observed over a window of q
/// output vectors. Column l of `taps` is the P-vector h_l.
struct SimoInstance {
    int outputs = 2;  // P
    int order = 1;    // L
    int window = 1;   // q
    CMatrix taps;     // P x (L+1)

    int stacked_dim() const { return window * outputs; }
    int input_dim() const { return window + order; }
};

/// Block-Toeplitz filtering matrix F_q(h), qP x (q+L): block row i holds
/// h_0 ... h_L in columns i ... i+L.
CMatrix filtering_matrix(const SimoInstance& inst);

/// Deterministic subspace identification from (exact) output statistics.
/// Takes the qP - (q+L) smallest eigenvectors as the noise subspace and returns
/// the unit-norm P x (L+1) tap matrix minimising sum_i ||g_i^H F_q(h)||^2.
/// Throws DomainError unless qP > q + L.
CMatrix simo_subspace_estimate(const SimoInstance& inst, const CMatrix& stats);

}  // namespace blindchan
