#pragma once

#include "ttkry/tt_round.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// Options of the alternating two-core truncation sweep.
struct DmrgOptions {
    double eps = 1e-6;           // target relative accuracy
    Index max_sweeps = 8;        // one sweep = left-to-right then right-to-left
    Index rank_boost = 3;        // extra singular vectors kept per split
    LocalPolicy local_eps_policy = LocalPolicy::split_d;  // eps/d by default
    bool final_cleanup = true;   // last sweep with standard truncation, no boost
    bool track_objective = false;
};

struct DmrgResult {
    TTTensor result;
    bool converged = false;   // supercore updates stagnated below eps/10
    Index sweeps = 0;         // main sweeps performed (cleanup not counted)
    double last_change = 0.0; // max relative supercore change in the last sweep
    // (J before update, J after projection) per supercore update, when tracked.
    std::vector<std::pair<double, double>> objective;
};

struct SupercorePair {
    Core3 left;   // orthonormal columns in the left unfolding
    Core3 right;  // carries the singular values
    Index rank = 0;
    double discarded = 0.0;  // Frobenius norm of the dropped tail
};

/// SVD split of a two-mode block. `w` is the (r_left*n1) x (n2*r_right)
/// matricization of the order-4 supercore. The smallest rank whose tail is
/// within eps_loc * ||w|| is kept, plus up to rank_boost extra singular
/// vectors, capped at rmax.
SupercorePair supercore_split(const Matrix& w, Index r_left, Index n1, Index n2,
                              Index r_right, double eps_loc, Index rank_boost, Index rmax);

/// Alternating two-core approximation of the target y starting from x0,
/// minimizing ||x - y||^2 by least-squares supercore projections. Stops after
/// max_sweeps or when the supercore updates stagnate below eps/10; with
/// final_cleanup a last sweep reruns the splits without the rank boost.
DmrgResult dmrg_truncate(const TTTensor& y, const TTTensor& x0, const DmrgOptions& opts);

/// Same with the target given lazily as the operator product a*x; the target
/// cores are the mode-wise contractions of a and x and the full tensor is
/// never formed.
DmrgResult dmrg_truncate(const TTMatrix& a, const TTTensor& x, const TTTensor& x0,
                         const DmrgOptions& opts);

}  // namespace ttkry
