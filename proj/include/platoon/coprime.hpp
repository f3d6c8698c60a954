#ifndef PLATOON_COPRIME_HPP
#define PLATOON_COPRIME_HPP

#include <vector>

#include "platoon/model.hpp"
#include "platoon/rational.hpp"
#include "platoon/tf_matrix.hpp"

namespace platoon {

// Scalar doubly coprime factorization of a strictly proper g: g = N/M with
// Y M + X N = 1, all four factors stable and proper, N strictly proper.
struct ScalarDcf {
    RationalFn M, N, X, Y;
    double alpha = 1.0; // all factorization poles sit at -alpha
};

// Structured platoon factorization. Left factors satisfy G = m_left^{-1}
// n_left, right factors G = n_right m_right^{-1}, and the 2n x 2n Bezout
// identity
//   [ y_left  x_left ] [ m_right  -x_right ]
//   [ -n_left m_left ] [ n_right   y_right ] = I
// holds exactly. Shapes: n_left, y_left bidiagonal-times-diagonal; m_left,
// x_left, y_right, n_right diagonal; x_right, m_right lower triangular.
struct PlatoonDcf {
    int n = 0;
    double headway = 0.0;
    double alpha = 1.0;
    double absorbed_delay_s = 0.0; // delay folded into g_core, if any
    int pade_order = 0;

    ScalarDcf core;               // factorization of g_core
    RationalFn g_core;            // common double-integrator core (with Pade)
    std::vector<RationalFn> phi;  // size n+1, index 0 = leader

    TfMatrix y_left, x_left, n_left, m_left;
    TfMatrix m_right, n_right, x_right, y_right;
};

// Pole-placement Diophantine construction: solves Y_p den + X_p num =
// (s+alpha)^(2p-1) and divides through by (s+alpha) powers.
ScalarDcf scalar_dcf(const RationalFn& g_wp, double alpha = 1.0);

// Assembles the eight structured factors from the scalar ones and verifies
// the Bezout identity to 1e-8 on the standard grid.
PlatoonDcf platoon_dcf(const PlatoonConfig& cfg, const ScalarDcf& scalar,
                       double absorbed_delay_s = 0.0, int pade_order = 0);

// Max entrywise deviation of the 2n x 2n Bezout product from identity over a
// log frequency grid [1e-3, 1e3].
double verify_bezout(const ScalarDcf& dcf, int grid_points = 50);
double verify_bezout(const PlatoonDcf& dcf, int grid_points = 50);

// Youla shift: x_left += q n... (left factors gain Q on the left, right
// factors gain Q on the right); the Bezout identity is preserved exactly.
PlatoonDcf shift_dcf(const PlatoonDcf& dcf, const TfMatrix& q);

} // namespace platoon

#endif
