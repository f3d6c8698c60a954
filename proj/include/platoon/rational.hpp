#ifndef PLATOON_RATIONAL_HPP
#define PLATOON_RATIONAL_HPP

#include <complex>
#include <string>
#include <vector>

#include "platoon/polynomial.hpp"

namespace platoon {

// One multiplicative factor of a rational function: a monic polynomial atom
// raised to a positive integer power.
struct Factor {
    Polynomial p; // monic, degree >= 1
    int exp = 1;
};

// Real-rational transfer function kept in factored canonical form:
//     f(s) = gain * prod(num[i].p^num[i].exp) / prod(den[j].p^den[j].exp).
//
// Rationale: the platoon factorizations concentrate repeated roots (pole
// placement puts (s+alpha)^p everywhere), and repeated roots of expanded
// coefficient arrays are ill-conditioned. Keeping atoms factored makes the
// structural cancellations exact; residual common factors between expanded
// atoms are removed by division-remainder tests at kCancelTol relative.
// Invariants after construction:
//   - gain == 0 iff the function is identically zero (factor lists empty);
//   - every atom is monic with degree >= 1; atoms within a list are distinct;
//   - expanded numerator and denominator degrees are both <= kDegreeCap;
//   - expanded denominator is monic (gain carries all scaling).
class RationalFn {
  public:
    RationalFn() = default;     // the zero function
    RationalFn(double k);       // constant (implicit on purpose)
    RationalFn(const Polynomial& num, const Polynomial& den);
    RationalFn(double gain, std::vector<Factor> num, std::vector<Factor> den);

    static RationalFn zero() { return RationalFn(); }
    static RationalFn one() { return RationalFn(1.0); }
    static RationalFn s(); // the variable itself

    bool is_zero() const { return gain_ == 0.0; }
    double gain() const { return gain_; }
    const std::vector<Factor>& num_factors() const { return num_; }
    const std::vector<Factor>& den_factors() const { return den_; }

    Polynomial num() const; // expanded numerator with gain folded in
    Polynomial den() const; // expanded monic denominator

    int num_degree() const;      // -1 for the zero function
    int den_degree() const;
    int relative_degree() const; // den_degree - num_degree (0 for the zero fn)

    bool is_proper() const;
    bool is_strictly_proper() const;
    bool is_biproper() const;
    bool is_stable(double margin = kStabilityMargin) const;
    bool is_unimodular(double margin = kStabilityMargin) const;

    std::vector<std::complex<double>> poles() const; // with multiplicity
    std::vector<std::complex<double>> zeros() const;

    std::complex<double> operator()(std::complex<double> s) const; // factored eval
    std::complex<double> at_omega(double w) const;                 // f(j*w)
    double dc() const;                                             // f(0)

    RationalFn operator-() const;
    RationalFn inverse() const;
    RationalFn pow(int k) const; // negative k inverts first

    RationalFn& operator+=(const RationalFn& o);
    RationalFn& operator-=(const RationalFn& o);
    RationalFn& operator*=(const RationalFn& o);
    RationalFn& operator/=(const RationalFn& o);
    friend RationalFn operator+(RationalFn a, const RationalFn& b) { return a += b; }
    friend RationalFn operator-(RationalFn a, const RationalFn& b) { return a -= b; }
    friend RationalFn operator*(RationalFn a, const RationalFn& b) { return a *= b; }
    friend RationalFn operator/(RationalFn a, const RationalFn& b) { return a /= b; }

    std::string str() const;

  private:
    double gain_ = 0.0;
    std::vector<Factor> num_, den_;
    void normalize();
};

// Probe-point equivalence: |a-b| <= tol * max(1, |a|, |b|) at a fixed set of
// complex probe points off the imaginary axis plus a log frequency sweep.
bool near_equal(const RationalFn& a, const RationalFn& b, double tol = 1e-8);

} // namespace platoon

#endif
