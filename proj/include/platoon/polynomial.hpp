#ifndef PLATOON_POLYNOMIAL_HPP
#define PLATOON_POLYNOMIAL_HPP

#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace platoon {

// Hard cap on polynomial degree; cascaded headway powers grow degree linearly
// in platoon size, and anything past this bound signals runaway algebra.
inline constexpr int kDegreeCap = 60;

// Poles with real part >= -kStabilityMargin classify as unstable.
inline constexpr double kStabilityMargin = 1e-9;

// Relative tolerance for common-factor cancellation and coefficient matching.
inline constexpr double kCancelTol = 1e-8;

// Real polynomial in one variable, coefficients stored ascending by degree.
// Exact trailing zeros are trimmed so degree() is well defined. Sums also
// drop leading coefficients indistinguishable from the rounding of their own
// operands: cancellation debris is measured against the terms that cancelled,
// never against the largest coefficient, so wide coefficient spreads survive.
class Polynomial {
  public:
    Polynomial() = default; // the zero polynomial
    Polynomial(std::initializer_list<double> ascending);
    explicit Polynomial(std::vector<double> ascending);

    static Polynomial constant(double c);
    static Polynomial variable(); // s
    // Real polynomial with the given roots (conjugate pairs required) and
    // leading coefficient `lead`.
    static Polynomial from_roots(const std::vector<std::complex<double>>& roots,
                                 double lead = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 when zero
    bool is_zero() const { return c_.empty(); }
    double coeff(int i) const;
    const std::vector<double>& coeffs() const { return c_; }
    double leading() const;
    double max_abs_coeff() const;

    std::complex<double> operator()(std::complex<double> s) const;
    double operator()(double s) const;

    Polynomial derivative() const;
    std::vector<std::complex<double>> roots() const; // companion-matrix eigenvalues

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    Polynomial& operator*=(double k);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, double k) { return a *= k; }
    friend Polynomial operator*(double k, Polynomial a) { return a *= k; }

    Polynomial pow(int k) const;

    std::string str(const std::string& var = "s") const;

  private:
    std::vector<double> c_;
    void trim();
    void trim_sum_debris(const std::vector<double>& a, const std::vector<double>& b);
};

// True when the coefficient arrays agree to `tol` relative to the larger
// coefficient magnitude of the pair.
bool near_equal(const Polynomial& a, const Polynomial& b, double tol = kCancelTol);

// Quotient and remainder of polynomial long division: num = q*den + r,
// deg(r) < deg(den). Throws DivisionByZeroFn when den is zero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den);

} // namespace platoon

#endif
