#include "platoon/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

namespace {
// Leading sum coefficients within this factor of the operand rounding floor
// are cancellation debris, not structure.
constexpr double kSumDebris = 32.0 * std::numeric_limits<double>::epsilon();
}

Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial{c}; }

Polynomial Polynomial::variable() { return Polynomial{0.0, 1.0}; }

Polynomial Polynomial::from_roots(const std::vector<std::complex<double>>& roots, double lead) {
    Polynomial p = Polynomial::constant(lead);
    std::vector<std::complex<double>> pending = roots;
    while (!pending.empty()) {
        std::complex<double> r = pending.back();
        pending.pop_back();
        double scale = 1.0 + std::abs(r);
        if (std::abs(r.imag()) <= 1e-9 * scale) {
            p *= Polynomial{-r.real(), 1.0};
            continue;
        }
        // Complex root: find its conjugate partner and emit a real quadratic.
        auto best = pending.end();
        double best_dist = 1e-6 * scale;
        for (auto it = pending.begin(); it != pending.end(); ++it) {
            double d = std::abs(*it - std::conj(r));
            if (d < best_dist) {
                best_dist = d;
                best = it;
            }
        }
        if (best == pending.end())
            throw DegenerateCancellation("complex root without conjugate partner in from_roots");
        pending.erase(best);
        p *= Polynomial{std::norm(r), -2.0 * r.real(), 1.0};
    }
    return p;
}

void Polynomial::trim() {
    // Only exact zeros: a coefficient tiny next to the largest one can still
    // carry the whole function (pole placement mixes scales past 1e14).
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    if (static_cast<int>(c_.size()) - 1 > kDegreeCap)
        throw DegreeCapExceeded("degree " + std::to_string(c_.size() - 1));
}

void Polynomial::trim_sum_debris(const std::vector<double>& a, const std::vector<double>& b) {
    while (!c_.empty()) {
        const size_t k = c_.size() - 1;
        const double floor = (k < a.size() ? std::abs(a[k]) : 0.0) +
                             (k < b.size() ? std::abs(b[k]) : 0.0);
        if (std::abs(c_.back()) > kSumDebris * floor) break;
        c_.pop_back();
    }
    if (static_cast<int>(c_.size()) - 1 > kDegreeCap)
        throw DegreeCapExceeded("degree " + std::to_string(c_.size() - 1));
}

double Polynomial::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return 0.0;
    return c_[static_cast<size_t>(i)];
}

double Polynomial::leading() const { return c_.empty() ? 0.0 : c_.back(); }

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc(0.0, 0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<double> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
}

std::vector<std::complex<double>> Polynomial::roots() const {
    int n = degree();
    if (n <= 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    double lead = c_.back();
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[static_cast<size_t>(i)] / lead;
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return out;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    const std::vector<double> pre = c_;
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim_sum_debris(pre, o.c_);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    const std::vector<double> pre = c_;
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim_sum_debris(pre, o.c_);
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    c_ = std::move(r);
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double k) {
    for (double& v : c_) v *= k;
    trim();
    return *this;
}

Polynomial Polynomial::pow(int k) const {
    if (k < 0) throw InvalidParameter("negative polynomial power");
    Polynomial acc = Polynomial::constant(1.0);
    for (int i = 0; i < k; ++i) acc *= *this;
    return acc;
}

std::string Polynomial::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        double v = coeff(i);
        if (v == 0.0) continue;
        if (!first) os << (v < 0 ? " - " : " + ");
        else if (v < 0) os << "-";
        double a = std::abs(v);
        if (i == 0 || a != 1.0) os << a;
        if (i >= 1) {
            if (a != 1.0) os << "*";
            os << var;
            if (i >= 2) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

bool near_equal(const Polynomial& a, const Polynomial& b, double tol) {
    double scale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), 1e-300});
    int n = std::max(a.degree(), b.degree());
    for (int i = 0; i <= n; ++i)
        if (std::abs(a.coeff(i) - b.coeff(i)) > tol * scale) return false;
    return true;
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw DivisionByZeroFn("polynomial division by zero");
    if (num.degree() < den.degree()) return {Polynomial(), num};
    std::vector<double> r(num.coeffs());
    int dn = den.degree();
    double lead = den.leading();
    std::vector<double> q(static_cast<size_t>(num.degree() - dn + 1), 0.0);
    for (int k = num.degree() - dn; k >= 0; --k) {
        double f = r[static_cast<size_t>(k + dn)] / lead;
        q[static_cast<size_t>(k)] = f;
        for (int i = 0; i < dn; ++i) r[static_cast<size_t>(k + i)] -= f * den.coeff(i);
        r[static_cast<size_t>(k + dn)] = 0.0; // eliminated by construction
    }
    r.resize(static_cast<size_t>(dn) > r.size() ? r.size() : static_cast<size_t>(dn));
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

} // namespace platoon
