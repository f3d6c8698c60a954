#include "platoon/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

constexpr double kMergeTol = 1e-12; // identity merge within a factor list

int total_degree(const std::vector<Factor>& fs) {
    int d = 0;
    for (const auto& f : fs) d += f.exp * f.p.degree();
    return d;
}

Polynomial expand(const std::vector<Factor>& fs) {
    Polynomial p = Polynomial::constant(1.0);
    for (const auto& f : fs) p *= f.p.pow(f.exp);
    return p;
}

// Attempts to remove the content of `lo` from `hi` once: hi == q * lo exactly
// up to kCancelTol relative. On success stores the quotient in `q_out`.
bool divides(const Polynomial& hi, const Polynomial& lo, Polynomial& q_out) {
    if (lo.degree() < 1 || hi.degree() < lo.degree()) return false;
    auto [q, r] = divmod(hi, lo);
    if (r.max_abs_coeff() <= kCancelTol * std::max(1.0, hi.max_abs_coeff())) {
        q_out = q;
        return true;
    }
    return false;
}

void sort_factors(std::vector<Factor>& fs) {
    std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) {
        if (a.p.degree() != b.p.degree()) return a.p.degree() < b.p.degree();
        for (int i = a.p.degree(); i >= 0; --i)
            if (a.p.coeff(i) != b.p.coeff(i)) return a.p.coeff(i) < b.p.coeff(i);
        return false;
    });
}

} // namespace

RationalFn::RationalFn(double k) : gain_(k) {}

RationalFn::RationalFn(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw DivisionByZeroFn("rational with zero denominator");
    if (num.is_zero()) return;
    gain_ = 1.0;
    num_.push_back({num, 1});
    den_.push_back({den, 1});
    normalize();
}

RationalFn::RationalFn(double gain, std::vector<Factor> num, std::vector<Factor> den)
    : gain_(gain), num_(std::move(num)), den_(std::move(den)) {
    normalize();
}

RationalFn RationalFn::s() { return RationalFn(Polynomial::variable(), Polynomial::constant(1.0)); }

void RationalFn::normalize() {
    if (gain_ == 0.0) {
        num_.clear();
        den_.clear();
        return;
    }
    // Fold constants, make atoms monic, drop zero exponents.
    auto clean = [this](std::vector<Factor>& fs, bool denominator) {
        std::vector<Factor> out;
        for (auto& f : fs) {
            if (f.exp == 0) continue;
            if (f.exp < 0) throw InvalidParameter("negative factor exponent");
            if (f.p.is_zero()) {
                if (denominator) throw DivisionByZeroFn("zero denominator atom");
                gain_ = 0.0;
                continue;
            }
            if (f.p.degree() == 0) {
                double c = std::pow(f.p.coeff(0), f.exp);
                if (denominator) gain_ /= c;
                else gain_ *= c;
                continue;
            }
            double lead = f.p.leading();
            Polynomial monic = f.p * (1.0 / lead);
            double scale = std::pow(lead, f.exp);
            if (denominator) gain_ /= scale;
            else gain_ *= scale;
            // Merge with an existing identical atom.
            bool merged = false;
            for (auto& g : out) {
                if (g.p.degree() == monic.degree() && near_equal(g.p, monic, kMergeTol)) {
                    g.exp += f.exp;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.push_back({monic, f.exp});
        }
        fs = std::move(out);
    };
    clean(num_, false);
    clean(den_, true);
    if (gain_ == 0.0) {
        num_.clear();
        den_.clear();
        return;
    }

    // Cross-cancellation between numerator and denominator atoms.
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < num_.size() && !progress; ++i) {
            for (size_t j = 0; j < den_.size() && !progress; ++j) {
                Polynomial& u = num_[i].p;
                Polynomial& v = den_[j].p;
                if (u.degree() == v.degree() && near_equal(u, v, kCancelTol)) {
                    int k = std::min(num_[i].exp, den_[j].exp);
                    num_[i].exp -= k;
                    den_[j].exp -= k;
                    progress = true;
                } else if (u.degree() > v.degree()) {
                    Polynomial q;
                    if (divides(u, v, q)) {
                        double lead = q.leading();
                        gain_ *= lead;
                        q *= 1.0 / lead;
                        if (--num_[i].exp == 0 && q.degree() >= 1) {
                            num_[i].p = q; // reuse the slot
                            num_[i].exp = 1;
                        } else if (q.degree() >= 1) {
                            num_.push_back({q, 1});
                        } else if (num_[i].exp == 0) {
                            // quotient is constant 1 after monic fold
                        }
                        --den_[j].exp;
                        progress = true;
                    }
                } else if (v.degree() > u.degree()) {
                    Polynomial q;
                    if (divides(v, u, q)) {
                        double lead = q.leading();
                        gain_ /= lead;
                        q *= 1.0 / lead;
                        if (--den_[j].exp == 0 && q.degree() >= 1) {
                            den_[j].p = q;
                            den_[j].exp = 1;
                        } else if (q.degree() >= 1) {
                            den_.push_back({q, 1});
                        }
                        --num_[i].exp;
                        progress = true;
                    }
                }
            }
        }
        std::erase_if(num_, [](const Factor& f) { return f.exp == 0; });
        std::erase_if(den_, [](const Factor& f) { return f.exp == 0; });
    }

    // Last-resort peel of well-separated simple shared roots between expanded
    // atoms (partial overlap that full-atom division cannot see).
    progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < num_.size() && !progress; ++i) {
            for (size_t j = 0; j < den_.size() && !progress; ++j) {
                const Polynomial& small = num_[i].p.degree() <= den_[j].p.degree() ? num_[i].p : den_[j].p;
                if (small.degree() < 1) continue;
                Polynomial dsmall = small.derivative();
                for (const auto& r : small.roots()) {
                    double scale = 1.0 + std::abs(r);
                    if (std::abs(dsmall(r)) < 1e-3 * small.max_abs_coeff() * std::max(1.0, std::abs(r)))
                        continue; // clustered root: peeling would be ill-conditioned
                    Polynomial fac;
                    if (std::abs(r.imag()) <= 1e-9 * scale) {
                        fac = Polynomial{-r.real(), 1.0};
                    } else if (r.imag() > 0.0) {
                        fac = Polynomial{std::norm(r), -2.0 * r.real(), 1.0};
                    } else {
                        continue; // conjugate handled with its positive-imag partner
                    }
                    Polynomial qu, qv;
                    if (divides(num_[i].p, fac, qu) && divides(den_[j].p, fac, qv)) {
                        auto replace = [&](std::vector<Factor>& fs, size_t idx, Polynomial q, bool denominator) {
                            double lead = q.leading();
                            if (denominator) gain_ /= lead;
                            else gain_ *= lead;
                            q *= 1.0 / lead;
                            if (fs[idx].exp == 1) {
                                if (q.degree() >= 1) fs[idx].p = q;
                                else fs[idx].exp = 0;
                            } else {
                                fs[idx].exp -= 1;
                                if (q.degree() >= 1) fs.push_back({q, 1});
                            }
                        };
                        replace(num_, i, qu, false);
                        replace(den_, j, qv, true);
                        progress = true;
                        break;
                    }
                }
            }
        }
        std::erase_if(num_, [](const Factor& f) { return f.exp == 0; });
        std::erase_if(den_, [](const Factor& f) { return f.exp == 0; });
    }

    if (total_degree(num_) > kDegreeCap || total_degree(den_) > kDegreeCap)
        throw DegreeCapExceeded("rational degrees " + std::to_string(total_degree(num_)) + "/" +
                                std::to_string(total_degree(den_)));
    sort_factors(num_);
    sort_factors(den_);
}

Polynomial RationalFn::num() const {
    if (is_zero()) return Polynomial();
    return expand(num_) * gain_;
}

Polynomial RationalFn::den() const {
    if (is_zero()) return Polynomial::constant(1.0);
    return expand(den_);
}

int RationalFn::num_degree() const { return is_zero() ? -1 : total_degree(num_); }
int RationalFn::den_degree() const { return is_zero() ? 0 : total_degree(den_); }

int RationalFn::relative_degree() const {
    if (is_zero()) return 0;
    return den_degree() - num_degree();
}

bool RationalFn::is_proper() const { return is_zero() || relative_degree() >= 0; }
bool RationalFn::is_strictly_proper() const { return is_zero() || relative_degree() >= 1; }
bool RationalFn::is_biproper() const { return !is_zero() && relative_degree() == 0; }

bool RationalFn::is_stable(double margin) const {
    for (const auto& f : den_)
        for (const auto& r : f.p.roots())
            if (r.real() >= -margin) return false;
    return true;
}

bool RationalFn::is_unimodular(double margin) const {
    if (!is_biproper() || !is_stable(margin)) return false;
    for (const auto& f : num_)
        for (const auto& r : f.p.roots())
            if (r.real() >= -margin) return false;
    return true;
}

std::vector<std::complex<double>> RationalFn::poles() const {
    std::vector<std::complex<double>> out;
    for (const auto& f : den_) {
        auto rs = f.p.roots();
        for (int k = 0; k < f.exp; ++k) out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
}

std::vector<std::complex<double>> RationalFn::zeros() const {
    std::vector<std::complex<double>> out;
    for (const auto& f : num_) {
        auto rs = f.p.roots();
        for (int k = 0; k < f.exp; ++k) out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
}

std::complex<double> RationalFn::operator()(std::complex<double> s) const {
    if (is_zero()) return {0.0, 0.0};
    std::complex<double> v(gain_, 0.0);
    for (const auto& f : num_) {
        std::complex<double> pv = f.p(s);
        for (int k = 0; k < f.exp; ++k) v *= pv;
    }
    for (const auto& f : den_) {
        std::complex<double> pv = f.p(s);
        for (int k = 0; k < f.exp; ++k) v /= pv;
    }
    return v;
}

std::complex<double> RationalFn::at_omega(double w) const { return (*this)(std::complex<double>(0.0, w)); }

double RationalFn::dc() const { return (*this)(std::complex<double>(0.0, 0.0)).real(); }

RationalFn RationalFn::operator-() const {
    RationalFn r = *this;
    r.gain_ = -r.gain_;
    return r;
}

RationalFn RationalFn::inverse() const {
    if (is_zero()) throw DivisionByZeroFn("inverse of the zero function");
    RationalFn r;
    r.gain_ = 1.0 / gain_;
    r.num_ = den_;
    r.den_ = num_;
    r.normalize();
    return r;
}

RationalFn RationalFn::pow(int k) const {
    if (k == 0) return RationalFn::one();
    RationalFn base = k > 0 ? *this : inverse();
    int reps = std::abs(k);
    RationalFn r = base;
    r.gain_ = std::pow(base.gain_, reps);
    for (auto& f : r.num_) f.exp *= reps;
    for (auto& f : r.den_) f.exp *= reps;
    r.normalize();
    return r;
}

RationalFn& RationalFn::operator*=(const RationalFn& o) {
    if (is_zero() || o.is_zero()) return *this = RationalFn();
    gain_ *= o.gain_;
    num_.insert(num_.end(), o.num_.begin(), o.num_.end());
    den_.insert(den_.end(), o.den_.begin(), o.den_.end());
    normalize();
    return *this;
}

RationalFn& RationalFn::operator/=(const RationalFn& o) { return *this *= o.inverse(); }

RationalFn& RationalFn::operator+=(const RationalFn& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    // Shared denominator: per-atom max exponent across both operands.
    std::vector<Factor> shared = den_;
    for (const auto& g : o.den_) {
        bool found = false;
        for (auto& f : shared) {
            if (f.p.degree() == g.p.degree() && near_equal(f.p, g.p, kMergeTol)) {
                f.exp = std::max(f.exp, g.exp);
                found = true;
                break;
            }
        }
        if (!found) shared.push_back(g);
    }
    auto complement = [&shared](const std::vector<Factor>& own) {
        std::vector<Factor> rest;
        for (const auto& f : shared) {
            int have = 0;
            for (const auto& g : own)
                if (g.p.degree() == f.p.degree() && near_equal(g.p, f.p, kMergeTol)) have = g.exp;
            if (f.exp > have) rest.push_back({f.p, f.exp - have});
        }
        return rest;
    };
    Polynomial na = expand(num_) * gain_ * expand(complement(den_));
    Polynomial nb = expand(o.num_) * o.gain_ * expand(complement(o.den_));
    Polynomial total = na + nb;
    if (total.is_zero()) return *this = RationalFn();
    gain_ = 1.0;
    num_.clear();
    num_.push_back({total, 1});
    den_ = std::move(shared);
    normalize();
    return *this;
}

RationalFn& RationalFn::operator-=(const RationalFn& o) { return *this += -o; }

std::string RationalFn::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    os << "(" << num().str() << ") / (" << den().str() << ")";
    return os.str();
}

bool near_equal(const RationalFn& a, const RationalFn& b, double tol) {
    // Probe on and off the imaginary axis; off-axis points catch pole/zero
    // mismatches that grid magnitudes can hide.
    std::vector<std::complex<double>> pts;
    for (int i = 0; i <= 16; ++i) {
        double w = std::pow(10.0, -3.0 + 6.0 * i / 16.0);
        pts.emplace_back(0.0, w);
    }
    pts.emplace_back(0.7, 0.3);
    pts.emplace_back(2.1, -1.3);
    pts.emplace_back(0.13, 4.7);
    pts.emplace_back(5.0, 0.0);
    for (const auto& s : pts) {
        std::complex<double> va = a(s), vb = b(s);
        double scale = std::max({1.0, std::abs(va), std::abs(vb)});
        if (std::abs(va - vb) > tol * scale) return false;
    }
    return true;
}

} // namespace platoon
