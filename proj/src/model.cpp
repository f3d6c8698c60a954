#include "platoon/model.hpp"

#include "platoon/errors.hpp"
#include "platoon/pade.hpp"

namespace platoon {

void PlatoonConfig::validate() const {
    if (n < 1) throw InvalidParameter("platoon needs at least one follower");
    if (headway < 0.0) throw InvalidParameter("headway must be >= 0");
    if (static_cast<int>(vehicles.size()) != n) throw InvalidParameter("vehicle list size must equal n");
    auto check = [](const VehicleParams& p, int k) {
        if (!(p.mass > 0.0)) throw InvalidParameter("vehicle " + std::to_string(k) + ": mass must be > 0");
        if (!(p.tau > 0.0)) throw InvalidParameter("vehicle " + std::to_string(k) + ": tau must be > 0");
        if (!(p.sigma > 0.0)) throw InvalidParameter("vehicle " + std::to_string(k) + ": sigma must be > 0");
    };
    check(leader, 0);
    for (int k = 1; k <= n; ++k) check(vehicles[static_cast<size_t>(k - 1)], k);
}

const VehicleParams& PlatoonConfig::vehicle(int k) const {
    if (k == 0) return leader;
    if (k < 1 || k > n) throw InvalidParameter("vehicle index out of range");
    return vehicles[static_cast<size_t>(k - 1)];
}

RationalFn headway_filter(double h) {
    if (h < 0.0) throw InvalidParameter("headway must be >= 0");
    return RationalFn(Polynomial({1.0, h}), Polynomial::constant(1.0));
}

RationalFn base_plant() { return RationalFn(Polynomial::constant(1.0), Polynomial({0.0, 0.0, 1.0})); }

RationalFn base_plant_with_delay(double delay, int pade_order) {
    return base_plant() * pade_approx(delay, pade_order);
}

RationalFn build_phi(const VehicleParams& p) {
    if (!(p.mass > 0.0) || !(p.tau > 0.0) || !(p.sigma > 0.0))
        throw InvalidParameter("vehicle parameters must be positive");
    return RationalFn(Polynomial({p.sigma, 1.0}), Polynomial({p.mass, p.mass * p.tau}));
}

RationalFn build_vehicle_tf(const VehicleParams& p, const RationalFn& g_core) {
    return build_phi(p) * g_core;
}

TfMatrix build_T(int n, double h) {
    TfMatrix t(n, n);
    const RationalFn H = headway_filter(h);
    for (int i = 0; i < n; ++i) {
        t.set(i, i, H);
        if (i > 0) t.set(i, i - 1, RationalFn(-1.0));
    }
    return t;
}

TfMatrix build_T_inv(int n, double h) {
    TfMatrix t(n, n);
    const RationalFn Hinv = headway_filter(h).inverse();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) t.set(i, j, Hinv.pow(i - j + 1));
    return t;
}

bool check_HinvT_unimodular(int n, double h) {
    if (h <= 0.0) throw RequiresPositiveHeadway("H^{-1} T is unimodular only for h > 0");
    const RationalFn Hinv = headway_filter(h).inverse();
    // Diagonal 1, subdiagonal -H^{-1}: all entries proper and stable, and the
    // inverse is T^{-1} H with entries H^{-(i-j)}, also proper and stable.
    if (!Hinv.is_proper() || !Hinv.is_stable()) return false;
    for (int k = 1; k <= n; ++k) {
        const RationalFn inv_entry = Hinv.pow(k);
        if (!inv_entry.is_proper() || !inv_entry.is_stable()) return false;
    }
    return true;
}

TfMatrix build_plant(const PlatoonConfig& cfg, const RationalFn& g_core) {
    cfg.validate();
    const RationalFn H = headway_filter(cfg.headway);
    TfMatrix g(cfg.n, cfg.n);
    for (int k = 1; k <= cfg.n; ++k) {
        const int i = k - 1;
        g.set(i, i, H * build_vehicle_tf(cfg.vehicle(k), g_core));
        if (k >= 2) g.set(i, i - 1, -build_vehicle_tf(cfg.vehicle(k - 1), g_core));
    }
    return g;
}

TfMatrix structured_matrix(StructuredKind kind, const std::vector<RationalFn>& entries) {
    const int n = static_cast<int>(entries.size());
    if (n == 0) throw InvalidParameter("structured_matrix needs at least one entry");
    if (kind == StructuredKind::diagonal) return TfMatrix::diagonal(entries);
    TfMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const size_t src = kind == StructuredKind::toeplitz_lower ? static_cast<size_t>(i - j)
                                                                      : static_cast<size_t>(i);
            if (!entries[src].is_zero()) m.set(i, j, entries[src]);
        }
    return m;
}

} // namespace platoon
