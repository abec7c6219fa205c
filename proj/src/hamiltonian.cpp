// SPDX-License-Identifier: Apache-2.0

#include "hjhom/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hjhom {

namespace {
constexpr double kPinTol = 1e-12;
constexpr double kConvexitySlack = 1e-8;
}  // namespace

double ClassParams::alpha(double r) const { return alpha0 * std::pow(r, gamma) - 1.0 / alpha0; }
double ClassParams::beta(double r) const { return beta0 * (std::pow(r, gamma) + 1.0); }

void ClassParams::validate() const {
    if (!(gamma > 1.0)) throw SpecError("class: gamma must exceed 1");
    if (!(alpha0 > 0.0)) throw SpecError("class: alpha0 must be positive");
    if (!(beta0 > 0.0)) throw SpecError("class: beta0 must be positive");
}

double Piece::eval(double x, double p, double b) const {
    double v = p2 * p * p + (p1 + pb * b) * p + c0 + cb * b;
    if (vamp != 0.0) v += vamp * std::cos(2.0 * std::numbers::pi * vfreq * x);
    return v;
}

double Piece::min_on(double x, double lo, double hi, double b) const {
    double p = lo;
    if (p2 > 0.0) p = std::clamp(-(p1 + pb * b) / (2.0 * p2), lo, hi);
    else if (dp(lo, b) < 0.0) p = hi;  // affine: downhill endpoint
    const double v_lo = eval(x, lo, b), v_hi = eval(x, hi, b);
    return std::min({eval(x, p, b), v_lo, v_hi});
}

nlohmann::json ClassParams::to_json() const {
    return {{"gamma", gamma}, {"alpha0", alpha0}, {"beta0", beta0}};
}

ClassParams ClassParams::from_json(const nlohmann::json& j) {
    ClassParams c;
    c.gamma = j.value("gamma", 2.0);
    c.alpha0 = j.value("alpha0", 0.4);
    c.beta0 = j.value("beta0", 1.0);
    return c;
}

nlohmann::json Piece::to_json() const {
    nlohmann::json coeffs{{"p2", p2}, {"p1", p1}, {"pb", pb},   {"c0", c0},
                          {"cb", cb}, {"vamp", vamp}, {"vfreq", vfreq}};
    nlohmann::json j{{"form", "quadratic"}, {"coeffs", coeffs}};
    j["medium_ref"] = (pb != 0.0 || cb != 0.0) ? nlohmann::json("b") : nlohmann::json(nullptr);
    return j;
}

Piece Piece::from_json(const nlohmann::json& j) {
    Piece p;
    const auto& c = j.at("coeffs");
    p.p2 = c.value("p2", 0.5);
    p.p1 = c.value("p1", 0.0);
    p.pb = c.value("pb", 0.0);
    p.c0 = c.value("c0", 0.0);
    p.cb = c.value("cb", 0.0);
    p.vamp = c.value("vamp", 0.0);
    p.vfreq = c.value("vfreq", 1.0);
    return p;
}

std::size_t HamiltonianSpec::piece_index(double p) const {
    std::size_t i = 0;
    while (i < pins.size() && p > pins[i]) ++i;
    return i;
}

double HamiltonianSpec::eval(double x, double p) const {
    const double b = b_at(x);
    return pieces[piece_index(p)].eval(x, p, b);
}

double HamiltonianSpec::eval_min(double x, double p) const {
    const double b = b_at(x);
    double v = pieces.front().eval(x, p, b);
    for (std::size_t i = 1; i < pieces.size(); ++i) v = std::min(v, pieces[i].eval(x, p, b));
    return v;
}

double HamiltonianSpec::speed_bound(double r) const {
    const double bmax = medium ? medium->spec().max_abs_bound() : 0.0;
    double s = 0.0;
    for (const auto& pc : pieces)
        s = std::max(s, 2.0 * std::abs(pc.p2) * r + std::abs(pc.p1) + std::abs(pc.pb) * bmax);
    return s;
}

bool HamiltonianSpec::x_independent() const {
    bool uses_b = false;
    for (const auto& pc : pieces) {
        if (pc.vamp != 0.0) return false;
        if (pc.pb != 0.0 || pc.cb != 0.0) uses_b = true;
    }
    if (!uses_b || !medium) return true;
    return medium->spec().kind == FieldKind::Constant;
}

nlohmann::json HamiltonianSpec::to_json() const {
    nlohmann::json jp = nlohmann::json::array();
    for (const auto& pc : pieces) jp.push_back(pc.to_json());
    return {{"pieces", jp},
            {"pins", pins},
            {"pinned_values", pinned_values},
            {"class", {{"gamma", cls.gamma}, {"alpha0", cls.alpha0}, {"beta0", cls.beta0}}},
            {"viscous_allowed", viscous_allowed},
            {"level_set_convex_only", level_set_convex_only}};
}

HamiltonianSpec HamiltonianSpec::from_json(const nlohmann::json& j,
                                           std::shared_ptr<const MediumSample> medium) {
    std::vector<Piece> pieces;
    for (const auto& pj : j.at("pieces")) pieces.push_back(Piece::from_json(pj));
    ClassParams cls;
    if (j.contains("class")) {
        cls.gamma = j["class"].value("gamma", 2.0);
        cls.alpha0 = j["class"].value("alpha0", 0.4);
        cls.beta0 = j["class"].value("beta0", 1.0);
    }
    auto spec = build_pinned(std::move(pieces), j.value("pins", std::vector<double>{}), cls,
                             std::move(medium));
    spec.viscous_allowed = j.value("viscous_allowed", true);
    spec.level_set_convex_only = j.value("level_set_convex_only", false);
    return spec;
}

namespace {

// Probe abscissae for x/omega independence checks.
std::vector<double> probe_xs(const HamiltonianSpec& h) {
    if (h.x_independent()) return {0.0};
    std::vector<double> xs;
    for (int i = -20; i <= 20; ++i) xs.push_back(0.2371 * static_cast<double>(i));
    return xs;
}

}  // namespace

HamiltonianSpec build_pinned(std::vector<Piece> pieces, std::vector<double> pins, ClassParams cls,
                             std::shared_ptr<const MediumSample> medium) {
    cls.validate();
    if (pieces.empty()) throw SpecError("hamiltonian: needs at least one piece");
    if (pieces.size() != pins.size() + 1)
        throw SpecError("hamiltonian: needs exactly one more piece than pins");
    for (std::size_t i = 1; i < pins.size(); ++i)
        if (!(pins[i - 1] < pins[i])) throw SpecError("hamiltonian: pins must be strictly increasing");
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (pieces[i].p2 < -kConvexitySlack)
            throw SpecError("hamiltonian: piece " + std::to_string(i) + " is not convex (p2 = " +
                            std::to_string(pieces[i].p2) + ")");

    HamiltonianSpec h;
    h.pieces = std::move(pieces);
    h.pins = std::move(pins);
    h.cls = cls;
    h.medium = std::move(medium);
    h.x_dependence = h.x_independent()
                         ? XDependence::None
                         : (h.medium && h.medium->spec().kind == FieldKind::RandomPhase
                                ? XDependence::StationaryRandom
                                : XDependence::Periodic);

    const auto xs = probe_xs(h);

    // Pin agreement and x-independence of the pinned values.
    h.pinned_values.resize(h.pins.size());
    for (std::size_t i = 0; i < h.pins.size(); ++i) {
        const double pin = h.pins[i];
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : xs) {
            const double b = h.b_at(x);
            const double va = h.pieces[i].eval(x, pin, b);
            const double vb = h.pieces[i + 1].eval(x, pin, b);
            if (std::abs(va - vb) > kPinTol)
                throw SpecError("hamiltonian: pieces disagree at pin " + std::to_string(pin) +
                                " by " + std::to_string(va - vb));
            lo = std::min(lo, va);
            hi = std::max(hi, va);
        }
        if (hi - lo > kPinTol)
            throw SpecError("hamiltonian: pinned value at pin " + std::to_string(pin) +
                            " varies with x by " + std::to_string(hi - lo));
        h.pinned_values[i] = 0.5 * (lo + hi);
    }

    // Interval selection must coincide with the min over pieces.
    const double pad = 2.0;
    const double plo = (h.pins.empty() ? 0.0 : h.pins.front()) - pad;
    const double phi = (h.pins.empty() ? 0.0 : h.pins.back()) + pad;
    for (double x : xs)
        for (int k = 0; k <= 200; ++k) {
            const double p = plo + (phi - plo) * static_cast<double>(k) / 200.0;
            if (h.eval(x, p) - h.eval_min(x, p) > 1e-10)
                throw SpecError("hamiltonian: min decomposition does not select piece intervals at p = " +
                                std::to_string(p));
        }
    return h;
}

SplitPair split_at_pin(const HamiltonianSpec& h, std::size_t pin_index) {
    if (pin_index >= h.pins.size()) throw SpecError("split_at_pin: hamiltonian is not pinned there");
    SplitPair sp;
    sp.pin = h.pins[pin_index];
    sp.pinned_value = h.pinned_values[pin_index];

    std::vector<Piece> lo(h.pieces.begin(), h.pieces.begin() + static_cast<long>(pin_index) + 1);
    std::vector<double> lo_pins(h.pins.begin(), h.pins.begin() + static_cast<long>(pin_index));
    std::vector<Piece> hi(h.pieces.begin() + static_cast<long>(pin_index) + 1, h.pieces.end());
    std::vector<double> hi_pins(h.pins.begin() + static_cast<long>(pin_index) + 1, h.pins.end());

    sp.minus = build_pinned(std::move(lo), std::move(lo_pins), h.cls, h.medium);
    sp.plus = build_pinned(std::move(hi), std::move(hi_pins), h.cls, h.medium);
    sp.minus.viscous_allowed = sp.plus.viscous_allowed = h.viscous_allowed;
    sp.minus.level_set_convex_only = sp.plus.level_set_convex_only = h.level_set_convex_only;
    return sp;
}

HamiltonianSpec shift_pin(const HamiltonianSpec& h, double p0) {
    std::vector<Piece> pieces = h.pieces;
    for (auto& pc : pieces) {
        const Piece o = pc;
        pc.p1 = o.p1 + 2.0 * o.p2 * p0;
        pc.c0 = o.c0 + o.p1 * p0 + o.p2 * p0 * p0;
        pc.cb = o.cb + o.pb * p0;
    }
    std::vector<double> pins = h.pins;
    for (auto& p : pins) p -= p0;
    auto out = build_pinned(std::move(pieces), std::move(pins), h.cls, h.medium);
    out.viscous_allowed = h.viscous_allowed;
    out.level_set_convex_only = h.level_set_convex_only;
    return out;
}

VerificationReport validate_class(const HamiltonianSpec& h, std::span<const double> xs,
                                  std::span<const double> ps) {
    VerificationReport rep;
    rep.check_name = "class-membership";
    rep.tolerance = 1e-9;
    rep.config_hash = fnv1a_hex(h.to_json().dump());

    const auto& c = h.cls;
    double m_lower = std::numeric_limits<double>::infinity();
    double m_upper = m_lower, m_xlip = m_lower, m_plip = m_lower;

    for (double p : ps) {
        const double ap = std::abs(p);
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const double v = h.eval(xs[ix], p);
            m_lower = std::min(m_lower, v - (c.alpha0 * std::pow(ap, c.gamma) - 1.0 / c.alpha0));
            m_upper = std::min(m_upper, c.beta0 * (std::pow(ap, c.gamma) + 1.0) - v);
            if (ix > 0) {
                const double dx = std::abs(xs[ix] - xs[ix - 1]);
                if (dx > 0.0)
                    m_xlip = std::min(m_xlip, c.beta0 * (std::pow(ap, c.gamma) + 1.0) * dx -
                                                  std::abs(v - h.eval(xs[ix - 1], p)));
            }
        }
    }
    for (std::size_t ip = 1; ip < ps.size(); ++ip) {
        const double p = ps[ip], q = ps[ip - 1];
        if (p == q) continue;
        for (double x : xs) {
            const double bound =
                c.beta0 * std::pow(std::abs(p) + std::abs(q) + 1.0, c.gamma - 1.0) * std::abs(p - q);
            m_plip = std::min(m_plip, bound - std::abs(h.eval(x, p) - h.eval(x, q)));
        }
    }

    rep.witnesses.emplace_back("margin_growth_lower", m_lower);
    rep.witnesses.emplace_back("margin_growth_upper", m_upper);
    rep.witnesses.emplace_back("margin_x_lipschitz", m_xlip);
    rep.witnesses.emplace_back("margin_p_lipschitz", m_plip);
    rep.worst_violation = std::max(0.0, -std::min({m_lower, m_upper, m_xlip, m_plip}));
    rep.finalize();
    return rep;
}

}  // namespace hjhom
