#include "cvtele/trajectory.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <cmath>
#include <sstream>

namespace cvtele {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) words.push_back(line.substr(start, i - start));
    }
    return words;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "line " << line_no << ": " << what;
    fail(ErrorKind::parse, msg.str());
}

double parse_number(std::string_view word, std::size_t line_no) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc{} || end != word.data() + word.size() || !std::isfinite(value))
        parse_error(line_no, "expected a number, got '" + std::string(word) + "'");
    return value;
}

// (c/a) sinh(a tau / c), continuous through a -> 0.
double lab_time_of(const Accelerated& seg, double c) {
    const double x = seg.acceleration_m_s2 * seg.proper_time_s / c;
    if (std::abs(x) < 1e-8) return seg.proper_time_s * (1.0 + x * x / 6.0);
    return seg.proper_time_s * std::sinh(x) / x;
}

}  // namespace

double h_parameter(double acceleration_m_s2, double length_m, double c_m_per_s) {
    require(std::isfinite(length_m) && length_m > 0.0, "h_parameter: cavity length must be positive");
    require(std::isfinite(c_m_per_s) && c_m_per_s > 0.0, "h_parameter: propagation speed must be positive");
    require(std::isfinite(acceleration_m_s2) && acceleration_m_s2 >= 0.0,
            "h_parameter: acceleration must be non-negative");
    return acceleration_m_s2 * length_m / (c_m_per_s * c_m_per_s);
}

Trajectory::Trajectory(std::vector<Segment> segments, CavityGeometry geometry)
    : segments_(std::move(segments)), geometry_(geometry) {
    geometry_.validate();
    require(!segments_.empty(), "trajectory needs at least one segment");
    for (const auto& segment : segments_) {
        std::visit(overloaded{
                       [](const Inertial& s) {
                           require(std::isfinite(s.duration_s) && s.duration_s >= 0.0,
                                   "inertial duration must be non-negative");
                       },
                       [this](const Accelerated& s) {
                           require(std::isfinite(s.proper_time_s) && s.proper_time_s >= 0.0,
                                   "accelerated proper time must be non-negative");
                           require(std::isfinite(s.acceleration_m_s2) && s.acceleration_m_s2 > 0.0,
                                   "acceleration must be positive");
                           require(h_of(s) < 2.0, "acceleration too large: h = aL/c^2 must stay below 2");
                       },
                   },
                   segment);
    }
}

Trajectory Trajectory::rest(CavityGeometry geometry) {
    return Trajectory({Inertial{0.0}}, geometry);
}

Trajectory Trajectory::parse(std::string_view text, CavityGeometry geometry) {
    std::vector<Segment> segments;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        const auto words = split_words(line);
        if (words.empty()) continue;
        Segment segment;
        if (words[0] == "inertial") {
            if (words.size() != 2) parse_error(line_no, "expected 'inertial <duration_s>'");
            segment = Inertial{parse_number(words[1], line_no)};
        } else if (words[0] == "accel") {
            if (words.size() != 3) parse_error(line_no, "expected 'accel <a_m_s2> <tau_s>'");
            segment = Accelerated{parse_number(words[1], line_no), parse_number(words[2], line_no)};
        } else {
            parse_error(line_no, "unknown segment kind '" + std::string(words[0]) + "'");
        }
        try {
            Trajectory{{segment}, geometry};
        } catch (const Error& e) {
            parse_error(line_no, e.what());
        }
        segments.push_back(segment);
    }
    if (segments.empty()) return rest(geometry);
    return Trajectory(std::move(segments), geometry);
}

double Trajectory::h_of(const Accelerated& segment) const {
    return h_parameter(segment.acceleration_m_s2, geometry_.length_m, geometry_.c_m_per_s);
}

double Trajectory::max_h() const {
    double h = 0.0;
    for (const auto& segment : segments_)
        if (const auto* acc = std::get_if<Accelerated>(&segment)) h = std::max(h, h_of(*acc));
    return h;
}

std::size_t Trajectory::accelerated_count() const {
    return static_cast<std::size_t>(std::count_if(segments_.begin(), segments_.end(), [](const Segment& s) {
        return std::holds_alternative<Accelerated>(s);
    }));
}

std::vector<std::string> Trajectory::regime_notes() const {
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto* acc = std::get_if<Accelerated>(&segments_[i]);
        if (!acc) continue;
        const double h = h_of(*acc);
        if (beyond_plotted_regime_h(h)) {
            std::ostringstream msg;
            msg << "segment " << i + 1 << ": h^2 = " << h * h << " exceeds " << plotted_regime_h2
                << "; perturbative expansion may be inaccurate";
            notes.push_back(msg.str());
        }
    }
    return notes;
}

ProperTimeLedger ledger(const Trajectory& trajectory, AliceClock clock) {
    ProperTimeLedger out;
    const double c = trajectory.geometry().c_m_per_s;
    for (const auto& segment : trajectory.segments()) {
        std::visit(overloaded{
                       [&](const Inertial& s) {
                           out.t_alice_s += s.duration_s;
                           out.tau_rob_s += s.duration_s;
                       },
                       [&](const Accelerated& s) {
                           out.tau_rob_s += s.proper_time_s;
                           out.t_alice_s += clock == AliceClock::lab_coordinate ? lab_time_of(s, c) : s.proper_time_s;
                       },
                   },
                   segment);
    }
    return out;
}

PhasePair phase_pair(const Trajectory& trajectory, std::size_t k, std::size_t kp, AliceClock clock) {
    require(k >= 1 && kp >= 1, "mode indices start at 1");
    const auto times = ledger(trajectory, clock);
    const auto& g = trajectory.geometry();
    PhasePair out;
    out.theta_alice = g.omega(k) * times.t_alice_s;
    out.theta_rob = g.omega(kp) * times.tau_rob_s;
    out.phi = out.theta_alice + out.theta_rob;
    out.phi_wrapped = std::fmod(out.phi, 2.0 * pi);
    if (out.phi_wrapped < 0.0) out.phi_wrapped += 2.0 * pi;
    return out;
}

double inertial_duration_for_turns(unsigned turns, std::size_t k, std::size_t kp,
                                   const CavityGeometry& geometry) {
    require(k >= 1 && kp >= 1, "mode indices start at 1");
    return 2.0 * pi * turns / (geometry.omega(k) + geometry.omega(kp));
}

namespace {

BogoliubovPair build_with(const Trajectory& trajectory, const BogoliubovEngine& engine,
                          const std::function<double(const Accelerated&)>& h_for) {
    const auto& g = engine.geometry();
    auto total = BogoliubovPair::identity(g.n_max);
    for (const auto& segment : trajectory.segments()) {
        const BogoliubovPair step = std::visit(
            overloaded{
                [&](const Inertial& s) { return phase_evolution_minkowski(s.duration_s, g); },
                [&](const Accelerated& s) { return engine.one_segment_transform(s.proper_time_s, h_for(s)); },
            },
            segment);
        total = compose(step, total);
    }
    return total;
}

}  // namespace

BogoliubovPair build_transform(const Trajectory& trajectory, const BogoliubovEngine& engine) {
    require(trajectory.geometry() == engine.geometry(), "build_transform: geometry mismatch");
    return build_with(trajectory, engine, [&](const Accelerated& s) { return trajectory.h_of(s); });
}

FSums trajectory_f_sums(const Trajectory& trajectory, std::size_t kp, const BogoliubovEngine& engine) {
    require(trajectory.geometry() == engine.geometry(), "trajectory_f_sums: geometry mismatch");
    const std::size_t accelerated = trajectory.accelerated_count();
    if (accelerated == 0) {
        require_truncation_adequate(kp, engine.geometry());
        return {};
    }
    if (accelerated == 1) {
        for (const auto& segment : trajectory.segments())
            if (const auto* acc = std::get_if<Accelerated>(&segment)) return engine.f_sums(kp, acc->proper_time_s);
    }
    const double h_max = trajectory.max_h();
    return engine.first_order_sums(kp, [&](double e) {
        return build_with(trajectory, engine, [&](const Accelerated& s) { return e * trajectory.h_of(s) / h_max; });
    });
}

}  // namespace cvtele
