#include "qcarpet/io/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>

#include "qcarpet/error.hpp"

namespace qcarpet::io {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_comment_block(std::ostream& os, std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        os << (line.empty() ? "#" : "# ") << line << '\n';
        start = end + 1;
    }
}

void write_spectral_state(std::ostream& os, const SpectralState& state,
                          const InputSignalSpec& signal) {
    const auto& cfg = state.cavity();
    os << "# m=" << format_number(cfg.m) << " hbar=" << format_number(cfg.hbar)
       << " L=" << format_number(cfg.L) << '\n';
    os << "# N=" << state.size() << " kind=" << to_string(signal.kind)
       << " x0=" << format_number(signal.x0) << " w=" << format_number(signal.w) << '\n';
    os << "alpha,parity,c_alpha\n";
    for (int a = 1; a <= state.size(); ++a)
        os << a << ',' << to_string(parity_of(a)) << ',' << format_number(state.coeff(a)) << '\n';
}

void write_carpet(std::ostream& os, const CarpetGrid& carpet) {
    os << "# quantity=" << to_string(carpet.quantity) << " rows=t cols=x"
       << " floored_nodes=" << carpet.floored_nodes << '\n';
    os << "t\\x";
    for (double x : carpet.grid.x_points) os << ',' << format_number(x);
    os << '\n';
    for (std::size_t it = 0; it < carpet.rows(); ++it) {
        os << format_number(carpet.grid.t_points[it]);
        for (std::size_t ix = 0; ix < carpet.cols(); ++ix) os << ',' << format_number(carpet.at(it, ix));
        os << '\n';
    }
}

void write_density_matrix(std::ostream& os, const DensityMatrixGrid& grid, ComplexPart part) {
    os << "# part=" << (part == ComplexPart::Real ? "real" : "imag")
       << " t=" << format_number(grid.t) << " rows=x cols=x'\n";
    os << "x\\x'";
    for (double xp : grid.x_prime_points) os << ',' << format_number(xp);
    os << '\n';
    for (std::size_t i = 0; i < grid.x_points.size(); ++i) {
        os << format_number(grid.x_points[i]);
        for (std::size_t j = 0; j < grid.x_prime_points.size(); ++j) {
            const auto v = grid.at(i, j);
            os << ',' << format_number(part == ComplexPart::Real ? v.real() : v.imag());
        }
        os << '\n';
    }
}

void write_trajectories(std::ostream& os, std::span<const Trajectory> trajectories) {
    std::size_t longest = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        if (trajectories[i].t.size() > trajectories[longest].t.size()) longest = i;
    os << 't';
    for (std::size_t i = 0; i < trajectories.size(); ++i) os << ",x_" << (i + 1);
    os << '\n';
    if (trajectories.empty()) return;
    const auto& axis = trajectories[longest].t;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        os << format_number(axis[k]);
        for (const auto& tr : trajectories) {
            os << ',';
            if (k < tr.x.size()) os << format_number(tr.x[k]);
        }
        os << '\n';
    }
}

void write_trajectory_status(std::ostream& os, std::span<const Trajectory> trajectories) {
    os << "index,x0,status,samples,accepted_steps,rejected_steps\n";
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        os << (i + 1) << ',' << format_number(tr.x0) << ',' << to_string(tr.status) << ','
           << tr.t.size() << ',' << tr.accepted_steps << ',' << tr.rejected_steps << '\n';
    }
}

void write_purity_curve(std::ostream& os, const PurityCurve& curve, const PurityFit* fit) {
    os << (fit ? "t,chi,chi_fit\n" : "t,chi\n");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        os << format_number(curve.times[i]) << ',' << format_number(curve.values[i]);
        if (fit) os << ',' << format_number(fit->evaluate(curve.times[i]));
        os << '\n';
    }
}

void write_purity_fit(std::ostream& os, const PurityFit& fit) {
    os << "parameter,value\n";
    os << "chi0," << format_number(fit.chi0) << '\n';
    for (std::size_t i = 0; i < 3; ++i)
        os << "chi" << (i + 1) << ',' << format_number(fit.amplitudes[i]) << '\n';
    for (std::size_t i = 0; i < 3; ++i)
        os << 't' << (i + 1) << ',' << format_number(fit.timescales[i]) << '\n';
    os << "t0," << format_number(fit.t0) << '\n';
    os << "residual_rms," << format_number(fit.residual) << '\n';
}

void write_sweep(std::ostream& os, std::span<const SweepRow> rows) {
    os << "x0,status,chi_inf,norm_deficit,chi0,chi1,chi2,chi3,t1,t2,t3,residual_rms,error\n";
    for (const auto& row : rows) {
        os << format_number(row.x0) << ',' << (row.ok ? "ok" : "error") << ',';
        if (row.ok || row.chi_inf > 0.0) os << format_number(row.chi_inf);
        os << ',';
        if (row.ok || row.chi_inf > 0.0) os << format_number(row.norm_deficit);
        if (row.fit) {
            const auto& f = *row.fit;
            os << ',' << format_number(f.chi0);
            for (double a : f.amplitudes) os << ',' << format_number(a);
            for (double t : f.timescales) os << ',' << format_number(t);
            os << ',' << format_number(f.residual);
        } else {
            os << ",,,,,,,,";
        }
        std::string err = row.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        os << ',' << err << '\n';
    }
}

void write_correlation_matrix(std::ostream& os, const CorrelationMatrix& m) {
    os << "alpha\\alpha'";
    for (int b = 1; b <= m.n; ++b) os << ',' << b;
    os << '\n';
    for (int a = 1; a <= m.n; ++a) {
        os << a;
        for (int b = 1; b <= m.n; ++b) os << ',' << format_number(m.at(a, b));
        os << '\n';
    }
}

void write_decay_map(std::ostream& os, const DecayTimeMap& m) {
    os << "# diagonal entries are the sentinel 'inf' (no decay)\n";
    os << "alpha\\alpha'";
    for (int b = 1; b <= m.n; ++b) os << ',' << b;
    os << '\n';
    for (int a = 1; a <= m.n; ++a) {
        os << a;
        for (int b = 1; b <= m.n; ++b) os << ',' << (a == b ? std::string("inf") : format_number(m.at(a, b)));
        os << '\n';
    }
}

PurityCurve read_purity_curve(std::istream& is) {
    PurityCurve curve;
    std::string line;
    const auto parse = [](std::string_view s, double& out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::string_view rest(line);
        rest.remove_prefix(comma + 1);
        const auto next = rest.find(',');
        if (next != std::string_view::npos) rest = rest.substr(0, next);
        double t = 0.0, v = 0.0;
        if (!parse(std::string_view(line).substr(0, comma), t) || !parse(rest, v)) {
            if (curve.times.empty()) continue;  // header row
            throw DomainError("malformed purity curve row: " + line);
        }
        curve.times.push_back(t);
        curve.values.push_back(v);
    }
    return curve;
}

} // namespace qcarpet::io
