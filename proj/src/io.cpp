#include "fpuwave/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "fpuwave/errors.hpp"

namespace fpuwave {

namespace fs = std::filesystem;

std::string format_double(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void dump_into(std::ostringstream& os, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad_in << json(it.key()).dump() << ": ";
            dump_into(os, it.value(), indent + 1);
        }
        os << "\n" << pad << "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[";
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ", ";
            first = false;
            dump_into(os, v, indent + 1);
        }
        os << "]";
        return;
    }
    case json::value_t::number_float: {
        const double x = j.get<double>();
        os << (std::isfinite(x) ? format_double(x) : "null");
        return;
    }
    default:
        os << j.dump();
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::Config, where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("bad value for '") + key + "' in " + where + ": " + e.what());
    }
}

std::string header_line(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

}  // namespace

std::string dump_json(const json& j) {
    std::ostringstream os;
    dump_into(os, j, 0);
    os << "\n";
    return os.str();
}

json to_json(const PotentialSpec& s) { return {{"a1", s.a1}, {"a2", s.a2}, {"b1", s.b1}, {"b2", s.b2}}; }

PotentialSpec potential_from_json(const json& j) {
    check_keys(j, {"a1", "a2", "b1", "b2"}, "potential");
    PotentialSpec s;
    read_opt(j, "a1", s.a1, "potential");
    read_opt(j, "a2", s.a2, "potential");
    read_opt(j, "b1", s.b1, "potential");
    read_opt(j, "b2", s.b2, "potential");
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    return s;
}

json to_json(const CriticalData& c) {
    return {{"c_star", c.c_star},         {"k0", c.k0},
            {"d2_sigma", c.d2_sigma},     {"sigma_2ik0", c.sigma_2ik0},
            {"s0_prime", c.s0_prime},     {"p0_prime", c.p0_prime}};
}

CriticalData critical_from_json(const json& j) {
    check_keys(j, {"c_star", "k0", "d2_sigma", "sigma_2ik0", "s0_prime", "p0_prime"}, "critical data");
    CriticalData c;
    try {
        c.c_star = j.at("c_star").get<double>();
        c.k0 = j.at("k0").get<double>();
        c.d2_sigma = j.at("d2_sigma").get<double>();
        c.sigma_2ik0 = j.at("sigma_2ik0").get<double>();
        c.s0_prime = j.at("s0_prime").get<double>();
        c.p0_prime = j.at("p0_prime").get<double>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("critical data: ") + e.what());
    }
    return c;
}

json to_json(const NormalFormCoeffs& n) {
    return {{"m2_v1v2", n.m2_v1v2},
            {"m2_v2v2_im", n.m2_v2v2_im},
            {"m3", n.m3},
            {"s_closed_form", n.s_closed_form},
            {"s_effective", n.s_effective},
            {"sign_condition_ok", n.sign_condition_ok},
            {"nu1", n.nu1},
            {"nu2", n.nu2},
            {"gamma", n.gamma}};
}

json to_json(const WaveAnsatz& a) {
    return {{"epsilon", a.epsilon}, {"c", a.c},         {"theta", a.theta},
            {"r_coeff", a.r_coeff}, {"amplitude_scale", a.amplitude_scale},
            {"width", a.width},     {"k0", a.k0},       {"s0", a.s0},
            {"p0", a.p0},           {"s_effective", a.s_effective}};
}

json to_json(const SolverConfig& s) {
    return {{"newton_tol", s.newton_tol},
            {"max_newton", s.max_newton},
            {"max_halvings", s.max_halvings},
            {"points_per_unit", s.points_per_unit},
            {"tail_factor", s.tail_factor},
            {"min_window", s.min_window},
            {"n_modes", s.n_modes},
            {"dense_max", s.dense_max},
            {"gmres_rtol", s.gmres_rtol},
            {"gmres_restart", s.gmres_restart},
            {"gmres_max_restarts", s.gmres_max_restarts},
            {"cond_limit", s.cond_limit},
            {"tail_ratio", s.tail_ratio},
            {"theta", s.theta},
            {"seeded_continuation", s.seeded_continuation},
            {"parallel", s.parallel}};
}

json to_json(const ExperimentConfig& c) {
    return {{"potential", to_json(c.potential)},
            {"epsilon_list", c.epsilon_list},
            {"solver", to_json(c.solver)},
            {"lattice",
             {{"n_sites", c.lattice.n_sites},
              {"dt", c.lattice.dt},
              {"T", c.lattice.T},
              {"epsilon", c.lattice.epsilon},
              {"x0", c.lattice.x0},
              {"stride", c.lattice.stride}}},
            {"spectrum", {{"re_max", c.spectrum.re_max}, {"im_max", c.spectrum.im_max}, {"grid", c.spectrum.grid}}},
            {"output_dir", c.output_dir},
            {"seed", c.seed}};
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    try {
        potential.validate();
    } catch (const Error& e) {
        bad(e.what());
    }
    if (epsilon_list.empty()) bad("epsilon_list must not be empty");
    for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
        if (!(epsilon_list[i] > 0.0) || !std::isfinite(epsilon_list[i])) bad("epsilon_list entries must be positive");
        if (i > 0 && !(epsilon_list[i] > epsilon_list[i - 1])) bad("epsilon_list must be strictly ascending");
    }
    const SolverConfig& s = solver;
    if (!(s.newton_tol > 0.0)) bad("solver.newton_tol must be positive");
    if (s.max_newton < 1) bad("solver.max_newton must be at least 1");
    if (s.max_halvings < 0) bad("solver.max_halvings must be non-negative");
    if (s.points_per_unit < 1) bad("solver.points_per_unit must be positive");
    if (!(s.tail_factor > 0.0) || !(s.min_window > 8.0)) bad("solver window policy must be positive and exceed 8");
    if (s.n_modes != 0 && (s.n_modes & (s.n_modes - 1)) != 0) bad("solver.n_modes must be 0 or a power of two");
    if (!(s.gmres_rtol > 0.0) || s.gmres_restart < 1 || s.gmres_max_restarts < 0) bad("invalid GMRES settings");
    if (!(s.cond_limit > 1.0)) bad("solver.cond_limit must exceed 1");
    if (lattice.n_sites < 8) bad("lattice.n_sites must be at least 8");
    if (!(lattice.dt > 0.0) || lattice.dt > 0.05) bad("lattice.dt must lie in (0, 0.05]");
    if (!(lattice.T >= 0.0)) bad("lattice.T must be non-negative");
    if (lattice.stride == 0) bad("lattice.stride must be positive");
    if (!(spectrum.re_max > 0.0) || !(spectrum.im_max > 0.0) || spectrum.grid < 2) bad("invalid spectrum box");
    if (output_dir.empty()) bad("output_dir must not be empty");
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j, {"potential", "epsilon_list", "solver", "lattice", "spectrum", "output_dir", "seed"}, "config");
    ExperimentConfig c;
    if (j.contains("potential")) c.potential = potential_from_json(j.at("potential"));
    read_opt(j, "epsilon_list", c.epsilon_list, "config");
    read_opt(j, "output_dir", c.output_dir, "config");
    read_opt(j, "seed", c.seed, "config");
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"newton_tol", "max_newton", "max_halvings", "points_per_unit", "tail_factor", "min_window",
                       "n_modes", "dense_max", "gmres_rtol", "gmres_restart", "gmres_max_restarts", "cond_limit",
                       "tail_ratio", "theta", "seeded_continuation", "parallel"},
                   "solver");
        SolverConfig& o = c.solver;
        read_opt(s, "newton_tol", o.newton_tol, "solver");
        read_opt(s, "max_newton", o.max_newton, "solver");
        read_opt(s, "max_halvings", o.max_halvings, "solver");
        read_opt(s, "points_per_unit", o.points_per_unit, "solver");
        read_opt(s, "tail_factor", o.tail_factor, "solver");
        read_opt(s, "min_window", o.min_window, "solver");
        read_opt(s, "n_modes", o.n_modes, "solver");
        read_opt(s, "dense_max", o.dense_max, "solver");
        read_opt(s, "gmres_rtol", o.gmres_rtol, "solver");
        read_opt(s, "gmres_restart", o.gmres_restart, "solver");
        read_opt(s, "gmres_max_restarts", o.gmres_max_restarts, "solver");
        read_opt(s, "cond_limit", o.cond_limit, "solver");
        read_opt(s, "tail_ratio", o.tail_ratio, "solver");
        read_opt(s, "theta", o.theta, "solver");
        read_opt(s, "seeded_continuation", o.seeded_continuation, "solver");
        read_opt(s, "parallel", o.parallel, "solver");
    }
    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        check_keys(l, {"n_sites", "dt", "T", "epsilon", "x0", "stride"}, "lattice");
        read_opt(l, "n_sites", c.lattice.n_sites, "lattice");
        read_opt(l, "dt", c.lattice.dt, "lattice");
        read_opt(l, "T", c.lattice.T, "lattice");
        read_opt(l, "epsilon", c.lattice.epsilon, "lattice");
        read_opt(l, "x0", c.lattice.x0, "lattice");
        read_opt(l, "stride", c.lattice.stride, "lattice");
    }
    if (j.contains("spectrum")) {
        const json& s = j.at("spectrum");
        check_keys(s, {"re_max", "im_max", "grid"}, "spectrum");
        read_opt(s, "re_max", c.spectrum.re_max, "spectrum");
        read_opt(s, "im_max", c.spectrum.im_max, "spectrum");
        read_opt(s, "grid", c.spectrum.grid, "spectrum");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, "config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void apply_env_overrides(ExperimentConfig& cfg, const EnvLookup& lookup) {
    json j = to_json(cfg);
    bool changed = false;
    for (const char* section : {"solver", "lattice", "spectrum"}) {
        for (auto it = j[section].begin(); it != j[section].end(); ++it) {
            std::string name = std::string("FPUWAVE_") + section + "_" + it.key();
            for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            const char* raw = lookup(name.c_str());
            if (!raw) continue;
            try {
                const json parsed = json::parse(raw);
                if (parsed.is_structured() || parsed.is_string())
                    throw Error(ErrorKind::Config, name + " must hold a scalar");
                it.value() = parsed;
            } catch (const json::exception&) {
                throw Error(ErrorKind::Config, "cannot parse " + name + "='" + raw + "'");
            }
            changed = true;
        }
    }
    if (changed) cfg = parse_config(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    // The output location does not influence any result.
    json j = to_json(cfg);
    j.erase("output_dir");
    const std::string canon = dump_json(j);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string eigenvalues_csv(const EigenvalueSet& set, const std::string& hash) {
    std::string out = header_line(hash) + "re,im,residual\n";
    for (const auto& r : set.roots)
        for (int k = 0; k < r.multiplicity; ++k)
            out += format_double(r.value.real()) + "," + format_double(r.value.imag()) + "," +
                   format_double(r.residual) + "\n";
    return out;
}

std::string profile_csv(const ProfileSolution& sol, const std::string& hash) {
    std::string out = header_line(hash) + "xi,v\n";
    for (std::size_t j = 0; j < sol.v.size(); ++j)
        out += format_double(sol.xi(j)) + "," + format_double(sol.v[j]) + "\n";
    return out;
}

std::string trajectory_csv(std::span<const TrajectoryRecord> recs, const std::string& hash) {
    std::string out = header_line(hash) + "t,energy,momentum,shape_error,shift\n";
    for (const auto& r : recs)
        out += format_double(r.t) + "," + format_double(r.energy) + "," + format_double(r.momentum) + "," +
               format_double(r.shape_error) + "," + format_double(r.shift) + "\n";
    return out;
}

json profile_header(const ProfileSolution& s, const std::string& payload, const std::string& hash) {
    return {{"epsilon", s.epsilon},
            {"c", s.c},
            {"domain_length", s.domain_length},
            {"n_modes", s.n_modes},
            {"residual_norm", s.residual_norm},
            {"first_integral_drift", s.first_integral_drift},
            {"symmetry_defect", s.symmetry_defect},
            {"newton_iterations", s.newton_iterations},
            {"residual_history", s.residual_history},
            {"tail_ratio", s.tail_ratio},
            {"least_squares_used", s.least_squares_used},
            {"ansatz", to_json(s.ansatz)},
            {"potential", to_json(s.potential)},
            {"payload", payload},
            {"config_hash", hash}};
}

ProfileSolution read_profile(const fs::path& header) {
    json h;
    try {
        h = json::parse(read_text(header));
        ProfileSolution s;
        s.epsilon = h.at("epsilon").get<double>();
        s.c = h.at("c").get<double>();
        s.domain_length = h.at("domain_length").get<double>();
        s.n_modes = h.at("n_modes").get<std::size_t>();
        s.residual_norm = h.at("residual_norm").get<double>();
        s.first_integral_drift = h.at("first_integral_drift").get<double>();
        s.symmetry_defect = h.at("symmetry_defect").get<double>();
        s.newton_iterations = h.at("newton_iterations").get<int>();
        s.residual_history = h.at("residual_history").get<std::vector<double>>();
        s.tail_ratio = h.at("tail_ratio").get<double>();
        s.least_squares_used = h.at("least_squares_used").get<bool>();
        s.potential = potential_from_json(h.at("potential"));
        const json& a = h.at("ansatz");
        s.ansatz.epsilon = a.at("epsilon").get<double>();
        s.ansatz.c = a.at("c").get<double>();
        s.ansatz.theta = a.at("theta").get<double>();
        s.ansatz.r_coeff = a.at("r_coeff").get<double>();
        s.ansatz.amplitude_scale = a.at("amplitude_scale").get<double>();
        s.ansatz.width = a.at("width").get<double>();
        s.ansatz.k0 = a.at("k0").get<double>();
        s.ansatz.s0 = a.at("s0").get<double>();
        s.ansatz.p0 = a.at("p0").get<double>();
        s.ansatz.s_effective = a.at("s_effective").get<double>();
        const fs::path payload = header.parent_path() / h.at("payload").get<std::string>();
        std::istringstream csv(read_text(payload));
        std::string line;
        bool seen_header = false;
        while (std::getline(csv, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!seen_header) {
                seen_header = true;
                continue;
            }
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw Error(ErrorKind::Config, "malformed profile row: " + line);
            s.v.push_back(std::stod(line.substr(comma + 1)));
        }
        if (s.v.size() != s.n_modes)
            throw Error(ErrorKind::Config, "profile payload has " + std::to_string(s.v.size()) + " rows, expected " +
                                               std::to_string(s.n_modes));
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, "bad profile header " + header.string() + ": " + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Config, "bad number in profile payload for " + header.string());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

template <class T>
void put_le(std::ofstream& out, T value) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

template <class T>
T get_le(std::ifstream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::Config, "truncated snapshot");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

}  // namespace

void write_snapshot(const fs::path& path, const LatticeState& s, const std::string& hash) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    out.write("FPUSNAP1", 8);
    put_le<std::uint64_t>(out, s.n_sites());
    put_le<double>(out, s.t);
    std::string h = hash;
    h.resize(16, ' ');
    out.write(h.data(), 16);
    for (double x : s.q) put_le<double>(out, x);
    for (double x : s.p) put_le<double>(out, x);
}

LatticeState read_snapshot(const fs::path& path, std::string* hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, "FPUSNAP1", 8) != 0)
        throw Error(ErrorKind::Config, "not a snapshot file: " + path.string());
    const auto n = get_le<std::uint64_t>(in);
    LatticeState s;
    s.t = get_le<double>(in);
    char h[16];
    if (!in.read(h, 16)) throw Error(ErrorKind::Config, "truncated snapshot");
    if (hash) *hash = std::string(h, 16);
    s.q.resize(n);
    s.p.resize(n);
    for (auto& x : s.q) x = get_le<double>(in);
    for (auto& x : s.p) x = get_le<double>(in);
    return s;
}

std::string gnuplot_spectrum(const std::string& csv, const std::string& hash) {
    return header_line(hash) + "set datafile separator ','\nset key off\nset xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
           "plot '" + csv + "' every ::1 using 1:2 with points pt 7\n";
}

std::string gnuplot_profile(const std::string& csv, const std::string& hash) {
    return header_line(hash) + "set datafile separator ','\nset key off\nset xlabel 'xi'\nset ylabel 'v'\n"
           "plot '" + csv + "' every ::1 using 1:2 with lines\n";
}

std::string gnuplot_trajectory(const std::string& csv, const std::string& hash) {
    return header_line(hash) + "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\nset logscale y\n"
           "plot '" + csv + "' every ::1 using 1:4 with lines title 'shape error'\n";
}

}  // namespace fpuwave
