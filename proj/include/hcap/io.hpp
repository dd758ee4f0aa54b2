#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hcap/capacity.hpp"
#include "hcap/channel.hpp"
#include "hcap/errors.hpp"
#include "hcap/sim.hpp"
#include "hcap/version.hpp"

namespace hcap {

/// Numbers are printed with 9 significant digits: below accumulation noise,
/// above every test tolerance.
inline std::string format_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseFailure, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseFailure, path + ": " + e.what());
    }
    return j;
}

inline void require_field(const nlohmann::json& j, const char* name, const std::string& path) {
    if (!j.contains(name))
        fail(ErrorCode::ParseFailure, path + ": missing field `" + name + "`");
}

}  // namespace detail

/// Channel file: JSON object with x_size, s_size, y_size, q_s and w, where
/// w[x][s] is the output distribution for input x in state s.
inline Channel load_channel(const std::string& path,
                            int max_size = Channel::kDefaultMaxSize) {
    const nlohmann::json j = detail::parse_json_file(path);
    for (const char* field : {"x_size", "s_size", "y_size", "q_s", "w"})
        detail::require_field(j, field, path);
    RawChannel raw;
    try {
        raw.x_size = j.at("x_size").get<int>();
        raw.s_size = j.at("s_size").get<int>();
        raw.y_size = j.at("y_size").get<int>();
        raw.q_s = j.at("q_s").get<std::vector<double>>();
        raw.w = j.at("w").get<std::vector<std::vector<std::vector<double>>>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseFailure, path + ": " + e.what());
    }
    return validate_channel(std::move(raw), max_size);
}

struct SimPolicyFile {
    std::vector<std::vector<double>> q_u_given_s;  // [s][u]
    std::vector<int> phi;                          // [u]
};

/// Single-branch policy file: q_u_given_s rows (one per state) and phi.
inline SimPolicyFile load_policy(const std::string& path) {
    const nlohmann::json j = detail::parse_json_file(path);
    for (const char* field : {"q_u_given_s", "phi"}) detail::require_field(j, field, path);
    SimPolicyFile pf;
    try {
        pf.q_u_given_s = j.at("q_u_given_s").get<std::vector<std::vector<double>>>();
        pf.phi = j.at("phi").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseFailure, path + ": " + e.what());
    }
    return pf;
}

inline std::string join_nums(const std::vector<double>& xs, char sep = ';') {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out.push_back(sep);
        out += format_num(xs[i]);
    }
    return out;
}

/// Key/value record for a single capacity computation.
inline std::string capacity_record(const CapacityResult& res) {
    std::ostringstream os;
    os << "rh = " << format_num(res.rh) << "\n";
    os << "c = " << format_num(res.c) << "\n";
    os << "method = " << method_name(res.method) << "\n";
    os << "r0 = " << format_num(res.r0) << "\n";
    os << "slack = " << format_num(res.diagnostics.slack) << "\n";
    os << "restarts_used = " << res.diagnostics.restarts_used << "\n";
    std::vector<double> rs, ws;
    for (const auto& sp : res.diagnostics.support) {
        rs.push_back(sp.r);
        ws.push_back(sp.weight);
    }
    os << "support_rs = " << join_nums(rs) << "\n";
    os << "support_ws = " << join_nums(ws) << "\n";
    os << "policy_v_size = " << res.policy.v_size << "\n";
    os << "policy_u_size = " << res.policy.u_size << "\n";
    for (int v = 0; v < res.policy.v_size; ++v) {
        os << "policy_q_v[" << v << "] = " << format_num(res.policy.q_v[v]) << "\n";
        for (std::size_t s = 0; s < res.policy.q_u_given_sv[v].size(); ++s)
            os << "policy_q_u_given_s[" << v << "][" << s << "] = "
               << join_nums(res.policy.q_u_given_sv[v][s], ',') << "\n";
        std::string phi_str;
        for (std::size_t u = 0; u < res.policy.phi[v].size(); ++u) {
            if (u) phi_str.push_back(',');
            phi_str += std::to_string(res.policy.phi[v][u]);
        }
        os << "policy_phi[" << v << "] = " << phi_str << "\n";
    }
    return os.str();
}

inline const char* kSweepCsvHeader = "rh,c,r0,method,slack,support_rs,support_ws";

inline std::string sweep_csv_row(const CapacityResult& res) {
    std::vector<double> rs, ws;
    for (const auto& sp : res.diagnostics.support) {
        rs.push_back(sp.r);
        ws.push_back(sp.weight);
    }
    std::ostringstream os;
    os << format_num(res.rh) << ',' << format_num(res.c) << ',' << format_num(res.r0) << ','
       << method_name(res.method) << ',' << format_num(res.diagnostics.slack) << ','
       << join_nums(rs) << ',' << join_nums(ws);
    return os.str();
}

inline const char* kSimCsvHeader =
    "n,rate_r,rate_rh,r0,epsilon,trials,helper_failures,decode_errors,error_rate,ci_lo,ci_hi,"
    "seed";

inline std::string sim_csv_row(const SimConfig& cfg, const SimReport& rep) {
    std::ostringstream os;
    os << cfg.n << ',' << format_num(cfg.rate_r) << ',' << format_num(cfg.rate_rh) << ','
       << format_num(cfg.r0) << ',' << format_num(cfg.epsilon) << ',' << rep.trials << ','
       << rep.helper_failures << ',' << rep.decode_errors << ','
       << format_num(rep.error_rate) << ',' << format_num(rep.wilson_lo) << ','
       << format_num(rep.wilson_hi) << ',' << cfg.seed;
    return os.str();
}

/// Provenance sidecar for every emitted result file.
struct RunManifest {
    std::string command;
    std::string channel_path;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::uint64_t seed = 0;
    std::string tool_version = kVersion;
    double wall_time_s = 0.0;
};

inline std::string manifest_text(const RunManifest& m) {
    std::ostringstream os;
    os << "command = " << m.command << "\n";
    os << "channel_path = " << m.channel_path << "\n";
    for (const auto& [k, v] : m.parameters) os << "param." << k << " = " << v << "\n";
    os << "seed = " << m.seed << "\n";
    os << "tool_version = " << m.tool_version << "\n";
    os << "wall_time_s = " << format_num(m.wall_time_s) << "\n";
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::ParseFailure, "cannot write " + path);
    out << content;
}

}  // namespace hcap
