#include "ecco/report_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ecco {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("parse_double: bad number '" + s + "'");
    return v;
}

namespace {

constexpr const char* kTraceHeader =
    "iter,t,dt,f,grad_norm,max_lte,charge_sq,grow_iters,shrink_iters";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
    std::string out = kTraceHeader;
    out += '\n';
    for (const auto& r : trace) {
        out += std::to_string(r.iter);
        out += ',';
        out += format_double(r.t);
        out += ',';
        out += format_double(r.dt);
        out += ',';
        out += format_double(r.f);
        out += ',';
        out += format_double(r.grad_norm);
        out += ',';
        out += format_double(r.max_lte);
        out += ',';
        out += format_double(r.charge_sq);
        out += ',';
        out += std::to_string(r.grow_iters);
        out += ',';
        out += std::to_string(r.shrink_iters);
        out += '\n';
    }
    return out;
}

std::vector<IterationRecord> trace_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw std::invalid_argument("trace_from_csv: bad header");
    std::vector<IterationRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 9) throw std::invalid_argument("trace_from_csv: bad row");
        IterationRecord r;
        r.iter = std::stoi(cols[0]);
        r.t = parse_double(cols[1]);
        r.dt = parse_double(cols[2]);
        r.f = parse_double(cols[3]);
        r.grad_norm = parse_double(cols[4]);
        r.max_lte = parse_double(cols[5]);
        r.charge_sq = parse_double(cols[6]);
        r.grow_iters = std::stoi(cols[7]);
        r.shrink_iters = std::stoi(cols[8]);
        trace.push_back(r);
    }
    return trace;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json record_to_json(const IterationRecord& r) {
    ordered_json j;
    j["iter"] = r.iter;
    j["t"] = r.t;
    j["dt"] = r.dt;
    j["f"] = r.f;
    j["grad_norm"] = r.grad_norm;
    j["max_lte"] = r.max_lte;
    j["charge_sq"] = r.charge_sq;
    j["grow_iters"] = r.grow_iters;
    j["shrink_iters"] = r.shrink_iters;
    if (r.f_full) j["f_full"] = *r.f_full;
    return j;
}

IterationRecord record_from_json(const ordered_json& j) {
    IterationRecord r;
    r.iter = j.at("iter").get<int>();
    r.t = j.at("t").get<double>();
    r.dt = j.at("dt").get<double>();
    r.f = j.at("f").get<double>();
    r.grad_norm = j.at("grad_norm").get<double>();
    r.max_lte = j.at("max_lte").get<double>();
    r.charge_sq = j.at("charge_sq").get<double>();
    r.grow_iters = j.at("grow_iters").get<int>();
    r.shrink_iters = j.at("shrink_iters").get<int>();
    if (j.contains("f_full")) r.f_full = j.at("f_full").get<double>();
    return r;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    ordered_json j;
    j["status"] = to_string(report.status);
    j["x_final"] = report.x_final;
    j["f_final"] = report.f_final;
    j["grad_norm_final"] = report.grad_norm_final;
    j["iters"] = report.iters;
    j["diverged"] = report.diverged;
    j["control_degraded"] = report.control_degraded;
    j["counters"] = {{"n_f", report.counters.n_f},
                     {"n_grad", report.counters.n_grad},
                     {"n_hess", report.counters.n_hess}};
    ordered_json trace = ordered_json::array();
    for (const auto& r : report.trace) trace.push_back(record_to_json(r));
    j["trace"] = std::move(trace);
    j["config_echo"] = report.config_echo;
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& json_text) {
    const ordered_json j = ordered_json::parse(json_text);
    RunReport report;
    const std::string status = j.at("status").get<std::string>();
    if (status == "converged") report.status = RunStatus::converged;
    else if (status == "max_iters") report.status = RunStatus::max_iters;
    else if (status == "step_floored") report.status = RunStatus::step_floored;
    else throw std::invalid_argument("report_from_json: bad status '" + status + "'");
    report.x_final = j.at("x_final").get<Vector>();
    report.f_final = j.at("f_final").get<double>();
    report.grad_norm_final = j.at("grad_norm_final").get<double>();
    report.iters = j.at("iters").get<int>();
    report.diverged = j.at("diverged").get<bool>();
    report.control_degraded = j.at("control_degraded").get<bool>();
    report.counters.n_f = j.at("counters").at("n_f").get<std::int64_t>();
    report.counters.n_grad = j.at("counters").at("n_grad").get<std::int64_t>();
    report.counters.n_hess = j.at("counters").at("n_hess").get<std::int64_t>();
    for (const auto& rec : j.at("trace")) report.trace.push_back(record_from_json(rec));
    report.config_echo = j.at("config_echo").get<std::string>();
    return report;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ecco
