#include "battbayes/serialize.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "battbayes/errors.hpp"

namespace battbayes {

namespace fs = std::filesystem;

std::string fmt_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double parse_double_or_throw(const std::string& text, const std::string& where) {
    // strtod instead of stod: underflow to a subnormal must parse exactly
    // rather than throw, so every formatted double reads back losslessly.
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size()) {
        throw ParseError("bad number '" + text + "' in " + where);
    }
    if (errno == ERANGE && std::fabs(v) == HUGE_VAL) {
        throw ParseError("number out of range '" + text + "' in " + where);
    }
    return v;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

}  // namespace

void write_chain(const std::string& path, const Chain& chain) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write chain file: " + path);
    }
    out << "# variable " << chain.variable << "\n";
    out << "# family " << family_name(chain.family) << "\n";
    out << "# seed " << chain.seed << "\n";
    out << "# burn_in_index " << chain.burn_in_index << "\n";
    out << "# accepted " << chain.accepted << "\n";
    out << "# proposed " << chain.proposed << "\n";
    for (double x : chain.samples) {
        out << fmt_full(x) << "\n";
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

Chain read_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open chain file: " + path);
    }
    Chain chain;
    std::string line;
    bool saw_variable = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::stringstream ss(line);
            std::string hash, key, value;
            ss >> hash >> key >> value;
            if (key == "variable") {
                chain.variable = value;
                saw_variable = true;
            } else if (key == "family") {
                chain.family = family_from_name(value);
            } else if (key == "seed") {
                chain.seed = std::stoull(value);
            } else if (key == "burn_in_index") {
                chain.burn_in_index = std::stoull(value);
            } else if (key == "accepted") {
                chain.accepted = std::stoull(value);
            } else if (key == "proposed") {
                chain.proposed = std::stoull(value);
            }
            continue;
        }
        chain.samples.push_back(parse_double_or_throw(line, path));
    }
    if (!saw_variable) {
        throw SchemaError("chain file lacks a variable header: " + path);
    }
    return chain;
}

void write_chain_set(const std::string& dir, const std::map<std::string, Chain>& chains) {
    fs::create_directories(dir);
    std::ofstream index(fs::path(dir) / "index.csv");
    if (!index) {
        throw IoError("cannot write chain index in " + dir);
    }
    index << "variable,family,seed,burn_in_index,accepted,proposed,file\n";
    for (const auto& [name, chain] : chains) {
        // Bracketed per-observation names become filesystem-safe stems.
        std::string stem = name;
        for (char& c : stem) {
            if (c == '[') c = '_';
            if (c == ']') c = '\0';
        }
        stem.erase(std::remove(stem.begin(), stem.end(), '\0'), stem.end());
        const std::string file = stem + ".txt";
        write_chain((fs::path(dir) / file).string(), chain);
        index << name << ',' << family_name(chain.family) << ',' << chain.seed << ','
              << chain.burn_in_index << ',' << chain.accepted << ',' << chain.proposed << ','
              << file << "\n";
    }
    if (!index) {
        throw IoError("short write to chain index in " + dir);
    }
}

std::map<std::string, Chain> read_chain_set(const std::string& dir) {
    const fs::path index_path = fs::path(dir) / "index.csv";
    std::ifstream index(index_path);
    if (!index) {
        throw IoError("cannot open chain index: " + index_path.string());
    }
    std::string line;
    if (!std::getline(index, line)) {
        throw SchemaError("empty chain index: " + index_path.string());
    }
    std::map<std::string, Chain> chains;
    while (std::getline(index, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = csv_fields(line);
        if (fields.size() < 7) {
            throw ParseError("bad chain index row: " + line);
        }
        Chain chain = read_chain((fs::path(dir) / fields[6]).string());
        chains.emplace(fields[0], std::move(chain));
    }
    return chains;
}

void write_summaries(const std::string& path, const std::vector<PosteriorSummary>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write summary file: " + path);
    }
    out << "variable,family,mean,sd,ci_low,ci_high\n";
    for (const auto& s : rows) {
        out << s.variable << ',' << family_name(s.fitted.family) << ',' << fmt_full(s.mean)
            << ',' << fmt_full(s.sd) << ',' << fmt_full(s.ci_low) << ',' << fmt_full(s.ci_high)
            << "\n";
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

std::vector<PosteriorSummary> read_summaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open summary file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("summary file is empty: " + path);
    }
    std::vector<PosteriorSummary> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = csv_fields(line);
        if (fields.size() < 6) {
            throw ParseError("bad summary row: " + line);
        }
        PosteriorSummary s;
        s.variable = fields[0];
        s.fitted.family = family_from_name(fields[1]);
        s.mean = parse_double_or_throw(fields[2], path);
        s.sd = parse_double_or_throw(fields[3], path);
        s.ci_low = parse_double_or_throw(fields[4], path);
        s.ci_high = parse_double_or_throw(fields[5], path);
        s.fitted.mean = s.mean;
        s.fitted.sd = s.sd;
        rows.push_back(std::move(s));
    }
    return rows;
}

void write_time_series(const std::string& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write time series: " + path);
    }
    out << "t_s,value\n";
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        out << fmt_full(static_cast<double>(k) * series.sample_period_s) << ','
            << fmt_full(series.values[k]) << "\n";
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

TimeSeries read_time_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open time series: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("time series file is empty: " + path);
    }
    TimeSeries series;
    std::vector<double> stamps;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto fields = csv_fields(line);
        if (fields.size() < 2) {
            throw ParseError("bad time-series row: " + line);
        }
        stamps.push_back(parse_double_or_throw(fields[0], path));
        series.values.push_back(parse_double_or_throw(fields[1], path));
    }
    if (series.values.empty()) {
        throw SchemaError("time series has no samples: " + path);
    }
    series.sample_period_s = stamps.size() >= 2 ? stamps[1] - stamps[0] : 1.0;
    if (!(series.sample_period_s > 0.0)) {
        throw ParseError("non-increasing timestamps in " + path);
    }
    return series;
}

void write_pdf_curve(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write density table: " + path);
    }
    out << "x,density\n";
    for (const auto& [x, d] : curve) {
        out << fmt_full(x) << ',' << fmt_full(d) << "\n";
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

}  // namespace battbayes
