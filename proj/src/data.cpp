#include "battbayes/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "battbayes/errors.hpp"
#include "battbayes/rng.hpp"

namespace battbayes {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.push_back("");
    }
    return out;
}

double parse_double(const std::string& text, std::size_t line_no, const std::string& column) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad value '" + text + "' in " +
                         column);
    }
}

int parse_int(const std::string& text, std::size_t line_no, const std::string& column) {
    double v = parse_double(text, line_no, column);
    if (v != std::floor(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": " + column +
                         " must be an integer");
    }
    return static_cast<int>(v);
}

constexpr const char* kColumns[] = {"cell_id", "temp_c",   "c_rate",   "soc_avg", "soc_min",
                                    "soc_max", "ah",       "fade_pct", "replicate"};

}  // namespace

std::vector<TrainingRecord> load_training_set(const std::string& path,
                                              std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open training set: " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    // header: first line that is neither blank nor a comment
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) {
        throw SchemaError("training set has no header row: " + path);
    }
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    std::string missing;
    for (const char* name : kColumns) {
        if (!col.count(name)) {
            missing += missing.empty() ? name : std::string(", ") + name;
        }
    }
    if (!missing.empty()) {
        throw SchemaError("training set missing columns: " + missing);
    }

    std::vector<TrainingRecord> records;
    std::map<std::string, std::size_t> index_of;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() < header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " columns, got " +
                             std::to_string(cells.size()));
        }
        auto field = [&](const char* name) -> const std::string& { return cells[col[name]]; };
        TrainingRecord row;
        row.cell_id = field("cell_id");
        if (row.cell_id.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty cell_id");
        }
        row.temp_c = parse_double(field("temp_c"), line_no, "temp_c");
        row.c_rate = parse_double(field("c_rate"), line_no, "c_rate");
        row.soc_avg = parse_double(field("soc_avg"), line_no, "soc_avg");
        row.soc_min = parse_double(field("soc_min"), line_no, "soc_min");
        row.soc_max = parse_double(field("soc_max"), line_no, "soc_max");
        FadePoint p;
        p.ah = parse_double(field("ah"), line_no, "ah");
        p.fade_pct = parse_double(field("fade_pct"), line_no, "fade_pct");
        p.replicate = parse_int(field("replicate"), line_no, "replicate");

        if (row.temp_c < -273.15) {
            throw ParseError("line " + std::to_string(line_no) + ": temp_c below absolute zero");
        }
        if (!(row.c_rate > 0.0)) {
            throw ParseError("line " + std::to_string(line_no) + ": c_rate must be positive");
        }
        if (p.fade_pct < 0.0 || p.fade_pct > 100.0) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": fade_pct outside [0, 100]");
        }
        if (!(p.ah > 0.0)) {
            throw ParseError("line " + std::to_string(line_no) + ": ah must be positive");
        }
        if (p.replicate < 1) {
            throw ParseError("line " + std::to_string(line_no) + ": replicate must be >= 1");
        }
        for (double s : {row.soc_avg, row.soc_min, row.soc_max}) {
            if (s < 0.0 || s > 100.0) {
                throw ParseError("line " + std::to_string(line_no) + ": SOC outside [0, 100]");
            }
        }
        if (!(row.soc_min <= row.soc_avg && row.soc_avg <= row.soc_max)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": SOC bounds not ordered (min <= avg <= max)");
        }

        auto it = index_of.find(row.cell_id);
        if (it == index_of.end()) {
            index_of[row.cell_id] = records.size();
            records.push_back(row);
            records.back().points = {p};
        } else {
            TrainingRecord& rec = records[it->second];
            if (rec.temp_c != row.temp_c || rec.c_rate != row.c_rate ||
                rec.soc_avg != row.soc_avg || rec.soc_min != row.soc_min ||
                rec.soc_max != row.soc_max) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": test condition changed within cell " + row.cell_id);
            }
            rec.points.push_back(p);
        }
    }
    if (records.empty()) {
        throw SchemaError("training set has no data rows: " + path);
    }

    if (warnings) {
        for (const auto& rec : records) {
            double last_ah = -1.0;
            double last_fade = -1.0;
            for (const auto& p : rec.points) {
                if (p.ah > last_ah) {
                    if (p.fade_pct < last_fade) {
                        warnings->push_back("cell " + rec.cell_id + ": fade decreases at " +
                                            fmt17(p.ah) + " Ah");
                    }
                    last_ah = p.ah;
                    last_fade = p.fade_pct;
                }
            }
        }
    }
    return records;
}

void write_training_set(const std::string& path, const std::vector<TrainingRecord>& records,
                        const std::string& comment) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write training set: " + path);
    }
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    out << "cell_id,temp_c,c_rate,soc_avg,soc_min,soc_max,ah,fade_pct,replicate\n";
    for (const auto& rec : records) {
        for (const auto& p : rec.points) {
            out << rec.cell_id << ',' << fmt17(rec.temp_c) << ',' << fmt17(rec.c_rate) << ','
                << fmt17(rec.soc_avg) << ',' << fmt17(rec.soc_min) << ',' << fmt17(rec.soc_max)
                << ',' << fmt17(p.ah) << ',' << fmt17(p.fade_pct) << ',' << p.replicate << "\n";
        }
    }
    if (!out) {
        throw IoError("short write to " + path);
    }
}

std::vector<TrainingPoint> flatten(const std::vector<TrainingRecord>& records) {
    std::vector<TrainingPoint> points;
    for (const auto& rec : records) {
        // group by Ah value, preserving first-appearance order
        std::vector<std::size_t> order;
        std::map<double, std::size_t> by_ah;
        for (const auto& p : rec.points) {
            auto it = by_ah.find(p.ah);
            if (it == by_ah.end()) {
                by_ah[p.ah] = points.size();
                order.push_back(points.size());
                TrainingPoint tp;
                tp.cell_id = rec.cell_id;
                tp.temp_c = rec.temp_c;
                tp.c_rate = rec.c_rate;
                tp.soc_avg = rec.soc_avg;
                tp.soc_min = rec.soc_min;
                tp.soc_max = rec.soc_max;
                tp.ah = p.ah;
                points.push_back(std::move(tp));
            }
            points[by_ah[p.ah]].fades.push_back(p.fade_pct);
        }
    }
    return points;
}

double mean_fade(const TrainingPoint& point) {
    if (point.fades.empty()) {
        throw DegenerateData("training point has no fade measurements");
    }
    return std::accumulate(point.fades.begin(), point.fades.end(), 0.0) /
           static_cast<double>(point.fades.size());
}

SplitMode split_mode_from_name(std::string_view name) {
    if (name == "random") {
        return SplitMode::Random;
    }
    if (name == "sequential") {
        return SplitMode::Sequential;
    }
    throw ParseError("unknown split mode: " + std::string(name));
}

const char* split_mode_name(SplitMode mode) noexcept {
    return mode == SplitMode::Random ? "random" : "sequential";
}

SplitResult split(const std::vector<TrainingPoint>& points, double ratio, SplitMode mode,
                  std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DomainError("split ratio must lie in (0, 1)");
    }
    const std::size_t n = points.size();
    // Tiny nudge so a product that is an integer in exact arithmetic (e.g.
    // 0.2 * 10) does not floor one short from binary rounding.
    const auto test_n = static_cast<std::size_t>(
        std::floor((1.0 - ratio) * static_cast<double>(n) + 1e-9));
    const std::size_t train_n = n - test_n;
    if (train_n == 0 || test_n == 0) {
        throw TooFewPoints("split would leave an empty side");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (mode == SplitMode::Sequential) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return mean_fade(points[a]) < mean_fade(points[b]);
        });
    } else {
        // Fisher-Yates on a dedicated substream; fully pinned by the seed.
        RandomStream rng = RandomStream::substream(seed, 3);
        for (std::size_t i = n - 1; i > 0; --i) {
            std::size_t j = rng.bounded(i + 1);
            std::swap(idx[i], idx[j]);
        }
    }
    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < train_n; ++i) {
        in_train[idx[i]] = true;
    }
    SplitResult out;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? out.train : out.test).push_back(points[i]);
    }
    return out;
}

namespace {

// Positive root of omega*v^3 + phi*v = target (monotone for positive
// coefficients), by bisection.
double cruise_speed_for_power(double omega, double phi, double target_w) {
    if (!(target_w > 0.0)) {
        return 0.05;
    }
    double lo = 0.0;
    double hi = 1.0;
    auto pw = [&](double v) { return omega * v * v * v + phi * v; };
    while (pw(hi) < target_w) {
        hi *= 2.0;
        if (hi > 1e9) {
            throw DomainError("cruise speed solve diverged");
        }
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        (pw(mid) < target_w ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ObservationSet observations_from_points(const std::vector<TrainingPoint>& points,
                                        const ModelConfig& model_cfg,
                                        const VehicleSpec& vehicle, int cells_count) {
    if (points.empty()) {
        throw IncompleteSpec("no training points to observe");
    }
    if (cells_count < 1) {
        throw IncompleteSpec("cell count must be at least 1");
    }
    const double cells = static_cast<double>(cells_count);
    const double omega = aero_coefficient(vehicle) / cells;
    const double phi = rolling_grade_coefficient(vehicle) / cells;
    const double delta = model_cfg.priors.delta_mean;

    ObservationSet set;
    set.observations.reserve(points.size());
    for (const auto& p : points) {
        Observation o;
        o.id = p.cell_id + "@" + fmt17(p.ah);
        o.q = p.fades;
        o.t = {p.temp_c + 273.15};
        // Cycling power implied by the C-rate at nominal voltage; the
        // equivalent steady cruise keeps the wheel-power chain consistent.
        const double pb_ref = p.c_rate * model_cfg.nominal_capacity_ah * o.u_prior_mean;
        const double paux_ref = model_cfg.priors.paux_frac * pb_ref;
        const double pw_target = delta * (pb_ref - paux_ref);
        o.a = {0.0};
        o.v = {cruise_speed_for_power(omega, phi, pw_target)};
        o.grid_powers[static_cast<std::size_t>(Task::Driving)] = pb_ref;
        o.duty.ic_ref = p.c_rate;
        o.duty.ah_ref = p.ah;
        o.duty.soc_ref = p.soc_avg / 100.0;
        o.duty.soc_initial = std::clamp(p.soc_max / 100.0, 0.02, 0.98);
        set.observations.push_back(std::move(o));
    }
    return set;
}

std::vector<TrainingRecord> records_from_points(const std::vector<TrainingPoint>& points) {
    std::vector<TrainingRecord> records;
    std::map<std::string, std::size_t> index_of;
    for (const auto& p : points) {
        auto it = index_of.find(p.cell_id);
        if (it == index_of.end()) {
            index_of[p.cell_id] = records.size();
            TrainingRecord rec;
            rec.cell_id = p.cell_id;
            rec.temp_c = p.temp_c;
            rec.c_rate = p.c_rate;
            rec.soc_avg = p.soc_avg;
            rec.soc_min = p.soc_min;
            rec.soc_max = p.soc_max;
            records.push_back(std::move(rec));
            it = index_of.find(p.cell_id);
        }
        TrainingRecord& rec = records[it->second];
        for (std::size_t j = 0; j < p.fades.size(); ++j) {
            rec.points.push_back(FadePoint{p.ah, p.fades[j], static_cast<int>(j + 1)});
        }
    }
    return records;
}

std::vector<TrainingRecord> generate_synthetic_training(std::uint64_t seed,
                                                        const SyntheticTruth& truth) {
    struct CellPlan {
        const char* id;
        double temp_c, c_rate, soc_avg, soc_min, soc_max;
        int n_points;
        int last_replicates;  // replicates at the final Ah point
    };
    // Three test conditions; 82 fade rows in total (28 + 27 + 27).
    const CellPlan plans[] = {
        {"A", 35.0, 2.82, 38.5, 22.6, 50.0, 14, 2},
        {"B", 23.0, 3.00, 41.9, 32.5, 54.0, 14, 1},
        {"C", 23.0, 3.49, 53.4, 11.4, 100.0, 14, 1},
    };

    ParameterSet p;
    p.alpha = truth.alpha;
    p.beta = truth.beta;
    p.ea = truth.ea;
    p.eta = truth.eta;
    p.zeta = truth.zeta;
    p.epsilon = truth.epsilon;

    RandomStream noise = RandomStream::substream(seed, 5);
    std::vector<TrainingRecord> records;
    for (const auto& plan : plans) {
        TrainingRecord rec;
        rec.cell_id = plan.id;
        rec.temp_c = plan.temp_c;
        rec.c_rate = plan.c_rate;
        rec.soc_avg = plan.soc_avg;
        rec.soc_min = plan.soc_min;
        rec.soc_max = plan.soc_max;
        const double t_k = plan.temp_c + 273.15;
        for (int i = 0; i < plan.n_points; ++i) {
            const double frac = static_cast<double>(i + 1) / plan.n_points;
            const double ah = 150.0 + (4000.0 - 150.0) * frac;
            const double f = fade_mean_f(p, plan.soc_avg / 100.0, plan.c_rate, t_k, ah);
            const int reps = (i + 1 == plan.n_points) ? plan.last_replicates : 2;
            for (int j = 0; j < reps; ++j) {
                double fade = f * (1.0 + truth.noise_rel * noise.normal());
                rec.points.push_back(FadePoint{ah, std::max(fade, 0.01), j + 1});
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace battbayes
