#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "battbayes/posterior.hpp"
#include "battbayes/preprocess.hpp"
#include "battbayes/sampler.hpp"

namespace battbayes {

// %.17g — shortest text that round-trips a double exactly.
std::string fmt_full(double x);

// Chain record: '#'-prefixed header (variable, family, seed, burn_in_index,
// accepted, proposed) followed by one sample per line at full precision.
void write_chain(const std::string& path, const Chain& chain);
Chain read_chain(const std::string& path);

// Writes every chain under `dir` plus an index.csv naming the files.
void write_chain_set(const std::string& dir, const std::map<std::string, Chain>& chains);
std::map<std::string, Chain> read_chain_set(const std::string& dir);

// Summary CSV: variable,family,mean,sd,ci_low,ci_high.
void write_summaries(const std::string& path, const std::vector<PosteriorSummary>& rows);
std::vector<PosteriorSummary> read_summaries(const std::string& path);

// Time-series CSV: t_s,value. The sample period is recovered from the first
// two timestamps (1 s for single-row files).
void write_time_series(const std::string& path, const TimeSeries& series);
TimeSeries read_time_series(const std::string& path);

// Density table CSV: x,density.
void write_pdf_curve(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve);

}  // namespace battbayes
