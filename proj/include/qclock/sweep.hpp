#pragma once

#include <algorithm>
#include <exception>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qclock/bounds.hpp"
#include "qclock/io.hpp"

namespace qclock {

enum class Experiment { copy_bound, monotonicity };
enum class ClockKind { random, equal_superposition };

/// Batch configuration. Sample s uses sub-seed seed + s, input dimension
/// dims_in[s % size] and Kraus rank kraus_ranks[s % size]; each sample is
/// evaluated once per energy scale with every Hamiltonian multiplied by it.
struct SweepConfig {
  Experiment experiment = Experiment::copy_bound;
  ClockKind clock = ClockKind::random;
  std::vector<Index> dims_in{2};
  Index dim_out1 = 2;  // monotonicity: the output dimension
  Index dim_out2 = 2;  // copy_bound only
  std::vector<Index> kraus_ranks{2};
  std::size_t samples = 100;
  Seed seed = 0;
  std::vector<double> energy_scales{1.0};
  unsigned threads = 1;
};

struct SweepRow {
  std::size_t sample_id = 0;
  Seed seed = 0;
  Index dim_in = 0;
  Index dim_out1 = 0;
  Index dim_out2 = 0;
  double f_in = 0.0;
  double f1 = 0.0;
  std::optional<double> f2;
  std::optional<double> e2;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
  double covariance_residual = 0.0;
  Index kraus_rank = 0;
  double energy_scale = 1.0;
  std::optional<double> e2_unshifted;
};

struct SweepResult {
  Experiment experiment = Experiment::copy_bound;
  std::vector<SweepRow> rows;
  double min_margin = kInfinity;
  bool all_satisfied = true;
};

[[nodiscard]] inline std::string to_string(Experiment e) {
  return e == Experiment::copy_bound ? "copy_bound" : "monotonicity";
}

namespace detail {

[[nodiscard]] inline std::vector<Index> index_list(const io::Json& j, const char* field) {
  std::vector<Index> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<Index>());
  } else if (j.is_array() && !j.empty()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw Error(ErrorCode::config, "expected integers", field);
      out.push_back(v.get<Index>());
    }
  } else {
    throw Error(ErrorCode::config, "expected an integer or a non-empty integer array", field);
  }
  for (Index v : out)
    if (v < 1) throw Error(ErrorCode::config, "values must be positive", field);
  return out;
}

[[nodiscard]] inline std::vector<double> ladder_energies(Index dim) {
  std::vector<double> e(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) e[static_cast<std::size_t>(k)] = static_cast<double>(k);
  return e;
}

}  // namespace detail

/// Parses the sweep config document. `seed_override`, when given, replaces the
/// document's seed. Field errors name the offending field.
[[nodiscard]] inline SweepConfig sweep_config_from_json(const io::Json& j, std::optional<Seed> seed_override = {}) {
  if (!j.is_object()) throw Error(ErrorCode::config, "sweep config must be a JSON object", "<root>");
  static const std::set<std::string> known{"experiment", "clock",       "dim_in",  "dim_out",        "dim_out1",
                                           "dim_out2",   "kraus_ranks", "samples", "seed",           "energy_scales",
                                           "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::config, "unknown config field", key);
  }
  SweepConfig c;
  try {
    if (!j.contains("experiment")) throw Error(ErrorCode::config, "missing field", "experiment");
    const auto kind = j.at("experiment").get<std::string>();
    if (kind == "copy_bound") {
      c.experiment = Experiment::copy_bound;
    } else if (kind == "monotonicity") {
      c.experiment = Experiment::monotonicity;
    } else {
      throw Error(ErrorCode::config, "experiment must be copy_bound or monotonicity", "experiment");
    }
    if (j.contains("clock")) {
      const auto clock = j.at("clock").get<std::string>();
      if (clock == "random") {
        c.clock = ClockKind::random;
      } else if (clock == "equal_superposition") {
        c.clock = ClockKind::equal_superposition;
      } else {
        throw Error(ErrorCode::config, "clock must be random or equal_superposition", "clock");
      }
    }
    if (j.contains("dim_in")) c.dims_in = detail::index_list(j.at("dim_in"), "dim_in");
    if (c.experiment == Experiment::monotonicity) {
      if (j.contains("dim_out")) c.dim_out1 = detail::index_list(j.at("dim_out"), "dim_out").front();
      c.dim_out2 = 1;
    } else {
      if (j.contains("dim_out1")) c.dim_out1 = detail::index_list(j.at("dim_out1"), "dim_out1").front();
      if (j.contains("dim_out2")) c.dim_out2 = detail::index_list(j.at("dim_out2"), "dim_out2").front();
    }
    if (j.contains("kraus_ranks")) c.kraus_ranks = detail::index_list(j.at("kraus_ranks"), "kraus_ranks");
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      if (!s.is_number_integer() || s.get<long long>() < 1) {
        throw Error(ErrorCode::config, "samples must be a positive integer", "samples");
      }
      c.samples = s.get<std::size_t>();
    }
    if (j.contains("seed")) {
      const auto& seed = j.at("seed");
      if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        throw Error(ErrorCode::config, "seed must be a nonnegative integer", "seed");
      }
      c.seed = seed.get<Seed>();
    }
    if (j.contains("energy_scales")) {
      const auto& e = j.at("energy_scales");
      if (!e.is_array() || e.empty()) throw Error(ErrorCode::config, "energy_scales must be a non-empty array", "energy_scales");
      c.energy_scales.clear();
      for (const auto& v : e) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
          throw Error(ErrorCode::config, "energy scales must be positive numbers", "energy_scales");
        }
        c.energy_scales.push_back(v.get<double>());
      }
    }
    if (j.contains("threads")) {
      const auto& t = j.at("threads");
      if (!t.is_number_integer() || t.get<long long>() < 1) throw Error(ErrorCode::config, "threads must be >= 1", "threads");
      c.threads = t.get<unsigned>();
    }
  } catch (const io::Json::exception& e) {
    throw Error(ErrorCode::config, "malformed config field", e.what());
  }
  if (seed_override) c.seed = *seed_override;
  const Index dout = c.dim_out1 * c.dim_out2;
  for (Index din : c.dims_in)
    for (Index r : c.kraus_ranks)
      if (r * dout < din) {
        throw Error(ErrorCode::config, "kraus rank too small for an isometry at some dim_in", "kraus_ranks");
      }
  return c;
}

namespace detail {

[[nodiscard]] inline std::vector<SweepRow> run_sample(const SweepConfig& c, std::size_t s) {
  const Seed sub = c.seed + static_cast<Seed>(s);
  const Index din = c.dims_in[s % c.dims_in.size()];
  const Index rank = c.kraus_ranks[s % c.kraus_ranks.size()];

  std::optional<ClockSystem> clock;
  if (c.clock == ClockKind::equal_superposition) {
    clock.emplace(equal_superposition_clock(din, 1.0));
  } else {
    const Index state_rank = 1 + static_cast<Index>(derive_seed(sub, 1) % static_cast<Seed>(din));
    const auto spectrum = ladder_energies(din);
    clock.emplace(random_density(din, state_rank, derive_seed(sub, 2)),
                  random_hamiltonian_with_spectrum(spectrum, derive_seed(sub, 3)));
  }

  std::vector<SweepRow> rows;
  if (c.experiment == Experiment::copy_bound) {
    const Hamiltonian h1 = Hamiltonian::ladder(c.dim_out1);
    const Hamiltonian h2 = Hamiltonian::ladder(c.dim_out2);
    const Hamiltonian ht = total_hamiltonian(h1, h2);
    const QuantumChannel channel = covariant_twirl(
        random_channel(din, ht.dim(), rank, derive_seed(sub, 5)), clock->hamiltonian(), ht);
    for (double scale : c.energy_scales) {
      const ClockSystem scaled(clock->state(), clock->hamiltonian().scaled(scale));
      const CopyBoundReport r = copy_bound_check(scaled, channel, h1.scaled(scale), h2.scaled(scale));
      SweepRow row;
      row.sample_id = s;
      row.seed = sub;
      row.dim_in = din;
      row.dim_out1 = c.dim_out1;
      row.dim_out2 = c.dim_out2;
      row.f_in = r.f_in;
      row.f1 = r.f1;
      row.f2 = r.f2;
      row.e2 = r.e2;
      row.lhs = r.lhs;
      row.rhs = r.rhs;
      row.margin = r.margin;
      row.satisfied = r.satisfied;
      row.covariance_residual = r.covariance_residual;
      row.kraus_rank = rank;
      row.energy_scale = scale;
      row.e2_unshifted = r.e2_unshifted;
      rows.push_back(row);
    }
  } else {
    const Hamiltonian h_out = random_hamiltonian_with_spectrum(ladder_energies(c.dim_out1), derive_seed(sub, 4));
    const QuantumChannel channel = covariant_twirl(
        random_channel(din, c.dim_out1, rank, derive_seed(sub, 5)), clock->hamiltonian(), h_out);
    for (double scale : c.energy_scales) {
      const ClockSystem scaled(clock->state(), clock->hamiltonian().scaled(scale));
      const MonotonicityReport r = monotonicity_check(scaled, channel, h_out.scaled(scale));
      SweepRow row;
      row.sample_id = s;
      row.seed = sub;
      row.dim_in = din;
      row.dim_out1 = c.dim_out1;
      row.dim_out2 = 1;
      row.f_in = r.f_in;
      row.f1 = r.f_out;
      row.lhs = r.f_out;
      row.rhs = r.f_in;
      row.margin = r.f_in - r.f_out;
      row.satisfied = r.holds;
      row.covariance_residual = r.covariance_residual;
      row.kraus_rank = rank;
      row.energy_scale = scale;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace detail

/// Runs every sample; with threads > 1 samples are distributed round-robin
/// over workers and reassembled in sample order, so output matches the
/// sequential run exactly.
[[nodiscard]] inline SweepResult run_sweep(const SweepConfig& c) {
  std::vector<std::vector<SweepRow>> per_sample(c.samples);
  const unsigned workers = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(c.samples)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t s = w; s < c.samples; s += workers) per_sample[s] = detail::run_sample(c, s);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult result;
  result.experiment = c.experiment;
  for (auto& rows : per_sample)
    for (auto& row : rows) {
      result.min_margin = std::min(result.min_margin, row.margin);
      result.all_satisfied = result.all_satisfied && row.satisfied;
      result.rows.push_back(std::move(row));
    }
  return result;
}

inline constexpr const char* kSweepCsvHeader =
    "sample_id,seed,dim_in,dim_out1,dim_out2,f_in,f1,f2,e2,lhs,rhs,margin,satisfied,covariance_residual,"
    "kraus_rank,energy_scale,e2_unshifted";

[[nodiscard]] inline std::string to_csv(const SweepResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& row : r.rows) {
    os << row.sample_id << ',' << row.seed << ',' << row.dim_in << ',' << row.dim_out1 << ',' << row.dim_out2 << ','
       << io::format_double(row.f_in) << ',' << io::format_double(row.f1) << ',' << opt(row.f2) << ',' << opt(row.e2)
       << ',' << io::format_double(row.lhs) << ',' << io::format_double(row.rhs) << ','
       << io::format_double(row.margin) << ',' << flag(row.satisfied) << ','
       << io::format_double(row.covariance_residual) << ',' << row.kraus_rank << ','
       << io::format_double(row.energy_scale) << ',' << opt(row.e2_unshifted) << '\n';
  }
  os << "summary,,,,,,,,,,," << io::format_double(r.min_margin) << ',' << flag(r.all_satisfied) << ",,,,\n";
  return os.str();
}

[[nodiscard]] inline io::Json to_json(const SweepResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? io::number(*v) : io::Json(nullptr); };
  io::Json rows = io::Json::array();
  for (const SweepRow& row : r.rows) {
    rows.push_back(io::Json{{"sample_id", row.sample_id},
                            {"seed", row.seed},
                            {"dim_in", row.dim_in},
                            {"dim_out1", row.dim_out1},
                            {"dim_out2", row.dim_out2},
                            {"f_in", row.f_in},
                            {"f1", row.f1},
                            {"f2", opt(row.f2)},
                            {"e2", opt(row.e2)},
                            {"lhs", io::number(row.lhs)},
                            {"rhs", io::number(row.rhs)},
                            {"margin", io::number(row.margin)},
                            {"satisfied", row.satisfied},
                            {"covariance_residual", row.covariance_residual},
                            {"kraus_rank", row.kraus_rank},
                            {"energy_scale", row.energy_scale},
                            {"e2_unshifted", opt(row.e2_unshifted)}});
  }
  return io::Json{{"experiment", to_string(r.experiment)},
                  {"energy_gauge", kEnergyGauge},
                  {"rows", std::move(rows)},
                  {"summary", {{"rows", r.rows.size()}, {"min_margin", io::number(r.min_margin)}, {"all_satisfied", r.all_satisfied}}}};
}

}  // namespace qclock
