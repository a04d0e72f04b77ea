#include "lanc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lanc/error.hpp"
#include "lanc/rlnc.hpp"

namespace lanc::cli {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void invalid(std::string_view key, std::string_view value, std::string_view want) {
  fail(ErrorCode::ValidationError,
       std::string(key) + ": expected " + std::string(want) + ", got '" + std::string(value) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, std::string_view want) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) invalid(key, value, want);
  return out;
}

long long parse_int(std::string_view key, std::string_view value, long long min) {
  auto v = parse_number<long long>(key, value, "an integer");
  if (v < min) invalid(key, value, "an integer >= " + std::to_string(min));
  return v;
}

double parse_real(std::string_view key, std::string_view value, double lo, double hi) {
  auto v = parse_number<double>(key, value, "a number");
  if (!(v >= lo && v <= hi)) {
    invalid(key, value, "a number in [" + format_double(lo) + ", " + format_double(hi) + "]");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  invalid(key, value, "true or false");
}

using Setter = std::function<void(sim::SimConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const sim::SimConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"peers",
       [](auto& c, auto k, auto v) { c.peers = static_cast<std::size_t>(parse_int(k, v, 1)); },
       [](const auto& c) { return std::to_string(c.peers); }},
      {"blocks",
       [](auto& c, auto k, auto v) { c.blocks = static_cast<std::size_t>(parse_int(k, v, 1)); },
       [](const auto& c) { return std::to_string(c.blocks); }},
      {"block_size",
       [](auto& c, auto k, auto v) {
         c.block_size = static_cast<std::size_t>(parse_int(k, v, 1));
       },
       [](const auto& c) { return std::to_string(c.block_size); }},
      {"avg_degree",
       [](auto& c, auto k, auto v) { c.avg_degree = static_cast<int>(parse_int(k, v, 1)); },
       [](const auto& c) { return std::to_string(c.avg_degree); }},
      {"intra_fraction",
       [](auto& c, auto k, auto v) { c.intra_fraction = parse_real(k, v, 0, 1); },
       [](const auto& c) { return format_double(c.intra_fraction); }},
      {"deploy_fraction",
       [](auto& c, auto k, auto v) { c.deploy_fraction = parse_real(k, v, 0, 1); },
       [](const auto& c) { return format_double(c.deploy_fraction); }},
      {"server_locality",
       [](auto& c, auto k, auto v) { c.server_locality = parse_bool(k, v); },
       [](const auto& c) { return std::string(c.server_locality ? "true" : "false"); }},
      {"policy",
       [](auto& c, auto k, auto v) {
         auto s = policy::parse_scheme(v);
         if (!s) invalid(k, v, "Random, LA_LR, P_LANC, LANC, LANC_Random or LANC_Informed");
         c.policy.scheme = *s;
       },
       [](const auto& c) { return std::string(policy::to_string(c.policy.scheme)); }},
      {"encoding_density",
       [](auto& c, auto k, auto v) {
         if (v == "all" || v == "All") {
           c.policy.density.reset();
         } else {
           c.policy.density = static_cast<int>(parse_int(k, v, 1));
         }
       },
       [](const auto& c) {
         return c.policy.density ? std::to_string(*c.policy.density) : std::string("all");
       }},
      {"capacity_up",
       [](auto& c, auto k, auto v) { c.capacity_up = static_cast<int>(parse_int(k, v, 1)); },
       [](const auto& c) { return std::to_string(c.capacity_up); }},
      {"capacity_down",
       [](auto& c, auto k, auto v) { c.capacity_down = static_cast<int>(parse_int(k, v, 1)); },
       [](const auto& c) { return std::to_string(c.capacity_down); }},
      {"hetero_fraction",
       [](auto& c, auto k, auto v) { c.hetero_fraction = parse_real(k, v, 0, 1); },
       [](const auto& c) { return format_double(c.hetero_fraction); }},
      {"hetero_multiplier",
       [](auto& c, auto k, auto v) {
         c.hetero_multiplier = static_cast<int>(parse_int(k, v, 1));
       },
       [](const auto& c) { return std::to_string(c.hetero_multiplier); }},
      {"server_high_capacity",
       [](auto& c, auto k, auto v) { c.server_high_capacity = parse_bool(k, v); },
       [](const auto& c) { return std::string(c.server_high_capacity ? "true" : "false"); }},
      {"tft_threshold",
       [](auto& c, auto k, auto v) {
         if (v == "disabled") {
           c.policy.tft_threshold.reset();
         } else {
           c.policy.tft_threshold = static_cast<int>(parse_int(k, v, 0));
         }
       },
       [](const auto& c) {
         return c.policy.tft_threshold ? std::to_string(*c.policy.tft_threshold)
                                       : std::string("disabled");
       }},
      {"scenario",
       [](auto& c, auto k, auto v) {
         auto s = sim::parse_scenario(v);
         if (!s) invalid(k, v, "Static, A, B, C or D");
         c.scenario = *s;
       },
       [](const auto& c) { return std::string(sim::to_string(c.scenario)); }},
      {"underlay", [](auto& c, auto, auto v) { c.underlay = std::string(v); },
       [](const auto& c) { return c.underlay; }},
      {"server_as",
       [](auto& c, auto k, auto v) {
         if (v == "auto") {
           c.server_as.reset();
         } else {
           c.server_as = parse_number<long>(k, v, "an AS label or auto");
         }
       },
       [](const auto& c) {
         return c.server_as ? std::to_string(*c.server_as) : std::string("auto");
       }},
      {"placement",
       [](auto& c, auto k, auto v) {
         if (v == "proportional") {
           c.placement = net::Placement::Proportional;
         } else if (v == "uniform") {
           c.placement = net::Placement::Uniform;
         } else {
           invalid(k, v, "proportional or uniform");
         }
       },
       [](const auto& c) {
         return std::string(c.placement == net::Placement::Uniform ? "uniform" : "proportional");
       }},
      {"seed",
       [](auto& c, auto k, auto v) { c.seed = parse_number<std::uint64_t>(k, v, "an unsigned integer"); },
       [](const auto& c) { return std::to_string(c.seed); }},
  };
  return table;
}

const Key* find_key(std::string_view name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

void validate_as_field_error(const sim::SimConfig& config) {
  try {
    config.validate();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    std::string what = e.what();
    auto pos = what.find(": ");
    fail(ErrorCode::ValidationError, pos == std::string::npos ? what : what.substr(pos + 2));
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(std::string(trim(cell)));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads a header-checked CSV; `row` receives the cells of each data line.
void read_csv(std::istream& in, std::string_view header, std::size_t columns,
              const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    fail(ErrorCode::ParseError, "line 1: expected header '" + std::string(header) + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != columns) {
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                      std::to_string(columns) + " columns");
    }
    row(cells, lineno);
  }
}

template <typename T>
T cell(const std::string& s, std::size_t lineno) {
  T out{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad value '" + s + "'");
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace

void apply_setting(sim::SimConfig& config, std::string_view key, std::string_view value) {
  const Key* k = find_key(key);
  if (!k) fail(ErrorCode::ValidationError, "unknown parameter '" + std::string(key) + "'");
  k->set(config, key, value);
}

std::string setting_value(const sim::SimConfig& config, std::string_view key) {
  const Key* k = find_key(key);
  if (!k) fail(ErrorCode::ValidationError, "unknown parameter '" + std::string(key) + "'");
  return k->get(config);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.push_back(k.name);
    return out;
  }();
  return names;
}

sim::SimConfig parse_config(std::istream& in) {
  sim::SimConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = trim(std::string_view(line).substr(0, line.find('#')));
    if (text.empty()) continue;
    auto eq = text.find('=');
    std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) fail(ErrorCode::ParseError, where + "expected key = value");
    auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (!find_key(key)) fail(ErrorCode::ParseError, where + "unknown key '" + std::string(key) + "'");
    if (value.empty()) fail(ErrorCode::ParseError, where + "missing value for " + std::string(key));
    apply_setting(config, key, value);
  }
  validate_as_field_error(config);
  return config;
}

sim::SimConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
  return parse_config(in);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_temporal_csv(std::ostream& out, const std::vector<metrics::TemporalSlot>& series) {
  out << "slot,transfers,weighted_transfers\n";
  for (const auto& s : series) {
    out << s.slot << ',' << s.transfers << ',' << s.weighted_transfers << '\n';
  }
}

std::vector<metrics::TemporalSlot> read_temporal_csv(std::istream& in) {
  std::vector<metrics::TemporalSlot> out;
  read_csv(in, "slot,transfers,weighted_transfers", 3, [&](const auto& c, std::size_t n) {
    out.push_back({cell<std::size_t>(c[0], n), cell<std::uint64_t>(c[1], n),
                   cell<std::uint64_t>(c[2], n)});
  });
  return out;
}

std::vector<HistogramRow> histogram_rows(const sim::TransferTrace& trace) {
  std::vector<HistogramRow> rows;
  for (const auto& p : trace.peers) {
    if (p.server) continue;
    rows.push_back({p.id, p.asn, p.uploaded, p.finish_time.value_or(-1.0)});
  }
  return rows;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
  out << "peer_id,asn,uploaded_blocks,finish_time\n";
  for (const auto& r : rows) {
    out << r.peer_id << ',' << r.asn << ',' << r.uploaded_blocks << ','
        << format_double(r.finish_time) << '\n';
  }
}

std::vector<HistogramRow> read_histogram_csv(std::istream& in) {
  std::vector<HistogramRow> out;
  read_csv(in, "peer_id,asn,uploaded_blocks,finish_time", 4, [&](const auto& c, std::size_t n) {
    out.push_back({cell<std::uint32_t>(c[0], n), cell<long>(c[1], n),
                   cell<std::uint64_t>(c[2], n), cell<double>(c[3], n)});
  });
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<sim::TransferRecord>& transfers) {
  out << "request_time,time,src,dst,hops,dependent\n";
  for (const auto& t : transfers) {
    out << format_double(t.request_time) << ',' << format_double(t.time) << ',' << t.src << ','
        << t.dst << ',' << t.hops << ',' << (t.dependent ? 1 : 0) << '\n';
  }
}

std::vector<sim::TransferRecord> read_trace_csv(std::istream& in) {
  std::vector<sim::TransferRecord> out;
  read_csv(in, "request_time,time,src,dst,hops,dependent", 6, [&](const auto& c, std::size_t n) {
    auto dep = cell<int>(c[5], n);
    if (dep != 0 && dep != 1) fail(ErrorCode::ParseError, "line " + std::to_string(n) + ": dependent must be 0 or 1");
    out.push_back({cell<double>(c[0], n), cell<double>(c[1], n), cell<std::uint32_t>(c[2], n),
                   cell<std::uint32_t>(c[3], n), cell<int>(c[4], n), dep == 1});
  });
  return out;
}

std::string report_json(const sim::SimConfig& config, const metrics::MetricsReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json cfg;
  for (const auto& k : keys()) cfg[k.name] = k.get(config);
  doc["config"] = cfg;
  doc["seed"] = config.seed;
  nlohmann::ordered_json m;
  m["idtr"] = report.idtr;
  m["avg_dt"] = report.avg_dt ? nlohmann::ordered_json(*report.avg_dt) : nullptr;
  m["max_dt"] = report.max_dt ? nlohmann::ordered_json(*report.max_dt) : nullptr;
  m["unfinished_count"] = report.unfinished_count;
  m["unfinished_fraction"] = report.unfinished_fraction;
  m["total_interdomain_block_hops"] = report.total_interdomain_block_hops;
  m["dependent_block_count"] = report.dependent_block_count;
  m["total_transfers"] = report.total_transfers;
  m["upload_cov"] = report.upload_histogram.cov;
  doc["metrics"] = m;
  return doc.dump(2) + "\n";
}

void run_command(const sim::SimConfig& config, const std::filesystem::path& out_dir) {
  auto result = sim::run(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  write_text(out_dir / "report.json", report_json(config, result.report));
  std::ostringstream temporal, histogram, trace;
  write_temporal_csv(temporal, result.report.temporal_series);
  write_histogram_csv(histogram, histogram_rows(result.trace));
  write_trace_csv(trace, result.trace.transfers);
  write_text(out_dir / "temporal.csv", temporal.str());
  write_text(out_dir / "histogram.csv", histogram.str());
  write_text(out_dir / "trace.csv", trace.str());
}

void ExperimentPlan::validate() const {
  if (!find_key(param)) fail(ErrorCode::ValidationError, "unknown sweep parameter '" + param + "'");
  if (values.empty()) fail(ErrorCode::ValidationError, "values: empty list");
  if (seeds.empty()) fail(ErrorCode::ValidationError, "seeds: empty list");
  for (const auto& p : policies) {
    if (!policy::parse_scheme(p)) fail(ErrorCode::ValidationError, "policies: unknown '" + p + "'");
  }
}

const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> names = {
      "idtr", "avg_dt", "max_dt", "unfinished_fraction", "total_transfers", "upload_cov"};
  return names;
}

std::optional<double> metric_value(const metrics::MetricsReport& r, std::string_view metric) {
  if (metric == "idtr") return r.idtr;
  if (metric == "avg_dt") return r.avg_dt;
  if (metric == "max_dt") return r.max_dt;
  if (metric == "unfinished_fraction") return r.unfinished_fraction;
  if (metric == "total_transfers") return static_cast<double>(r.total_transfers);
  if (metric == "upload_cov") return r.upload_histogram.cov;
  fail(ErrorCode::ValidationError, "unknown metric '" + std::string(metric) + "'");
}

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0, 0};
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0};
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

std::vector<AggregateRow> sweep_command(const ExperimentPlan& plan) {
  plan.validate();
  std::error_code ec;
  std::filesystem::create_directories(plan.out_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + plan.out_dir.string() + ": " + ec.message());

  std::ofstream runs(plan.out_dir / "runs.csv");
  if (!runs) fail(ErrorCode::IoError, "cannot write " + (plan.out_dir / "runs.csv").string());
  runs << "param,value,policy,seed";
  for (const auto& m : sweep_metrics()) runs << ',' << m;
  runs << '\n' << std::flush;

  std::vector<std::string> policies = plan.policies;
  if (policies.empty()) policies.push_back(std::string(policy::to_string(plan.base.policy.scheme)));

  std::vector<AggregateRow> rows;
  for (const auto& value : plan.values) {
    for (const auto& pol : policies) {
      std::map<std::string, std::vector<double>> samples;
      for (auto seed : plan.seeds) {
        sim::SimConfig config = plan.base;
        apply_setting(config, plan.param, value);
        apply_setting(config, "policy", pol);
        config.seed = seed;
        validate_as_field_error(config);
        auto result = sim::run(config);

        runs << plan.param << ',' << value << ',' << pol << ',' << seed;
        for (const auto& m : sweep_metrics()) {
          auto v = metric_value(result.report, m);
          runs << ',';
          if (v) {
            runs << format_double(*v);
            samples[m].push_back(*v);
          }
        }
        runs << '\n' << std::flush;
      }
      for (const auto& m : sweep_metrics()) {
        auto [mean, sd] = mean_stddev(samples[m]);
        rows.push_back({plan.param, value, pol, m, mean, sd, samples[m].size()});
      }
    }
  }

  std::ostringstream agg;
  write_aggregate_csv(agg, rows);
  write_text(plan.out_dir / "aggregate.csv", agg.str());
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "param,value,policy,metric,mean,stddev,runs\n";
  for (const auto& r : rows) {
    out << r.param << ',' << r.value << ',' << r.policy << ',' << r.metric << ','
        << format_double(r.mean) << ',' << format_double(r.stddev) << ',' << r.runs << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::vector<AggregateRow> out;
  read_csv(in, "param,value,policy,metric,mean,stddev,runs", 7, [&](const auto& c, std::size_t n) {
    out.push_back({c[0], c[1], c[2], c[3], cell<double>(c[4], n), cell<double>(c[5], n),
                   cell<std::size_t>(c[6], n)});
  });
  return out;
}

BenchResult bench_command(std::size_t k, std::size_t n, std::size_t m, double seconds) {
  if (k == 0 || n == 0 || m == 0 || !(seconds > 0)) {
    fail(ErrorCode::ValidationError, "bench parameters must be positive");
  }
  m = std::min(m, n);
  Rng rng(derive_seed(1, k * 1000003 + n * 1009 + m));
  std::vector<rlnc::CodedBlock> buffer(n);
  for (auto& b : buffer) {
    b.coeffs.resize(n);
    b.payload.resize(k);
    for (auto& c : b.coeffs) c = rng.byte();
    for (auto& p : b.payload) p = rng.byte();
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  BenchResult result;
  auto start = std::chrono::steady_clock::now();
  double elapsed = 0;
  std::uint64_t sink = 0;
  do {
    for (std::size_t i = 0; i < m; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
    auto coeffs = rlnc::draw_local_coeffs(m, rng);
    auto block = rlnc::encode(buffer, std::span(order).first(m), coeffs.values);
    sink += block.payload[0];
    ++result.blocks_encoded;
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  } while (elapsed < seconds);
  (void)sink;

  result.bytes_per_second = static_cast<double>(result.blocks_encoded * k) / elapsed;
  auto ops = rlnc::op_count_per_byte(static_cast<std::int64_t>(m), static_cast<std::int64_t>(n),
                                     static_cast<std::int64_t>(k));
  result.mults_per_byte = ops.mults_per_byte.value();
  return result;
}

}  // namespace lanc::cli
