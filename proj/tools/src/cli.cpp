#include "packsell_tools/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "packsell/backend.hpp"
#include "packsell/container.hpp"
#include "packsell/errors.hpp"
#include "packsell/matrix.hpp"
#include "packsell/metrics.hpp"
#include "packsell/packsell.hpp"
#include "packsell/parallel.hpp"
#include "packsell/solvers.hpp"
#include "packsell/stencil.hpp"

namespace packsell::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

/// Thrown for flag values that pass CLI11's checks but are still invalid.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t parse_count(std::string_view s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("invalid " + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find_first_of(seps, pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

json base_report(std::string_view command) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["threads"] = num_threads();
  return j;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

CsrMatrix load_csr(const std::string& path) {
  if (is_container_file(path)) throw UsageError("'" + path + "' is a container; a Matrix Market file is needed");
  return to_csr(load_matrix_market_file(path));
}

CsrMatrix apply_scaling(const CsrMatrix& a, const std::string& scale) {
  if (scale == "row") return row_sum_scale(a);
  if (scale == "sym") return sym_diag_scale(a);
  return a;
}

json counts_json(const PackSellMatrix& m, const Footprint& f) {
  json j;
  j["nnz"] = m.counts().nnz_real;
  j["n_dummy"] = m.counts().n_dummy;
  j["n_padding"] = m.counts().n_padding;
  j["stored"] = m.stored();
  j["k_left"] = m.k_left();
  j["pack_bits"] = f.pack_bits;
  j["sell_equiv_bits"] = f.sell_equiv_bits;
  j["footprint_ratio"] = f.ratio;
  return j;
}

/// Word layout from --codec/--w/--d; unset sizes take the codec defaults.
PackFormat format_from_flags(const std::string& codec, std::optional<unsigned> w, std::optional<unsigned> d) {
  PackFormat f;
  if (codec == "fp16") {
    f = PackFormat::fp16();
  } else if (codec == "e8my") {
    f = PackFormat::e8m(20);
  } else {
    f = PackFormat::fp32_lossless();
  }
  if (w) f.word_bits = *w;
  if (d) {
    f.delta_bits = *d;
  } else if (w && codec == "fp16") {
    f.delta_bits = *w - 17;
  } else if (w && codec == "fp32") {
    f.delta_bits = *w - 33;
  }
  if (!f.valid()) {
    throw UsageError("invalid word layout for codec " + codec + ": W=" + std::to_string(f.word_bits) +
                     " D=" + std::to_string(f.delta_bits));
  }
  return f;
}

struct LayoutFlags {
  std::size_t c = 32;
  std::size_t sigma = 256;
  std::string mode = "implicit";
};

void add_layout_flags(CLI::App* cmd, LayoutFlags& l) {
  cmd->add_option("--c", l.c, "Slice height C")->check(CLI::Range(std::size_t{1}, std::size_t{65536}));
  cmd->add_option("--sigma", l.sigma, "Sorting block size (multiple of C)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{65536}));
  cmd->add_option("--mode", l.mode, "Row order: none, explicit, implicit")
      ->check(CLI::IsMember({"none", "explicit", "implicit"}));
}

void validate_layout(const LayoutFlags& l) {
  if (l.mode != "none" && l.sigma % l.c != 0) throw UsageError("--sigma must be a multiple of --c");
}

// ---- info -------------------------------------------------------------

struct InfoFlags {
  std::string path;
  bool json = false;
};

int cmd_info(const InfoFlags& f, std::ostream& out) {
  if (is_container_file(f.path)) {
    const PackSellMatrix m = read_container_file(f.path);
    const CsrMatrix stored = decode_matrix(m);
    json j = base_report("info");
    j["kind"] = "container";
    j["n_rows"] = m.rows();
    j["n_cols"] = m.cols();
    j["format"] = m.format().name();
    j["word_bits"] = m.format().word_bits;
    j["delta_bits"] = m.format().delta_bits;
    j["slice_size"] = m.slice_size();
    j["sigma"] = m.sigma();
    j["mode"] = to_string(m.order());
    j["counts"] = counts_json(m, footprint_bits(m, stored));
    if (f.json) {
      emit(out, j);
    } else {
      out << "container " << f.path << '\n';
      out << "  size        " << m.rows() << " x " << m.cols() << '\n';
      out << "  format      " << m.format().name() << " (W=" << m.format().word_bits << ", D=" << m.format().delta_bits
          << ")\n";
      out << "  layout      C=" << m.slice_size() << " sigma=" << m.sigma() << " mode=" << to_string(m.order()) << '\n';
      out << "  nnz         " << m.counts().nnz_real << '\n';
      out << "  dummies     " << m.counts().n_dummy << '\n';
      out << "  padding     " << m.counts().n_padding << '\n';
    }
    return kOk;
  }

  const CsrMatrix a = load_csr(f.path);
  const MatrixStats s = compute_stats(a);
  const bool symmetric = is_symmetric(a);
  if (f.json) {
    json j = base_report("info");
    j["kind"] = "matrix_market";
    j["n_rows"] = s.n_rows;
    j["n_cols"] = s.n_cols;
    j["nnz"] = s.nnz;
    j["rsd"] = s.rsd;
    j["lower_bandwidth"] = s.lower_bandwidth;
    j["upper_bandwidth"] = s.upper_bandwidth;
    j["nnz_per_row_min"] = s.nnz_per_row_min;
    j["nnz_per_row_max"] = s.nnz_per_row_max;
    j["nnz_per_row_mean"] = s.nnz_per_row_mean;
    j["symmetric"] = symmetric;
    emit(out, j);
  } else {
    out << "matrix " << f.path << '\n';
    out << "  size        " << s.n_rows << " x " << s.n_cols << '\n';
    out << "  nnz         " << s.nnz << '\n';
    out << "  rsd         " << s.rsd << '\n';
    out << "  bandwidth   lower " << s.lower_bandwidth << ", upper " << s.upper_bandwidth << '\n';
    out << "  nnz/row     min " << s.nnz_per_row_min << ", max " << s.nnz_per_row_max << ", mean "
        << s.nnz_per_row_mean << '\n';
    out << "  symmetric   " << (symmetric ? "yes" : "no") << '\n';
  }
  return kOk;
}

// ---- convert ----------------------------------------------------------

struct ConvertFlags {
  std::string input;
  std::string output;
  std::string codec = "fp16";
  std::optional<unsigned> w;
  std::optional<unsigned> d;
  LayoutFlags layout;
  std::string scale = "none";
  bool json = false;
};

int cmd_convert(const ConvertFlags& f, std::ostream& out) {
  const PackFormat format = format_from_flags(f.codec, f.w, f.d);
  validate_layout(f.layout);
  const CsrMatrix a = apply_scaling(load_csr(f.input), f.scale);
  PackSellOptions opts;
  opts.slice_size = f.layout.c;
  opts.sigma = f.layout.sigma;
  opts.order = parse_row_order(f.layout.mode);
  opts.format = format;
  const PackSellMatrix m = build_packsell(a, opts);
  write_container_file(f.output, m);
  const Footprint fp = footprint_bits(m, a);
  if (f.json) {
    json j = base_report("convert");
    j["output"] = f.output;
    j["format"] = format.name();
    j["word_bits"] = format.word_bits;
    j["delta_bits"] = format.delta_bits;
    j["value_bits"] = format.value_bits();
    j["slice_size"] = m.slice_size();
    j["sigma"] = m.sigma();
    j["mode"] = to_string(m.order());
    j["scale"] = f.scale;
    j["counts"] = counts_json(m, fp);
    emit(out, j);
  } else {
    out << "wrote " << f.output << " (" << format.name() << ", W=" << format.word_bits << ", D=" << format.delta_bits
        << ")\n";
    out << "  nnz " << m.counts().nnz_real << ", dummies " << m.counts().n_dummy << ", padding "
        << m.counts().n_padding << '\n';
    out << "  footprint ratio " << fp.ratio << " (" << fp.pack_bits << " / " << fp.sell_equiv_bits << " bits)\n";
  }
  return kOk;
}

// ---- spmv -------------------------------------------------------------

struct SpmvFlags {
  std::string input;
  std::string format;
  std::size_t reps = kDefaultReps;
  std::size_t warmup = kDefaultWarmup;
  std::string x = "ones";
  std::string precision = "native";
  LayoutFlags layout;
  std::string scale = "none";
  std::string y_out;
};

/// "ones" or "random:SEED".
std::optional<std::uint64_t> parse_x_spec(const std::string& spec) {
  if (spec == "ones") return std::nullopt;
  constexpr std::string_view prefix = "random:";
  if (spec.starts_with(prefix)) return parse_count(std::string_view(spec).substr(prefix.size()), "--x seed");
  throw UsageError("--x must be 'ones' or 'random:SEED'");
}

std::string canonical_backend(const std::string& name) {
  if (name == "csr") return "csr64";
  if (name == "sell") return "sell64";
  return name;
}

/// Rejects unknown backend names before any file is read.
void validate_backend_name(const std::string& name) {
  static const std::vector<std::string> plain{"csr64", "csr32", "sell64", "sell32", "sell16"};
  if (std::find(plain.begin(), plain.end(), name) != plain.end()) return;
  if (name.starts_with("packsell-")) {
    try {
      PackFormat::parse(std::string_view(name).substr(9));
      return;
    } catch (const Error&) {
    }
  }
  throw UsageError("unknown format '" + name + "'");
}

template <class X>
json run_spmv(const SpmvBackend& backend, const CsrMatrix& source, const std::vector<double>& xd, const SpmvFlags& f) {
  std::vector<X> x(xd.size());
  std::transform(xd.begin(), xd.end(), x.begin(), [](double v) { return static_cast<X>(v); });
  std::vector<X> y;
  const SpmvReport r = bench_spmv<X>(backend, source, x, f.reps, f.warmup, &y);
  if (!f.y_out.empty()) {
    std::ofstream os(f.y_out);
    if (!os) throw Error("cannot open '" + f.y_out + "' for writing");
    os << std::setprecision(17);
    for (X v : y) os << static_cast<double>(v) << '\n';
  }
  json j = base_report("spmv");
  j["format"] = r.format_name;
  j["precision"] = r.precision;
  j["nnz"] = r.nnz;
  j["reps"] = r.reps;
  j["warmup"] = r.warmup;
  j["threads"] = r.threads;
  j["elapsed_per_call"] = r.elapsed_per_call;
  j["gflops"] = r.gflops;
  j["backward_error"] = r.backward_error;
  j["bytes_touched_estimate"] = r.bytes_touched_estimate;
  return j;
}

int cmd_spmv(const SpmvFlags& f, std::ostream& out) {
  const std::optional<std::uint64_t> seed = parse_x_spec(f.x);
  validate_layout(f.layout);
  if (!f.format.empty()) validate_backend_name(canonical_backend(f.format));

  std::unique_ptr<SpmvBackend> backend;
  CsrMatrix source;
  std::string reference = "source";
  if (is_container_file(f.input)) {
    PackSellMatrix m = read_container_file(f.input);
    const std::string name = "packsell-" + m.format().name();
    if (!f.format.empty() && canonical_backend(f.format) != name) {
      throw UsageError("container holds " + name + " but --format asks for " + f.format);
    }
    // The unquantised values are not in the container.
    source = decode_matrix(m);
    reference = "stored";
    backend = std::make_unique<PackSellBackend>(std::move(m));
  } else {
    source = apply_scaling(load_csr(f.input), f.scale);
    const std::string name = canonical_backend(f.format.empty() ? "packsell-fp16" : f.format);
    backend = make_backend(name, source, {f.layout.c, f.layout.sigma, parse_row_order(f.layout.mode)});
  }

  std::vector<double> x(backend->cols(), 1.0);
  if (seed) x = make_rhs_and_x0(backend->cols(), *seed).b;

  const Precision p = f.precision == "native" ? backend->native_precision() : parse_precision(f.precision);
  json j;
  switch (p) {
    case Precision::real64: j = run_spmv<double>(*backend, source, x, f); break;
    case Precision::real32: j = run_spmv<float>(*backend, source, x, f); break;
    case Precision::real16: j = run_spmv<Half>(*backend, source, x, f); break;
  }
  j["x"] = f.x;
  j["backward_error_reference"] = reference;
  if (const auto* ps = dynamic_cast<const PackSellBackend*>(backend.get())) {
    j["footprint"] = counts_json(ps->matrix(), footprint_bits(ps->matrix(), source));
  }
  emit(out, j);
  return kOk;
}

// ---- footprint --------------------------------------------------------

struct FootprintFlags {
  std::string input;
  std::string sweep = "1..15";
  std::string codec = "e8my";
  std::optional<unsigned> w;
  LayoutFlags layout;
  bool json = false;
};

std::pair<unsigned, unsigned> parse_range(const std::string& s) {
  const std::size_t dots = s.find("..");
  const std::size_t dash = s.find('-');
  std::string_view lo = s, hi = s;
  if (dots != std::string::npos) {
    lo = std::string_view(s).substr(0, dots);
    hi = std::string_view(s).substr(dots + 2);
  } else if (dash != std::string::npos) {
    lo = std::string_view(s).substr(0, dash);
    hi = std::string_view(s).substr(dash + 1);
  }
  const std::size_t a = parse_count(lo, "--sweep-d bound");
  const std::size_t b = parse_count(hi, "--sweep-d bound");
  if (a < 1 || b < a || b > 62) throw UsageError("--sweep-d must be a range lo..hi with 1 <= lo <= hi <= 62");
  return {static_cast<unsigned>(a), static_cast<unsigned>(b)};
}

int cmd_footprint(const FootprintFlags& f, std::ostream& out) {
  const auto [lo, hi] = parse_range(f.sweep);
  validate_layout(f.layout);
  std::vector<PackFormat> formats;
  for (unsigned d = lo; d <= hi; ++d) formats.push_back(format_from_flags(f.codec, f.w, d));
  const CsrMatrix a = load_csr(f.input);

  json rows = json::array();
  for (const PackFormat& format : formats) {
    PackSellOptions opts;
    opts.slice_size = f.layout.c;
    opts.sigma = f.layout.sigma;
    opts.order = parse_row_order(f.layout.mode);
    opts.format = format;
    const PackSellMatrix m = build_packsell(a, opts);
    json row;
    row["d"] = format.delta_bits;
    row["format"] = format.name();
    const json c = counts_json(m, footprint_bits(m, a));
    for (const auto& [key, value] : c.items()) row[key] = value;
    rows.push_back(std::move(row));
  }
  if (f.json) {
    json j = base_report("footprint");
    j["codec"] = f.codec;
    j["rows"] = std::move(rows);
    emit(out, j);
  } else {
    out << "d,format,nnz,n_dummy,n_padding,stored,pack_bits,sell_equiv_bits,ratio\n";
    out << std::setprecision(17);
    for (const json& r : rows) {
      out << r["d"].get<unsigned>() << ',' << r["format"].get<std::string>() << ',' << r["nnz"].get<std::size_t>()
          << ',' << r["n_dummy"].get<std::size_t>() << ',' << r["n_padding"].get<std::size_t>() << ','
          << r["stored"].get<std::size_t>() << ',' << r["pack_bits"].get<std::uint64_t>() << ','
          << r["sell_equiv_bits"].get<std::uint64_t>() << ',' << r["footprint_ratio"].get<double>() << '\n';
    }
  }
  return kOk;
}

// ---- solve ------------------------------------------------------------

struct SolveFlags {
  std::string input;
  std::string solver = "pcg";
  std::string backend = "csr64";
  std::size_t m_in = 50;
  double tol = 1e-9;
  std::size_t max_iters = 10000;
  std::uint64_t seed = 0;
  std::string scale = "none";
  std::string inner_precision = "real32";
  std::string preconditioner = "identity";
  LayoutFlags layout;
  std::string residual_csv;
  bool allow_nonconverged = false;
  bool json = false;
};

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err) {
  SolveConfig cfg;
  cfg.solver = parse_solver(f.solver);
  cfg.tol = f.tol;
  cfg.max_outer = f.max_iters;
  cfg.m_in = f.m_in;
  cfg.inner_precision = parse_precision(f.inner_precision);
  cfg.a_backend = canonical_backend(f.backend);
  validate_backend_name(cfg.a_backend);
  cfg.preconditioner = parse_preconditioner(f.preconditioner);
  validate_layout(f.layout);
  cfg.backend_options = {f.layout.c, f.layout.sigma, parse_row_order(f.layout.mode)};
  if (cfg.backend_options.order == RowOrder::explicit_perm) throw UsageError("solve needs --mode none or implicit");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  const CsrMatrix a = apply_scaling(load_csr(f.input), f.scale);
  const RhsAndGuess rhs = make_rhs_and_x0(a.rows(), f.seed);
  const SolveReport r = solve(a, rhs.b, cfg);

  if (!f.residual_csv.empty()) {
    std::ofstream os(f.residual_csv);
    if (!os) throw Error("cannot open '" + f.residual_csv + "' for writing");
    os << "iteration,relres\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.residual_history.size(); ++k) os << k << ',' << r.residual_history[k] << '\n';
  }

  if (f.json) {
    json j = base_report("solve");
    j["solver"] = to_string(cfg.solver);
    j["backend"] = cfg.a_backend;
    j["m_in"] = cfg.m_in;
    j["inner_precision"] = to_string(cfg.inner_precision);
    j["preconditioner"] = to_string(cfg.preconditioner);
    j["tol"] = cfg.tol;
    j["seed"] = f.seed;
    j["scale"] = f.scale;
    j["n"] = a.rows();
    j["converged"] = r.converged;
    j["status"] = r.status;
    j["outer_iters"] = r.outer_iters;
    j["total_inner_iters"] = r.total_inner_iters;
    j["inner_breakdowns"] = r.inner_breakdowns;
    j["final_true_relres"] = r.final_true_relres;
    j["elapsed"] = r.elapsed;
    j["residual_history"] = r.residual_history;
    emit(out, j);
  } else {
    out << to_string(cfg.solver) << " on " << f.input << " (n=" << a.rows() << ", backend " << cfg.a_backend << ")\n";
    out << "  status            " << r.status << '\n';
    out << "  outer iterations  " << r.outer_iters << '\n';
    if (cfg.solver == SolverKind::iocg) out << "  inner iterations  " << r.total_inner_iters << '\n';
    out << "  true relres       " << r.final_true_relres << '\n';
    out << "  elapsed           " << r.elapsed << " s\n";
  }
  if (r.inner_breakdowns > 0) err << "packsell: " << r.inner_breakdowns << " inner solves broke down\n";
  if (!r.converged) {
    err << "packsell: solver did not converge (" << r.status << ")\n";
    if (!f.allow_nonconverged) return kNotConverged;
  }
  return kOk;
}

// ---- gen --------------------------------------------------------------

struct GenFlags {
  std::string stencil = "poisson3d";
  std::string dims;
  std::string output;
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  std::vector<std::size_t> dims;
  for (std::string_view part : split(f.dims, ",x")) dims.push_back(parse_count(part, "dimension"));
  const std::size_t want = f.stencil == "poisson2d" ? 2 : 3;
  if (dims.size() == 1) dims.assign(want, dims.front());
  if (dims.size() != want) throw UsageError(f.stencil + " needs " + std::to_string(want) + " dimensions");
  for (std::size_t d : dims) {
    if (d == 0) throw UsageError("dimensions must be positive");
  }
  CsrMatrix a;
  try {
    a = want == 2 ? poisson2d(dims[0], dims[1]) : poisson3d(dims[0], dims[1], dims[2]);
  } catch (const DimensionError& e) {
    throw UsageError(e.what());
  }
  write_matrix_market_file(f.output, a);
  out << "wrote " << f.output << " (n=" << a.rows() << ", nnz=" << a.nnz() << ")\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PackSELL sparse matrix tool", "packsell"};
  app.require_subcommand(1);
  // Subcommands hand unknown options such as --threads to the parent.
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Kernel threads (default: PACKSELL_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber);

  InfoFlags info;
  auto* info_cmd = app.add_subcommand("info", "Matrix statistics or container header");
  info_cmd->add_option("matrix", info.path, "Matrix Market file or container")->required();
  info_cmd->add_flag("--json", info.json, "Emit one JSON object");

  ConvertFlags conv;
  auto* conv_cmd = app.add_subcommand("convert", "Build a PackSELL container from a Matrix Market file");
  conv_cmd->add_option("matrix", conv.input, "Matrix Market file")->required();
  conv_cmd->add_option("output", conv.output, "Container path")->required();
  conv_cmd->add_option("--codec", conv.codec, "Value codec: fp16, e8my, fp32")
      ->check(CLI::IsMember({"fp16", "e8my", "fp32"}));
  conv_cmd->add_option("--w", conv.w, "Word bits (32 or 64)")->check(CLI::IsMember({32, 64}));
  conv_cmd->add_option("--d", conv.d, "Delta bits")->check(CLI::Range(1, 62));
  add_layout_flags(conv_cmd, conv.layout);
  conv_cmd->add_option("--scale", conv.scale, "Scaling: none, row, sym")
      ->check(CLI::IsMember({"none", "row", "sym"}));
  conv_cmd->add_flag("--json", conv.json, "Emit one JSON object");

  SpmvFlags spmv;
  auto* spmv_cmd = app.add_subcommand("spmv", "Benchmark y = A x in one storage format");
  spmv_cmd->add_option("matrix", spmv.input, "Matrix Market file or container")->required();
  spmv_cmd->add_option("--format", spmv.format,
                       "csr, csr64, csr32, sell64, sell32, sell16, packsell-fp16, packsell-e8m<Y>, packsell-fp32");
  spmv_cmd->add_option("--reps", spmv.reps, "Timed repetitions")->check(CLI::PositiveNumber);
  spmv_cmd->add_option("--warmup", spmv.warmup, "Untimed repetitions")->check(CLI::NonNegativeNumber);
  spmv_cmd->add_option("--x", spmv.x, "Input vector: ones or random:SEED");
  spmv_cmd->add_option("--precision", spmv.precision, "Vector precision: native, real64, real32, real16")
      ->check(CLI::IsMember({"native", "real64", "real32", "real16", "fp64", "fp32", "fp16"}));
  add_layout_flags(spmv_cmd, spmv.layout);
  spmv_cmd->add_option("--scale", spmv.scale, "Scaling: none, row, sym")
      ->check(CLI::IsMember({"none", "row", "sym"}));
  spmv_cmd->add_option("--y-out", spmv.y_out, "Write y, one value per line");

  FootprintFlags fpf;
  auto* fp_cmd = app.add_subcommand("footprint", "PackSELL storage against SELL over a range of D");
  fp_cmd->add_option("matrix", fpf.input, "Matrix Market file")->required();
  fp_cmd->add_option("--sweep-d", fpf.sweep, "Range of delta bits, lo..hi");
  fp_cmd->add_option("--codec", fpf.codec, "Value codec: fp16, e8my, fp32")
      ->check(CLI::IsMember({"fp16", "e8my", "fp32"}));
  fp_cmd->add_option("--w", fpf.w, "Word bits (32 or 64)")->check(CLI::IsMember({32, 64}));
  add_layout_flags(fp_cmd, fpf.layout);
  fp_cmd->add_flag("--json", fpf.json, "Emit JSON instead of CSV");

  SolveFlags sol;
  auto* solve_cmd = app.add_subcommand("solve", "Solve A x = b for a random b in [0, 1)");
  solve_cmd->add_option("matrix", sol.input, "Matrix Market file (SPD)")->required();
  solve_cmd->add_option("--solver", sol.solver, "pcg, fcg or iocg")->check(CLI::IsMember({"pcg", "fcg", "iocg"}));
  solve_cmd->add_option("--backend", sol.backend, "Storage format for A (inner solve for iocg)");
  solve_cmd->add_option("--m-in", sol.m_in, "Inner iterations per outer step (iocg)")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", sol.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", sol.max_iters, "Outer iteration limit")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", sol.seed, "Seed for b");
  solve_cmd->add_option("--scale", sol.scale, "Scaling: none, row, sym")
      ->check(CLI::IsMember({"none", "row", "sym"}));
  solve_cmd->add_option("--inner-precision", sol.inner_precision, "real32 or real64")
      ->check(CLI::IsMember({"real32", "real64", "fp32", "fp64"}));
  solve_cmd->add_option("--preconditioner", sol.preconditioner, "identity or jacobi")
      ->check(CLI::IsMember({"identity", "jacobi"}));
  add_layout_flags(solve_cmd, sol.layout);
  solve_cmd->add_option("--residual-csv", sol.residual_csv, "Write the residual history as CSV");
  solve_cmd->add_flag("--allow-nonconverged", sol.allow_nonconverged, "Exit 0 even without convergence");
  solve_cmd->add_flag("--json", sol.json, "Emit one JSON object");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a Laplacian stencil matrix");
  gen_cmd->add_option("--stencil", gen.stencil, "poisson2d or poisson3d")
      ->check(CLI::IsMember({"poisson2d", "poisson3d"}));
  gen_cmd->add_option("--dims", gen.dims, "Grid size, e.g. 32x32x32 or 64,64")->required();
  gen_cmd->add_option("output", gen.output, "Matrix Market path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "packsell: " << e.what() << '\n';
    return kUsage;
  }

  set_num_threads(threads);
  try {
    if (*info_cmd) return cmd_info(info, out);
    if (*conv_cmd) return cmd_convert(conv, out);
    if (*spmv_cmd) return cmd_spmv(spmv, out);
    if (*fp_cmd) return cmd_footprint(fpf, out);
    if (*solve_cmd) return cmd_solve(sol, out, err);
    if (*gen_cmd) return cmd_gen(gen, out);
  } catch (const UsageError& e) {
    err << "packsell: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "packsell: parse error at line " << e.line() << ": " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "packsell: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace packsell::cli
