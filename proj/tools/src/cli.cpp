#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "grid.hpp"
#include "owbf/bilateral_direct.hpp"
#include "owbf/errors.hpp"
#include "owbf/fast_bilateral.hpp"
#include "owbf/fd_derivative.hpp"
#include "owbf/image_io.hpp"
#include "owbf/metrics.hpp"
#include "owbf/noise.hpp"
#include "owbf/parallel.hpp"
#include "owbf/sure.hpp"
#include "report.hpp"

namespace owbf::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Options shared by every subcommand.
struct Common {
  int threads = 0;
  std::string format;
  std::string report;
};

struct FilterOptions {
  double sigma_s = 3.0;
  double sigma_r = 30.0;
  int box_radius = 1;
  std::optional<int> half_width;
  std::optional<int> order;

  BilateralParams params() const {
    BilateralParams p;
    p.sigma_s = sigma_s;
    p.sigma_r = sigma_r;
    p.box_radius = box_radius;
    p.half_width = half_width;
    p.validate();
    return p;
  }
};

void add_filter_options(CLI::App& cmd, FilterOptions& o) {
  cmd.add_option("--sigma-s", o.sigma_s, "Spatial Gaussian sigma in pixels")->capture_default_str();
  cmd.add_option("--sigma-r", o.sigma_r, "Range Gaussian sigma in gray levels")->capture_default_str();
  cmd.add_option("--box-radius", o.box_radius, "Box radius L of the robust filter's guide")->capture_default_str();
  cmd.add_option("--half-width", o.half_width, "Spatial half-width W (default ceil(3 sigma_s))");
  cmd.add_option("--order", o.order, "Shiftable kernel order N (default: automatic)");
}

// Report sink: stdout, or a file when --report is given.
class Sink {
 public:
  Sink(const Common& c, Format fallback, std::ostream& out) {
    std::ostream* target = &out;
    if (!c.report.empty()) {
      file_ = std::make_unique<std::ofstream>(c.report, std::ios::trunc);
      if (!*file_) throw FormatError("cannot open report file " + c.report);
      target = file_.get();
    }
    report_ = std::make_unique<Report>(c.format.empty() ? fallback : parse_format(c.format), *target);
  }
  Report& operator*() { return *report_; }
  Report* operator->() { return report_.get(); }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::unique_ptr<Report> report_;
};

Record psnr_value(double db) { return std::isinf(db) ? Record("inf") : Record(db); }

// ---------------------------------------------------------------- add-noise

struct AddNoise {
  std::string in, out;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

void cmd_add_noise(const AddNoise& o, const Common& c, std::ostream& out) {
  if (!(o.sigma >= 0.0)) throw ParameterError("--sigma must be >= 0");
  const ImageF clean = read_image(o.in);
  const ImageF noisy = add_gaussian_noise(clean, {o.sigma, o.seed});
  write_image(noisy, o.out);
  Sink sink(c, Format::text, out);
  sink->add({{"command", "add-noise"},
             {"width", clean.width()},
             {"height", clean.height()},
             {"sigma", o.sigma},
             {"seed", o.seed},
             {"psnr_db", psnr_value(psnr(clean, noisy).psnr_db)}});
}

// ------------------------------------------------------------------ denoise

struct Denoise {
  std::string in, out, clean;
  std::string filter = "wbf";
  std::string impl = "fast";
  std::optional<double> sigma;
  bool fd_oracle = false;
  double fd_step = kDefaultFdStep;
  bool compare_direct = false;
  FilterOptions f;
};

void cmd_denoise(const Denoise& o, const Common& c, std::ostream& out) {
  const BilateralParams p = o.f.params();
  const bool fast = o.impl == "fast";
  if (o.filter == "wbf" && !o.sigma) throw ParameterError("--filter wbf needs --sigma");
  if (o.sigma && !(*o.sigma > 0.0)) throw ParameterError("--sigma must be positive");
  if (o.filter == "wbf" && !fast && !o.fd_oracle) {
    throw ParameterError("direct wbf needs finite-difference derivatives; pass --fd-oracle (slow)");
  }
  if (o.compare_direct && !fast) throw ParameterError("--compare-direct needs --impl fast");
  if (o.f.order && !fast) throw ParameterError("--order applies to --impl fast only");

  const auto t_total = Clock::now();
  const ImageF noisy = read_image(o.in);
  std::optional<ImageF> clean;
  if (!o.clean.empty()) {
    clean = read_image(o.clean);
    require_same_shape(noisy, *clean, "--clean");
  }

  Record rec = {{"command", "denoise"}, {"filter", o.filter},   {"impl", o.impl},
                {"width", noisy.width()}, {"height", noisy.height()}, {"sigma_s", p.sigma_s},
                {"sigma_r", p.sigma_r},  {"half_width", p.window()}, {"box_radius", p.box_radius}};
  if (o.sigma) rec["sigma"] = *o.sigma;

  Record timings = Record::object();
  ImageF result;
  std::optional<ShiftableKernel> kernel;
  std::optional<std::array<double, 2>> theta;
  const auto t_filter = Clock::now();
  if (o.filter == "wbf") {
    const WbfResult r = fast ? wbf(noisy, p, *o.sigma, o.f.order) : wbf_direct(noisy, p, *o.sigma, o.fd_step);
    timings["filter_ms"] = ms_since(t_filter);
    result = r.image;
    kernel = r.kernel;
    theta = r.weights.theta;
    if (kernel) {
      rec["N"] = kernel->order();
      rec["T"] = kernel->range();
    }
    rec["theta"] = {r.weights.theta[0], r.weights.theta[1]};
    rec["degenerate"] = r.weights.degenerate;
    rec["sure_sbf"] = r.weights.sure_sbf;
    rec["sure_rbf"] = r.weights.sure_rbf;
    rec["sure_wbf"] = r.weights.sure_wbf;
  } else {
    const bool sbf = o.filter == "sbf";
    std::optional<FilterOutput> fo;
    if (fast) {
      kernel = kernel_for(noisy, p.sigma_r, o.f.order);
      fo = sbf ? fast_sbf(noisy, p, *kernel) : fast_rbf(noisy, p, *kernel);
      rec["N"] = kernel->order();
      rec["T"] = kernel->range();
    } else if (o.fd_oracle) {
      fo = sbf ? sbf_direct_fd(noisy, p, o.fd_step) : rbf_direct_fd(noisy, p, o.fd_step);
    } else {
      result = sbf ? sbf_direct(noisy, p) : rbf_direct(noisy, p);
    }
    timings["filter_ms"] = ms_since(t_filter);
    if (fo) {
      result = fo->estimate;
      if (o.sigma) rec["sure"] = sure(noisy, *fo, *o.sigma);
    }
  }

  if (o.compare_direct) {
    const auto t_direct = Clock::now();
    ImageF direct;
    if (o.filter == "sbf") {
      direct = sbf_direct(noisy, p);
    } else if (o.filter == "rbf") {
      direct = rbf_direct(noisy, p);
    } else {
      // Same weights applied to the direct estimates.
      direct = combine(sbf_direct(noisy, p), rbf_direct(noisy, p), *theta);
    }
    timings["direct_ms"] = ms_since(t_direct);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      worst = std::max(worst, std::abs(direct.pixels()[i] - result.pixels()[i]));
    }
    rec["max_diff_direct"] = worst;
  }
  if (clean) rec["psnr_db"] = psnr_value(psnr(*clean, result).psnr_db);
  if (!o.out.empty()) write_image(result, o.out);
  timings["total_ms"] = ms_since(t_total);
  rec["timings"] = timings;

  Sink sink(c, Format::jsonl, out);
  sink->add(rec);
}

// ------------------------------------------------------------------ metrics

struct Metrics {
  std::string a, b;
};

void cmd_metrics(const Metrics& o, const Common& c, std::ostream& out) {
  const ImageF a = read_image(o.a);
  const ImageF b = read_image(o.b);
  const owbf::Metrics m = psnr(a, b);
  Sink sink(c, Format::text, out);
  sink->add({{"command", "metrics"}, {"mse", m.mse}, {"psnr_db", psnr_value(m.psnr_db)}});
}

// -------------------------------------------------------------------- sweep

struct Sweep {
  std::string in, clean;
  double sigma = 0.0;
  std::string sigma_s = "2:6";
  std::string sigma_r = "10:100:10";
  std::vector<std::string> filters = {"sbf", "rbf", "wbf"};
  FilterOptions f;
};

void cmd_sweep(const Sweep& o, const Common& c, std::ostream& out) {
  if (!(o.sigma > 0.0)) throw ParameterError("--sigma must be positive");
  const ImageF noisy = read_image(o.in);
  std::optional<ImageF> clean;
  if (!o.clean.empty()) {
    clean = read_image(o.clean);
    require_same_shape(noisy, *clean, "--clean");
  }
  const std::vector<double> ss = parse_values(o.sigma_s);
  const std::vector<double> sr = parse_values(o.sigma_r);

  struct Row {
    Record rec;
    std::string filter;
    double sure;
    double psnr;
  };
  std::vector<Row> rows;
  for (double s : ss) {
    for (double r : sr) {
      FilterOptions fo = o.f;
      fo.sigma_s = s;
      fo.sigma_r = r;
      const BilateralParams p = fo.params();
      const WbfResult res = wbf(noisy, p, o.sigma, o.f.order);
      for (const std::string& name : o.filters) {
        Record rec = {{"filter", name}, {"sigma_s", s}, {"sigma_r", r}, {"N", res.kernel->order()}};
        double sure_value = 0.0;
        const ImageF* image = nullptr;
        if (name == "sbf") {
          sure_value = res.weights.sure_sbf;
          image = &res.sbf.estimate;
        } else if (name == "rbf") {
          sure_value = res.weights.sure_rbf;
          image = &res.rbf.estimate;
        } else {
          sure_value = res.weights.sure_wbf;
          image = &res.image;
        }
        rec["sure"] = sure_value;
        double db = std::numeric_limits<double>::quiet_NaN();
        if (clean) {
          db = psnr(*clean, *image).psnr_db;
          rec["psnr_db"] = psnr_value(db);
        }
        if (name == "wbf") rec["theta"] = {res.weights.theta[0], res.weights.theta[1]};
        rows.push_back({rec, name, sure_value, db});
      }
    }
  }

  // Best rows per filter: highest PSNR (when clean is known) and lowest SURE.
  for (const std::string& name : o.filters) {
    std::size_t best_sure = rows.size();
    std::size_t best_psnr = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].filter != name) continue;
      if (best_sure == rows.size() || rows[i].sure < rows[best_sure].sure) best_sure = i;
      if (clean && (best_psnr == rows.size() || rows[i].psnr > rows[best_psnr].psnr)) best_psnr = i;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].filter != name) continue;
      if (clean) rows[i].rec["best_psnr"] = i == best_psnr;
      rows[i].rec["best_sure"] = i == best_sure;
    }
  }
  Sink sink(c, Format::csv, out);
  for (const Row& row : rows) sink->add(row.rec);
}

// -------------------------------------------------------------------- bench

struct Bench {
  std::string in;
  double sigma = 20.0;
  std::uint64_t seed = 0;
  bool noisy_input = false;
  std::vector<std::string> params = {"5,30", "2,15"};
  int repeats = 3;
  int box_radius = 1;
};

struct Timing {
  double mean = 0.0;
  double min = std::numeric_limits<double>::infinity();
};

template <class Fn>
Timing time_repeats(int repeats, Fn&& fn) {
  Timing t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    const double ms = ms_since(start);
    t.mean += ms / repeats;
    t.min = std::min(t.min, ms);
  }
  return t;
}

void cmd_bench(const Bench& o, const Common& c, std::ostream& out) {
  if (o.repeats < 1) throw ParameterError("--repeats must be >= 1");
  if (!(o.sigma > 0.0)) throw ParameterError("--sigma must be positive");
  const ImageF input = read_image(o.in);
  const ImageF noisy = o.noisy_input ? input : add_gaussian_noise(input, {o.sigma, o.seed});

  Sink sink(c, Format::text, out);
  for (const std::string& text : o.params) {
    const auto [s, r] = parse_pair(text);
    FilterOptions fo;
    fo.sigma_s = s;
    fo.sigma_r = r;
    fo.box_radius = o.box_radius;
    const BilateralParams p = fo.params();

    WbfResult fast_result, direct_result;
    ImageF direct_sbf, direct_rbf;
    const Timing fast = time_repeats(o.repeats, [&] { fast_result = wbf(noisy, p, o.sigma); });
    const Timing direct = time_repeats(o.repeats, [&] { direct_result = wbf_direct(noisy, p, o.sigma); });
    const Timing estimates = time_repeats(o.repeats, [&] {
      direct_sbf = sbf_direct(noisy, p);
      direct_rbf = rbf_direct(noisy, p);
    });

    auto max_diff = [](const ImageF& a, const ImageF& b) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
      return m;
    };
    const double agree =
        std::max(max_diff(fast_result.sbf.estimate, direct_sbf), max_diff(fast_result.rbf.estimate, direct_rbf));

    sink->add({{"width", noisy.width()},
               {"height", noisy.height()},
               {"sigma_s", s},
               {"sigma_r", r},
               {"N", fast_result.kernel->order()},
               {"repeats", o.repeats},
               {"threads", max_threads()},
               {"fast_wbf_ms", {{"mean", fast.mean}, {"min", fast.min}}},
               {"direct_wbf_ms", {{"mean", direct.mean}, {"min", direct.min}}},
               {"direct_estimates_ms", {{"mean", estimates.mean}, {"min", estimates.min}}},
               {"speedup", direct.mean / fast.mean},
               {"speedup_vs_estimates", estimates.mean / fast.mean},
               {"max_diff_estimates", agree},
               {"max_diff_wbf", max_diff(fast_result.image, direct_result.image)}});
  }
}

// Applies --threads (or OWBF_THREADS) before a command body runs.
void apply_threads(const Common& c) {
  if (c.threads < 0) throw ParameterError("--threads must be >= 0");
  set_max_threads(c.threads);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bilateral denoising with SURE-optimal weighting of standard and robust filters", "owbf"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker thread cap; 0 uses every core")
      ->envname("OWBF_THREADS")
      ->capture_default_str();
  app.add_option("--format", common.format, "Report format: text, csv or jsonl")
      ->check(CLI::IsMember({"text", "csv", "jsonl"}));
  app.add_option("--report", common.report, "Write the report to this file instead of stdout");
  app.fallthrough();

  AddNoise an;
  auto* add_noise = app.add_subcommand("add-noise", "Add white Gaussian noise; prints PSNR against the input");
  add_noise->add_option("--in", an.in, "Clean image (.pgm or .pfm)")->required();
  add_noise->add_option("--out", an.out, "Noisy output; use .pfm to keep it unclipped")->required();
  add_noise->add_option("--sigma", an.sigma, "Noise standard deviation in gray levels")->required();
  add_noise->add_option("--seed", an.seed, "Noise seed")->capture_default_str();

  Denoise dn;
  auto* denoise = app.add_subcommand("denoise", "Denoise one image; prints JSON-lines diagnostics");
  denoise->add_option("--in", dn.in, "Noisy image")->required();
  denoise->add_option("--out", dn.out, "Denoised image (.pgm quantized, .pfm float)");
  denoise->add_option("--clean", dn.clean, "Clean reference; adds psnr_db to the report");
  denoise->add_option("--filter", dn.filter, "sbf, rbf or wbf")
      ->check(CLI::IsMember({"sbf", "rbf", "wbf"}))
      ->capture_default_str();
  denoise->add_option("--impl", dn.impl, "fast or direct")
      ->check(CLI::IsMember({"fast", "direct"}))
      ->capture_default_str();
  denoise->add_option("--sigma", dn.sigma, "Noise sigma; required for wbf, enables SURE");
  denoise->add_flag("--fd-oracle", dn.fd_oracle, "Direct path: finite-difference derivatives for SURE");
  denoise->add_option("--fd-step", dn.fd_step, "Finite-difference step in gray levels")->capture_default_str();
  denoise->add_flag("--compare-direct", dn.compare_direct, "Also run the direct filter; report max difference");
  add_filter_options(*denoise, dn.f);

  Metrics mt;
  auto* metrics = app.add_subcommand("metrics", "MSE and PSNR between two images");
  metrics->add_option("a", mt.a, "First image")->required();
  metrics->add_option("b", mt.b, "Second image")->required();

  Sweep sw;
  auto* sweep = app.add_subcommand("sweep", "PSNR and SURE over a (sigma_s, sigma_r) grid; CSV by default");
  sweep->add_option("--in", sw.in, "Noisy image")->required();
  sweep->add_option("--clean", sw.clean, "Clean reference for PSNR columns");
  sweep->add_option("--sigma", sw.sigma, "Noise sigma")->required();
  sweep->add_option("--sigma-s", sw.sigma_s, "Values: list 2,3,4 or range lo:hi[:step]")->capture_default_str();
  sweep->add_option("--sigma-r", sw.sigma_r, "Values: list or range")->capture_default_str();
  sweep->add_option("--filters", sw.filters, "Filters to report")
      ->delimiter(',')
      ->check(CLI::IsMember({"sbf", "rbf", "wbf"}))
      ->capture_default_str();
  sweep->add_option("--box-radius", sw.f.box_radius, "Box radius L")->capture_default_str();
  sweep->add_option("--half-width", sw.f.half_width, "Spatial half-width W");
  sweep->add_option("--order", sw.f.order, "Shiftable kernel order N");

  Bench bn;
  auto* bench = app.add_subcommand("bench", "Time fast wbf against direct wbf and the direct estimates");
  bench->add_option("--in", bn.in, "Image; noise is added unless --noisy-input")->required();
  bench->add_flag("--noisy-input", bn.noisy_input, "Use the input as the noisy image");
  bench->add_option("--sigma", bn.sigma, "Noise sigma")->capture_default_str();
  bench->add_option("--seed", bn.seed, "Noise seed")->capture_default_str();
  bench->add_option("--params", bn.params, "sigma_s,sigma_r pairs (repeatable)")->capture_default_str();
  bench->add_option("--repeats", bn.repeats, "Timed runs per cell")->capture_default_str();
  bench->add_option("--box-radius", bn.box_radius, "Box radius L")->capture_default_str();

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "owbf: usage error: " << e.what() << " (see --help)\n";
    return 2;
  }

  try {
    apply_threads(common);
    if (add_noise->parsed()) cmd_add_noise(an, common, out);
    if (denoise->parsed()) cmd_denoise(dn, common, out);
    if (metrics->parsed()) cmd_metrics(mt, common, out);
    if (sweep->parsed()) cmd_sweep(sw, common, out);
    if (bench->parsed()) cmd_bench(bn, common, out);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "owbf: error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace owbf::cli
