// braidcell: validate surfaces, reduce curve systems to edge-transposition
// words, check traces, and run the random round-trip suite.
//
// Exit codes: 0 ok, 1 bad input or usage, 2 not null-homologous,
// 3 move limit exceeded, 4 trace check failed, 5 fuzz failures.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "braidcell/error.hpp"
#include "braidcell/rewrite.hpp"
#include "braidcell/surface.hpp"
#include "braidcell/verify.hpp"

namespace bc = braidcell;

namespace {

enum Exit { kOk = 0, kBadInput = 1, kNotNull = 2, kLimit = 3, kCheck = 4, kFuzz = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

struct SurfaceSource {
  std::string path;
  std::string canonical;

  void attach(CLI::App* cmd) {
    cmd->add_option("--surface", path, "Surface file");
    cmd->add_option("--canonical", canonical,
                    "Built-in surface: tetrahedron, cube, cube_refined, cube_grid:K, torus:RxC");
  }

  std::shared_ptr<const bc::Surface> load() const {
    if (path.empty() == canonical.empty()) {
      throw UsageError("give exactly one of --surface and --canonical");
    }
    if (!path.empty()) return std::make_shared<const bc::Surface>(bc::parse_surface(read_file(path)));
    return std::make_shared<const bc::Surface>(
        bc::build_canonical(bc::parse_canonical_spec(canonical)));
  }
};

std::size_t checked_limit(long long limit) {
  if (limit < 1) throw UsageError("--limit must be at least 1");
  return static_cast<std::size_t>(limit);
}

int cmd_validate(const SurfaceSource& src) {
  auto s = src.load();
  std::cout << "F=" << s->face_count() << " E=" << s->edge_count() << " V=" << s->vertex_count()
            << " g=" << s->genus() << "\n";
  return kOk;
}

int cmd_reduce(const SurfaceSource& src, const std::string& curve_path,
               const std::string& word_path, const std::string& trace_path, long long limit) {
  auto s = src.load();
  if (curve_path.empty() == word_path.empty()) {
    throw UsageError("give exactly one of --curve and --word");
  }
  std::optional<bc::CurveSystem> curve;
  if (!curve_path.empty()) {
    curve.emplace(bc::parse_curve(s, read_file(curve_path)));
  } else {
    curve.emplace(bc::curve_of_word(s, bc::parse_word(*s, read_file(word_path))));
  }
  bc::Reduction r = bc::reduce_main(*curve, bc::ReduceOptions{checked_limit(limit)});
  if (!trace_path.empty()) write_file(trace_path, bc::serialize_trace(r.trace));
  std::cout << bc::serialize_word(*s, r.word);
  return kOk;
}

int cmd_check(const std::string& trace_path) {
  bc::Trace trace = bc::parse_trace(read_file(trace_path));
  bc::CheckReport report = bc::check_trace(trace);
  for (const bc::CheckEntry& e : report.entries) {
    std::cout << "check " << e.name << " " << (e.pass ? "pass" : "fail") << " "
              << static_cast<long long>(e.ms + 0.5) << "\n";
    if (!e.pass) std::cerr << e.name << ": " << e.detail << "\n";
  }
  return report.passed() ? kOk : kCheck;
}

int cmd_fuzz(const SurfaceSource& src, int count, int length, std::uint64_t seed,
             long long limit, bool serial, const std::string& counterexample_path) {
  auto s = src.load();
  if (count < 0 || length < 0) throw UsageError("--count and --length must be nonnegative");
  bc::FuzzOptions options{count, length, seed, checked_limit(limit)};
  auto start = std::chrono::steady_clock::now();
  bc::FuzzSummary summary =
      serial ? bc::run_fuzz_serial(s, options) : bc::run_fuzz_parallel(s, options);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  std::cout << summary.serialize();
  std::cerr << "elapsed " << static_cast<long long>(ms) << " ms\n";
  if (summary.failed() == 0) return kOk;
  for (const bc::FuzzCase& c : summary.cases) {
    if (!c.pass) {
      write_file(counterexample_path, c.counterexample);
      std::cerr << "counterexample written to " << counterexample_path << "\n";
      break;
    }
  }
  return kFuzz;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduce surface braids to edge-transposition words"};
  app.require_subcommand(1);

  SurfaceSource src;
  long long limit = static_cast<long long>(bc::default_move_limit());

  CLI::App* validate = app.add_subcommand("validate", "Validate a surface and print its counts");
  src.attach(validate);

  std::string curve_path, word_path, trace_out;
  CLI::App* reduce = app.add_subcommand("reduce", "Reduce a curve system to a generator word");
  src.attach(reduce);
  reduce->add_option("--curve", curve_path, "Curve file");
  reduce->add_option("--word", word_path, "Generator word file; its curve is reduced");
  reduce->add_option("--trace", trace_out, "Write the move trace here");
  reduce->add_option("--limit", limit, "Move limit (default 1000000 or BRAIDCELL_MOVE_LIMIT)");

  std::string trace_in;
  CLI::App* check = app.add_subcommand("check", "Replay and audit a trace file");
  check->add_option("trace", trace_in, "Trace file")->required();

  int count = 0, length = 30;
  std::uint64_t seed = 1;
  bool serial = false;
  std::string counterexample = "braidcell-counterexample.txt";
  CLI::App* fuzz = app.add_subcommand("fuzz", "Random word round trips");
  src.attach(fuzz);
  fuzz->add_option("--count", count, "Number of cases");
  fuzz->add_option("--length", length, "Maximum word length");
  fuzz->add_option("--seed", seed, "Base seed");
  fuzz->add_option("--limit", limit, "Move limit per case");
  fuzz->add_flag("--serial", serial, "Run cases on one thread");
  fuzz->add_option("--counterexample", counterexample, "Where to write the first failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*validate) return cmd_validate(src);
    if (*reduce) return cmd_reduce(src, curve_path, word_path, trace_out, limit);
    if (*check) return cmd_check(trace_in);
    if (*fuzz) return cmd_fuzz(src, count, length, seed, limit, serial, counterexample);
  } catch (const bc::NotNullHomologous& e) {
    std::cerr << "not null-homologous: " << e.what() << "\n";
    return kNotNull;
  } catch (const bc::MoveLimitExceeded& e) {
    std::cerr << e.what() << "\n";
    return kLimit;
  } catch (const bc::ReplayDivergence& e) {
    std::cerr << e.what() << "\n";
    return kCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
