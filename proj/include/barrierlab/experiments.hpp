#pragma once

/// Experiment orchestration: configuration files, deterministic artifact
/// output, and the mapping from high-level experiment names to the library
/// primitives they exercise.
///
/// An experiment is described by a JSON configuration document.  Running it
/// produces a set of CSV artifacts plus one JSON report in the chosen output
/// directory.  All floating-point output is formatted with maximum precision
/// and fixed iteration order, so a given configuration always produces
/// byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace barrierlab {

/// A validated experiment configuration.
///
/// The document is checked against a key allowlist on construction: any key
/// not recognised by the schema raises ConfigError naming the offending path
/// (e.g. "/solver/tolerence").  Values are fetched lazily by the runners, so
/// type or range errors surface only for sections an experiment actually
/// reads.  Every section has defaults; the minimal valid document is
/// `{"experiment": "analyze-phi"}`.
class ExperimentConfig {
  public:
    /// Parses and validates a configuration from a file on disk.
    /// Malformed JSON raises ConfigError with a line/column anchor.
    static ExperimentConfig from_file(const std::string& path);

    /// Parses and validates a configuration from an in-memory string.
    /// `origin` is used in error messages (defaults to "<string>").
    static ExperimentConfig from_text(const std::string& text,
                                      const std::string& origin = "<string>");

    /// Canonical serialization: sorted keys, two-space indent, trailing
    /// newline.  Parsing the result reproduces the same document, and two
    /// semantically equal configurations serialize identically.
    std::string canonical_text() const;

    /// The experiment name ("analyze-phi", "build-barrier", ...).
    const std::string& experiment() const { return experiment_; }

    /// Seed recorded in reports and available to randomised runners.
    std::uint64_t seed() const { return seed_; }

    /// Directory that receives artifacts.  Defaults to "out".
    const std::string& output_dir() const { return output_dir_; }

    /// Mutators used by the command-line front end for flag overrides.
    void set_output_dir(const std::string& dir);
    void set_seed(std::uint64_t seed);
    void set_grid_h(double h);
    void set_experiment(const std::string& name);

    /// Read-only view of the underlying document.
    const nlohmann::json& doc() const { return doc_; }

  private:
    ExperimentConfig() = default;

    nlohmann::json doc_;
    std::string experiment_;
    std::uint64_t seed_ = 0;
    std::string output_dir_ = "out";
};

/// Outcome of one experiment run.
struct RunResult {
    /// 0 when every check the experiment performs passed, 2 when the
    /// experiment ran to completion but a verification verdict failed.
    /// (Hard errors are reported by exception instead.)
    int exit_code = 0;

    /// Absolute path of the JSON report written for the run.
    std::string report_path;

    /// File names (relative to the output directory) of all artifacts
    /// written, report included, in write order.
    std::vector<std::string> artifacts;

    /// One-line human-readable outcome, e.g. "analyze-phi: pass".
    std::string summary_line;
};

/// Runs the experiment named by the configuration, writing artifacts into
/// its output directory (created if missing).  Throws ConfigError for an
/// unknown experiment name or unusable parameters, and propagates library
/// errors from the underlying primitives.
RunResult run_experiment(const ExperimentConfig& config);

/// Consolidates every "*-report.json" found directly inside `dir` into a
/// summary table.  Writes "summary.json" and "summary.csv" into the same
/// directory.  Reports that fail to parse are kept as rows flagged
/// "unreadable".  Returns 0 when at least one report was found and all were
/// readable, 1 otherwise.
int consolidate_reports(const std::string& dir);

/// Formats a double with up to 17 significant digits ("%.17g"), the shortest
/// representation guaranteed to round-trip.  Used for every number that
/// lands in a CSV artifact.
std::string format_double(double value);

}  // namespace barrierlab
