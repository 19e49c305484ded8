#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fractail::cli {

enum class Experiment { Forward, Tail, Extract, Scalar, Uniqueness, HeatContrast, MlfTable };

const char* to_string(Experiment e);

struct GridSpec {
  double t_min = 0.0;
  double t_max = 0.0;
  int points_per_decade = 16;
};

// A function of x given either as a polynomial in x or as a linear
// interpolation table; exactly one is set.
struct FunctionSpec {
  std::vector<double> polynomial;
  std::vector<double> table_x, table_values;

  double operator()(double x) const;
};

struct OperatorSpec {
  enum class Kind { Laplacian, SturmLiouville };
  Kind kind = Kind::Laplacian;
  double length = 1.0;
  std::size_t modes = 16;
  std::size_t grid_points = 1025;       // laplacian sampling grid
  std::size_t interior_points = 1000;   // sturm-liouville finite differences
  FunctionSpec a, c;                    // sturm-liouville coefficients
};

// Temporal factor on [0, t0].
struct MuSpec {
  enum class Kind { Constant, Polynomial, Segments, Samples };
  Kind kind = Kind::Constant;
  double constant = 1.0;
  std::vector<double> polynomial;
  struct Segment {
    double begin, end;
    std::vector<double> coeffs;
  };
  std::vector<Segment> segments;
  std::vector<double> sample_t, sample_values;
};

// Spatial profile: modal coordinates, or a function of x projected onto the modes.
struct ProfileSpec {
  std::vector<double> modal;
  std::optional<FunctionSpec> function;
};

struct ObservationCfg {
  enum class Kind { Interior, Flux };
  Kind kind = Kind::Interior;
  double begin = 0.0, end = 1.0;
  std::optional<std::size_t> test_mode;  // 1-based eigenfunction as test function
  std::optional<FunctionSpec> test_function;
  double left = 0.0, right = 0.0;
};

struct NoiseSpec {
  double level = 0.0;
  std::uint64_t rng_seed = 1;
};

struct Scenario {
  std::string path;
  std::string digest;  // FNV-1a 64 of the file bytes, hex
  Experiment experiment = Experiment::Forward;
  double alpha = 0.5;

  std::optional<OperatorSpec> op;
  double t0 = 1.0;
  std::optional<MuSpec> mu;
  std::optional<ProfileSpec> profile;
  std::optional<ObservationCfg> observation;
  std::optional<GridSpec> grid;
  NoiseSpec noise;
  std::map<std::string, double> tolerances;
  std::string output_dir;

  // experiment blocks
  std::size_t forward_modes = 0;             // forward: 0 means every operator mode
  std::vector<double> pairings;              // tail / extract: explicit a_n (else from profile and observation)
  int K = 0, M = 0;
  std::size_t recover_modes = 0;
  double offset = 0.0;                       // scalar: constant a in v(t)
  ProfileSpec f1, f2;                        // uniqueness
  std::vector<std::size_t> contrast_modes;   // heat-contrast, 1-based
  double fractional_alpha = 0.5;
  bool engineered = false;
  double beta = 0.0;                         // mlf-table
  GridSpec eta;

  double tolerance(const std::string& name) const { return tolerances.at(name); }
};

/// Parses and validates a scenario file. Throws fractail::Error(ConfigError)
/// with the offending field path in the message.
Scenario load_scenario(const std::string& path);

/// Same, from text already in memory (path is used for messages only).
Scenario parse_scenario(const std::string& text, const std::string& path);

}  // namespace fractail::cli
