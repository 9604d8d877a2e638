#pragma once

// Band-limited Littlewood-Paley filters on the periodic unit torus [0,1)^n,
// FFT convolutions, the phi-transform pair and the function-space norms.
//
// Frequencies are xi = 2 pi k for integer modes k. phi-hat is the radial bump
// (1 - u^2)^order with u = log2|xi|, supported in 1/2 <= |xi| <= 2, and
// psi-hat = phi-hat / sum_j |phi-hat(2^j xi)|^2, so the Calderon sum is 1
// wherever the dyadic sum of |phi-hat|^2 is positive.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/spaces.hpp"

namespace mwt {

struct FilterSpec {
  int n = 1;
  int bits = 12;    // grid is 2^bits per axis
  int order = 4;    // exponent of the bump profile
  int j_min = 2;    // coarsest scale; 2 is the first that sees a nonzero mode
  int j_max = -1;   // -1: bits
};

double phi_hat(double xi_norm, int order);
double psi_hat(double xi_norm, int order);

struct FilterPair {
  int n = 1;
  int bits = 0;
  int order = 4;
  int j_min = 2;
  int j_max = 2;
  /// phi-hat(2^{-j} xi) and psi-hat(2^{-j} xi) on the FFT grid, one array per scale j_min..j_max.
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> psi;

  Grid grid() const { return Grid{n, bits, Box::unit(n)}; }
  CubeWindow window() const { return CubeWindow::unit(n, j_min, j_max); }
  /// |xi| of every FFT-grid mode.
  std::vector<double> frequency_norms() const;
  /// 2^{j_min} <= |xi| <= 2^{j_max}: every contributing scale is in range.
  bool resolvable(double xi_norm) const;
};

/// Throws ResolutionError when the grid cannot hold one full annulus.
FilterPair build_filters(const FilterSpec& spec);

/// max over resolvable grid modes of |sum_j conj(phi-hat) psi-hat (2^{-j} xi) - 1|.
double partition_error(const FilterPair& f);
/// min of |phi-hat| (and |psi-hat|) over 3/5 <= |xi| <= 5/3, sampled densely.
double lower_bound(const FilterPair& f);

/// Periodic vector field: Fourier coefficients and values in one place.
GridFunction to_values(const std::vector<cplx>& coefficients, const Grid& grid, int m);
std::vector<cplx> to_coefficients(const GridFunction& f);
/// Trigonometric interpolation onto a 2^bits grid (modes above the new Nyquist are dropped).
GridFunction resample(const GridFunction& f, int bits);

/// Random f with coefficients uniform in the unit disk on every resolvable mode.
GridFunction random_band_limited(const FilterPair& filters, int m, std::mt19937_64& rng);
/// Largest coefficient outside [lo, hi] in |xi| relative to the largest overall.
double spectral_leakage(const GridFunction& f, double lo, double hi);

/// phi_j * f, computed by multiplying the spectrum by phi-hat(2^{-j} xi).
GridFunction convolve_scale(const GridFunction& f, const FilterPair& filters, int j);

/// t_Q = |Q|^{1/2} (phi~_j * f)(x_Q) for every cube of the filter window.
CoefficientField analyze(const GridFunction& f, const FilterPair& filters);
/// sum_Q t_Q psi_Q, sampled on the filter grid.
GridFunction synthesize(const CoefficientField& t, const FilterPair& filters);

/// Multiplier |xi|^sigma. Throws PreconditionError when the mean is nonzero.
GridFunction lifting(const GridFunction& f, double sigma);

/// Per-level fields l(Q)^{-s} |V(x) (phi_j * f)(x)| on the filter grid.
LevelFamily function_level_fields(const GridFunction& f, const FilterPair& filters, double s,
                                  const Weighting& weighting);
/// The L A^tau_{p,q} norm of those fields over the filter window (p = infinity
/// with F-kind uses the Triebel-Lizorkin infinity norm).
NormResult function_norm(const GridFunction& f, const FilterPair& filters, const SpaceParams& params,
                         const Weighting& weighting);

/// |Q|^{1/2} max over grid nodes y in Q of |A_Q (phi_{j_Q} * f)(y)|, as an m = 1 field.
CoefficientField peetre_sup(const GridFunction& f, const FilterPair& filters, const ReducingFamily& family);

/// Frequency samples of a radial profile on a periodic box of side `period`
/// centred at the origin.
struct SpectralSamples {
  int n = 1;
  int bits = 10;
  double period = 512.0;
  std::vector<double> hat;  // profile at xi = 2 pi k / period, FFT mode order
};

SpectralSamples filter_spectrum(const FilterPair& f, bool psi, int bits = 10);
/// sup_{|gamma| <= M} sup_x |d^gamma g(x)| (1 + |x|)^{n + M + |gamma|} on the grid,
/// with derivatives taken spectrally.
double schwartz_seminorm(const SpectralSamples& s, int M);

/// Radial cut along axis 0: one row per scale and nonnegative mode.
nlohmann::json filters_to_json(const FilterPair& f);
void write_filters_csv(const FilterPair& f, const std::filesystem::path& path);

}  // namespace mwt
